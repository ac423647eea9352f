#include "ecdiv/hilbert.hpp"

#include <cmath>
#include <string>

namespace ecdiv {

EnergyBudget::EnergyBudget(HermitianMatrix h, double e) : hamiltonian(std::move(h)), budget(e) {
  if (!std::isfinite(e) || e < 0.0) throw Error(ErrorKind::invalid_parameter, "EnergyBudget: E must be finite and >= 0");
  const Index n = hamiltonian.dim();
  if (n < 1) throw Error(ErrorKind::invalid_dimension, "EnergyBudget: empty Hamiltonian");
  const auto& m = hamiltonian.matrix();
  if ((m - Eigen::MatrixXcd(m.diagonal().asDiagonal())).cwiseAbs().maxCoeff() > 0.0)
    throw Error(ErrorKind::invalid_parameter, "EnergyBudget: Hamiltonian must be diagonal in the Fock basis");
  for (Index i = 0; i < n; ++i) {
    const double v = m(i, i).real();
    if (v < 0.0 || (i > 0 && v < m(i - 1, i - 1).real()))
      throw Error(ErrorKind::invalid_parameter, "EnergyBudget: levels must be non-negative and non-decreasing");
  }
}

HermitianMatrix number_operator(Index dim) {
  if (dim < 1) throw Error(ErrorKind::invalid_dimension, "number_operator: dim must be >= 1");
  return HermitianMatrix::diagonal(Eigen::VectorXd::LinSpaced(dim, 0.0, double(dim - 1)));
}

EnergyBudget photon_budget(Index dim, double e) { return EnergyBudget(number_operator(dim), e); }

void check_distribution(std::span<const double> p, double tol) {
  if (p.empty()) throw Error(ErrorKind::invalid_dimension, "distribution is empty");
  double sum = 0.0;
  for (double v : p) {
    if (!std::isfinite(v) || v < -tol) throw Error(ErrorKind::invalid_distribution, "distribution has a negative entry");
    sum += v;
  }
  if (std::abs(sum - 1.0) > tol)
    throw Error(ErrorKind::invalid_distribution, "distribution sums to " + std::to_string(sum));
}

HermitianMatrix purify_diagonal(std::span<const double> spectrum) {
  check_distribution(spectrum);
  const Index n = Index(spectrum.size());
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(n * n);
  for (Index i = 0; i < n; ++i) psi(i * n + i) = std::sqrt(std::max(0.0, spectrum[i]));
  return HermitianMatrix(Eigen::MatrixXcd(psi * psi.adjoint()));
}

}  // namespace ecdiv
