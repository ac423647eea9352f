#include "ecdiv/oracle.hpp"

#include <cmath>
#include <limits>

#include "ecdiv/error.hpp"

namespace ecdiv::oracle {

double RandomInstance::uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng_); }

int RandomInstance::uniform_int(int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng_); }

Eigen::MatrixXcd RandomInstance::ginibre(Index rows, Index cols) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXcd w(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) {
      const double re = g(rng_);
      const double im = g(rng_);
      w(i, j) = {re, im};
    }
  return w;
}

Eigen::MatrixXcd RandomInstance::unitary(Index dim) {
  const Eigen::HouseholderQR<Eigen::MatrixXcd> qr(ginibre(dim, dim));
  Eigen::MatrixXcd q = qr.householderQ();
  const Eigen::MatrixXcd r = qr.matrixQR();
  for (Index j = 0; j < dim; ++j) {
    const double a = std::abs(r(j, j));
    if (a > 0.0) q.col(j) *= r(j, j) / a;
  }
  return q;
}

HermitianMatrix RandomInstance::state(Index dim, Index rank) {
  const Eigen::MatrixXcd w = ginibre(dim, rank);
  const Eigen::MatrixXcd m = w * w.adjoint();
  return HermitianMatrix(Eigen::MatrixXcd(m / m.trace().real()));
}

HermitianMatrix RandomInstance::positive_definite(Index dim, double lo, double hi) {
  Eigen::VectorXd ev(dim);
  for (Index i = 0; i < dim; ++i) ev(i) = uniform(lo, hi);
  const Eigen::MatrixXcd u = unitary(dim);
  return HermitianMatrix(Eigen::MatrixXcd(u * ev.cast<cdouble>().asDiagonal() * u.adjoint()));
}

Eigen::VectorXd RandomInstance::spectrum_with_energy(Index dim, double e) {
  std::exponential_distribution<double> x(1.0);
  Eigen::VectorXd p(dim);
  for (Index i = 0; i < dim; ++i) p(i) = x(rng_);
  p /= p.sum();
  double mean = 0.0;
  for (Index n = 0; n < dim; ++n) mean += double(n) * p(n);
  if (mean > e) {
    // mix with the vacuum until the budget holds
    const double s = mean > 0.0 ? e / mean : 0.0;
    p *= s;
    p(0) += 1.0 - s;
  }
  return p;
}

namespace {

void enumerate(Index pos, int left, double energy_left, Eigen::VectorXi& counts,
               const std::function<void(const Eigen::VectorXi&)>& visit) {
  const Index dim = counts.size();
  if (pos == dim - 1) {
    if (double(pos) * left <= energy_left + 1e-9) {
      counts(pos) = left;
      visit(counts);
    }
    return;
  }
  for (int c = 0; c <= left; ++c) {
    const double used = double(pos) * c;
    if (used > energy_left + 1e-9) break;
    counts(pos) = c;
    enumerate(pos + 1, left - c, energy_left - used, counts, visit);
  }
  counts(pos) = 0;
}

}  // namespace

GridOptimum grid_probe_maximize(const std::function<double(const Eigen::VectorXd&)>& objective, double e, Index dim,
                                int resolution) {
  if (dim < 1 || resolution < 1) throw Error(ErrorKind::invalid_parameter, "grid search needs dim >= 1 and resolution >= 1");
  GridOptimum best;
  best.value = -std::numeric_limits<double>::infinity();
  Eigen::VectorXi counts = Eigen::VectorXi::Zero(dim);
  // energies are compared in units of 1/resolution
  enumerate(0, resolution, e * resolution, counts, [&](const Eigen::VectorXi& c) {
    const Eigen::VectorXd p = c.cast<double>() / double(resolution);
    const double v = objective(p);
    if (v > best.value) {
      best.value = v;
      best.spectrum = p;
    }
  });
  return best;
}

double measurement_bruteforce_mre(const HermitianMatrix& rho, const HermitianMatrix& sigma, int basis_samples,
                                  std::uint64_t seed) {
  if (rho.dim() != sigma.dim()) throw Error(ErrorKind::invalid_dimension, "measurement oracle: dimension mismatch");
  RandomInstance inst(seed);
  const Index d = rho.dim();
  double best = 0.0;
  for (int s = 0; s < basis_samples; ++s) {
    const Eigen::MatrixXcd u = inst.unitary(d);
    double kl = 0.0;
    for (Index x = 0; x < d; ++x) {
      const double p = std::max(0.0, (u.col(x).adjoint() * rho.matrix() * u.col(x))(0).real());
      const double q = std::max(0.0, (u.col(x).adjoint() * sigma.matrix() * u.col(x))(0).real());
      if (p <= 0.0) continue;
      if (q <= 0.0) return std::numeric_limits<double>::infinity();
      kl += p * std::log(p / q);
    }
    best = std::max(best, kl);
  }
  return best;
}

HermitianMatrix choi_contraction_apply(const ChoiMatrix& choi, const HermitianMatrix& rho_ra, Index dim_r) {
  const Index da = choi.dim_r();
  const Index db = choi.dim_b();
  if (dim_r < 1 || rho_ra.dim() != dim_r * da)
    throw Error(ErrorKind::invalid_dimension, "choi_contraction_apply: state does not match the channel input");
  const auto& rho = rho_ra.matrix();
  const auto& j = choi.matrix.matrix();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim_r * db, dim_r * db);
  for (Index r = 0; r < dim_r; ++r)
    for (Index b = 0; b < db; ++b)
      for (Index r2 = 0; r2 < dim_r; ++r2)
        for (Index b2 = 0; b2 < db; ++b2) {
          cdouble acc = 0.0;
          for (Index a = 0; a < da; ++a)
            for (Index a2 = 0; a2 < da; ++a2) acc += rho(r * da + a, r2 * da + a2) * j(a * db + b, a2 * db + b2);
          out(r * db + b, r2 * db + b2) = acc;
        }
  return HermitianMatrix(out);
}

}  // namespace ecdiv::oracle
