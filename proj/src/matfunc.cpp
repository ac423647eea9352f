#include "ecdiv/matfunc.hpp"

namespace ecdiv {

QuadratureRule gauss_legendre(int m) {
  if (m < 1) throw Error(ErrorKind::invalid_parameter, "gauss_legendre: m must be >= 1");
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(m, m);
  for (int k = 1; k < m; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    jacobi(k, k - 1) = jacobi(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
  QuadratureRule rule;
  for (int i = 0; i < m; ++i) {
    const double v0 = es.eigenvectors()(0, i);
    rule.nodes.push_back(0.5 * (es.eigenvalues()(i) + 1.0));
    rule.weights.push_back(v0 * v0);
  }
  return rule;
}

double rational_log_scalar(double x, const QuadratureRule& rule, int k) {
  const double y = std::pow(x, std::ldexp(1.0, -k));
  double sum = 0.0;
  for (std::size_t j = 0; j < rule.nodes.size(); ++j)
    sum += rule.weights[j] * (y - 1.0) / (rule.nodes[j] * (y - 1.0) + 1.0);
  return std::ldexp(sum, k);
}

}  // namespace ecdiv
