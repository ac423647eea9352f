#pragma once

#include <Eigen/Dense>

#include "ecdiv/hilbert.hpp"

namespace ecdiv::test {

inline double max_abs_diff(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

inline double max_abs_diff(const HermitianMatrix& a, const HermitianMatrix& b) {
  return max_abs_diff(a.matrix(), b.matrix());
}

inline HermitianMatrix diag(std::initializer_list<double> d) {
  Eigen::VectorXd v(Index(d.size()));
  Index i = 0;
  for (double x : d) v(i++) = x;
  return HermitianMatrix::diagonal(v);
}

inline double classical_kl(const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
  double s = 0.0;
  for (Index i = 0; i < p.size(); ++i)
    if (p(i) > 0) s += p(i) * std::log(p(i) / q(i));
  return s;
}

}  // namespace ecdiv::test
