#include <cmath>

#include "doctest.h"
#include "ecdiv/matfunc.hpp"
#include "ecdiv/oracle.hpp"
#include "support.hpp"

using namespace ecdiv;
using ecdiv::test::diag;
using ecdiv::test::max_abs_diff;

namespace {

HermitianMatrix sandwich(const Eigen::MatrixXcd& k, const HermitianMatrix& a) {
  return HermitianMatrix(Eigen::MatrixXcd(k * a.matrix() * k.adjoint()));
}

double min_eig(const HermitianMatrix& a) { return a.min_eigenvalue(); }

}  // namespace

TEST_SUITE("matfunc") {

TEST_CASE("gauss-legendre rules") {
  const auto r1 = gauss_legendre(1);
  CHECK(r1.nodes.size() == 1);
  CHECK(std::abs(r1.nodes[0] - 0.5) < 1e-15);
  CHECK(std::abs(r1.weights[0] - 1.0) < 1e-15);

  const auto r2 = gauss_legendre(2);
  CHECK(std::abs(r2.nodes[0] - (3 - std::sqrt(3.0)) / 6) < 1e-15);
  CHECK(std::abs(r2.nodes[1] - (3 + std::sqrt(3.0)) / 6) < 1e-15);
  CHECK(std::abs(r2.weights[0] - 0.5) < 1e-15);

  for (int m = 1; m <= 8; ++m) {
    const auto r = gauss_legendre(m);
    for (int deg = 0; deg <= 2 * m - 1; ++deg) {
      double s = 0;
      for (int j = 0; j < m; ++j) s += r.weights[j] * std::pow(r.nodes[j], deg);
      CHECK(std::abs(s - 1.0 / (deg + 1)) < 1e-14);
    }
  }
}

TEST_CASE("matrix power and support") {
  oracle::RandomInstance inst(31);
  const auto x = inst.state(5, 3);  // rank 3
  CHECK(max_abs_diff(matrix_power(x, 1.0), x) < 1e-14);
  const auto proj = matrix_power(x, 0.0);
  CHECK(max_abs_diff(HermitianMatrix(Eigen::MatrixXcd(proj.matrix() * proj.matrix())), proj) < 1e-12);
  CHECK(std::abs(proj.trace() - 3.0) < 1e-12);
  const auto h = matrix_power(x, 0.5);
  CHECK(max_abs_diff(HermitianMatrix(Eigen::MatrixXcd(h.matrix() * h.matrix())), x) < 1e-10);

  const auto info = support(x);
  CHECK(info.rank == 3);
  CHECK(max_abs_diff(info.projector(), proj) < 1e-12);
  CHECK(support_contained(x, HermitianMatrix::identity(5)));
  CHECK_FALSE(support_contained(HermitianMatrix::identity(5), x));
}

TEST_CASE("weighted geometric mean basics") {
  for (double t : {-1.0, -0.5, 0.0, 0.25, 1.0}) CHECK(max_abs_diff(weighted_geometric_mean(
      HermitianMatrix::identity(3), HermitianMatrix::identity(3), t), HermitianMatrix::identity(3)) < 1e-14);
  CHECK(max_abs_diff(weighted_geometric_mean(diag({1, 4}), diag({9, 1}), 0.5), diag({3, 2})) < 1e-14);

  oracle::RandomInstance inst(32);
  const auto a = inst.positive_definite(4), b = inst.positive_definite(4);
  CHECK(max_abs_diff(weighted_geometric_mean(a, b, -0.125), weighted_geometric_mean(b, a, 1.125)) < 1e-9);
  CHECK(max_abs_diff(weighted_geometric_mean(a, b, 0.0), a) < 1e-12);
  CHECK(max_abs_diff(weighted_geometric_mean(a, b, 1.0), b) < 1e-12);
  CHECK_THROWS_AS(weighted_geometric_mean(a, b, 3.0), Error);

  // singular x: G_0 is x itself and G_1 is y compressed to supp x
  const auto x = inst.state(4, 2);
  const auto p = matrix_power(x, 0.0);
  CHECK(max_abs_diff(weighted_geometric_mean(x, b, 0.0), x) < 1e-12);
  CHECK(max_abs_diff(weighted_geometric_mean(x, b, 1.0),
                     HermitianMatrix(Eigen::MatrixXcd(p.matrix() * b.matrix() * p.matrix()))) < 1e-10);
}

TEST_CASE("geometric mean is monotone for t in [0, 1]") {
  oracle::RandomInstance inst(33);
  for (int trial = 0; trial < 100; ++trial) {
    const Index d = inst.uniform_int(2, 5);
    const auto a1 = inst.positive_definite(d), b1 = inst.positive_definite(d);
    const auto a2 = a1 + inst.state(d, 1) * 0.5, b2 = b1 + inst.state(d, 2) * 0.3;
    const double t = inst.uniform(0.0, 1.0);
    const auto diff = weighted_geometric_mean(a2, b2, t) - weighted_geometric_mean(a1, b1, t);
    CHECK(min_eig(diff) > -1e-10);
  }
}

TEST_CASE("geometric mean identities on random pairs") {
  oracle::RandomInstance inst(34);
  const double grid[] = {-0.5, -0.25, 0.25, 0.5};
  for (int trial = 0; trial < 30; ++trial) {
    const Index d = inst.uniform_int(2, 6);
    const auto a = inst.positive_definite(d), b = inst.positive_definite(d);
    for (double s : grid)
      for (double t : grid) {
        CHECK(max_abs_diff(weighted_geometric_mean(a, weighted_geometric_mean(a, b, t), s),
                           weighted_geometric_mean(a, b, s * t)) < 1e-9);
        const double u = s + t - s * t;
        if (u >= -1.0)
          CHECK(max_abs_diff(weighted_geometric_mean(weighted_geometric_mean(a, b, t), b, s),
                             weighted_geometric_mean(a, b, u)) < 1e-9);
      }
    const Eigen::MatrixXcd k = inst.ginibre(d, d);
    for (double t : {-1.0, -0.5, -0.125})
      CHECK(max_abs_diff(weighted_geometric_mean(sandwich(k, a), sandwich(k, b), t),
                         sandwich(k, weighted_geometric_mean(a, b, t))) < 1e-9 * (1 + k.squaredNorm()));
  }
}

TEST_CASE("operator relative entropy") {
  oracle::RandomInstance inst(35);
  const auto rho = inst.state(3);
  CHECK(max_abs_diff(*operator_relative_entropy(rho, rho), HermitianMatrix::zero(3)) < 1e-12);

  const auto dop = operator_relative_entropy(diag({0.2, 0.5, 0.3}), diag({0.4, 0.4, 0.2}));
  REQUIRE(dop);
  CHECK(max_abs_diff(*dop, diag({0.2 * std::log(0.5), 0.5 * std::log(1.25), 0.3 * std::log(1.5)})) < 1e-14);

  CHECK_FALSE(operator_relative_entropy(HermitianMatrix::identity(2), diag({1, 0})).has_value());
  CHECK(operator_relative_entropy(diag({1, 0}), diag({1, 0})).has_value());

  for (int trial = 0; trial < 20; ++trial) {
    const auto x1 = inst.positive_definite(2), x2 = inst.positive_definite(2);
    const auto y1 = inst.positive_definite(2), y2 = inst.positive_definite(2);
    const auto lhs = *operator_relative_entropy(tensor(x1, x2), tensor(y1, y2));
    const auto rhs = tensor(*operator_relative_entropy(x1, y1), x2) + tensor(x1, *operator_relative_entropy(x2, y2));
    CHECK(max_abs_diff(lhs, rhs) < 1e-9);
  }
}

TEST_CASE("derivative of the geometric mean and transformer equality for D_op") {
  oracle::RandomInstance inst(36);
  for (int trial = 0; trial < 20; ++trial) {
    const Index d = inst.uniform_int(2, 6);
    const auto a = inst.positive_definite(d), b = inst.positive_definite(d);
    const double t = 1e-5;
    const auto fd = (weighted_geometric_mean(a, b, t) - a) * (1.0 / t);
    const auto dop = *operator_relative_entropy(a, b);
    CHECK(max_abs_diff(fd, dop * -1.0) < 1e-4);

    const Eigen::MatrixXcd m = inst.ginibre(d, d);
    CHECK(max_abs_diff(*operator_relative_entropy(sandwich(m, a), sandwich(m, b)), sandwich(m, dop)) <
          1e-9 * (1 + m.squaredNorm()));
  }
}

TEST_CASE("rational logarithm") {
  CHECK(max_abs_diff(rational_log_approx(HermitianMatrix::identity(3), 3, 3), HermitianMatrix::zero(3)) < 1e-15);
  CHECK(std::abs(rational_log_scalar(2.0, gauss_legendre(3), 3) - std::log(2.0)) < 1e-6);
  CHECK(max_abs_diff(rational_log_approx(diag({0.5, 3}), 3, 3), diag({std::log(0.5), std::log(3.0)})) < 1e-5);

  oracle::RandomInstance inst(37);
  const auto z = inst.positive_definite(4, 0.05, 5.0);
  const auto exact = apply_spectral(z, [](auto v) { return decltype(v)(std::log(double(v))); });
  const double e11 = max_abs_diff(rational_log_approx(z, 1, 1), exact);
  const double e33 = max_abs_diff(rational_log_approx(z, 3, 3), exact);
  CHECK(e33 < e11);
  CHECK_THROWS_AS(rational_log_approx(diag({1, 0}), 3, 3), Error);
}

}
