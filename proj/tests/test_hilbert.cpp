#include "doctest.h"
#include "ecdiv/channels.hpp"
#include "ecdiv/hilbert.hpp"
#include "ecdiv/oracle.hpp"
#include "support.hpp"

using namespace ecdiv;
using ecdiv::test::diag;
using ecdiv::test::max_abs_diff;

TEST_SUITE("hilbert") {

TEST_CASE("construction symmetrizes") {
  Eigen::MatrixXcd m(2, 2);
  m << 1.0, cdouble(2.0, 1.0), cdouble(0.0, 0.0), 3.0;
  const HermitianMatrix h(m);
  CHECK(h(0, 1) == cdouble(1.0, 0.5));
  CHECK(h(1, 0) == cdouble(1.0, -0.5));
  CHECK_THROWS_AS(HermitianMatrix(Eigen::MatrixXcd(2, 3)), Error);
}

TEST_CASE("number operator") {
  CHECK(number_operator(1).matrix() == Eigen::MatrixXcd::Zero(1, 1));
  CHECK(max_abs_diff(number_operator(3), diag({0, 1, 2})) == 0.0);
  const auto h9 = number_operator(9);
  for (Index n = 0; n < 9; ++n) CHECK(h9(n, n).real() == double(n));
  CHECK_THROWS_AS(number_operator(0), Error);
}

TEST_CASE("energy budget validates its hamiltonian") {
  CHECK_NOTHROW(EnergyBudget(number_operator(4), 1.0));
  CHECK_THROWS_AS(EnergyBudget(number_operator(4), -1.0), Error);
  CHECK_THROWS_AS(EnergyBudget(diag({0, 2, 1}), 1.0), Error);
}

TEST_CASE("tensor") {
  CHECK(max_abs_diff(tensor(HermitianMatrix::identity(2), HermitianMatrix::identity(2)),
                     HermitianMatrix::identity(4)) == 0.0);
  CHECK(max_abs_diff(tensor(diag({1, 0}), diag({0, 1})), diag({0, 1, 0, 0})) == 0.0);

  oracle::RandomInstance inst(11);
  const auto rho = inst.state(3);
  const auto t = tensor(rho, HermitianMatrix::identity(3));
  const BipartiteIndex idx(3, 3);
  for (Index r = 0; r < 3; ++r)
    for (Index r2 = 0; r2 < 3; ++r2)
      for (Index b = 0; b < 3; ++b)
        for (Index b2 = 0; b2 < 3; ++b2)
          CHECK(std::abs(t(idx.flat(r, b), idx.flat(r2, b2)) - (b == b2 ? rho(r, r2) : 0.0)) < 1e-15);
}

TEST_CASE("partial traces") {
  oracle::RandomInstance inst(12);
  const auto rho = inst.state(3);
  const auto sigma = inst.state(2);
  const auto rs = tensor(rho, sigma);
  CHECK(max_abs_diff(partial_trace_b(rs, {3, 2}), rho) < 1e-12);
  CHECK(max_abs_diff(partial_trace_r(rs, {3, 2}), sigma) < 1e-12);

  CHECK(max_abs_diff(partial_trace_b(HermitianMatrix::identity(9), {3, 3}), 3.0 * HermitianMatrix::identity(3)) == 0.0);
  CHECK(max_abs_diff(partial_trace_r(HermitianMatrix::identity(6), {2, 3}), 2.0 * HermitianMatrix::identity(3)) == 0.0);
  CHECK_THROWS_AS(partial_trace_b(HermitianMatrix::identity(6), {2, 2}), Error);
  CHECK_THROWS_AS(partial_trace_r(HermitianMatrix::identity(6), {4, 2}), Error);

  const auto j = dephasing_choi(0.3, 5);
  CHECK(max_abs_diff(partial_trace_b(j.matrix, j.index), HermitianMatrix::identity(6)) < 1e-12);

  // random 4x4 over 2x2: Tr_R is the sum of the two diagonal blocks
  const HermitianMatrix m(inst.ginibre(4, 4));
  const Eigen::MatrixXcd blocks = m.matrix().block(0, 0, 2, 2) + m.matrix().block(2, 2, 2, 2);
  CHECK(max_abs_diff(partial_trace_r(m, {2, 2}).matrix(), blocks) < 1e-15);
  CHECK(std::abs(partial_trace_b(m, {2, 2}).trace() - m.trace()) < 1e-12);
}

TEST_CASE("purification of a diagonal spectrum") {
  const std::vector<double> one{1.0};
  CHECK(max_abs_diff(purify_diagonal(one), diag({1})) < 1e-15);

  const std::vector<double> half{0.5, 0.5};
  const auto bell = purify_diagonal(half);
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(4);
  v(0) = v(3) = std::sqrt(0.5);
  CHECK(max_abs_diff(bell.matrix(), v * v.adjoint()) < 1e-15);

  const std::vector<double> p{0.77, 0.0, 0.22, 0.01};
  const auto psi = purify_diagonal(p);
  const BipartiteIndex idx(4, 4);
  CHECK(std::abs(psi(idx.flat(0, 0), idx.flat(2, 2)).real() - std::sqrt(0.77 * 0.22)) < 1e-15);
  CHECK(std::abs(psi.trace() - 1.0) < 1e-12);
  CHECK(max_abs_diff(partial_trace_b(psi, idx), diag({0.77, 0.0, 0.22, 0.01})) < 1e-12);
  CHECK(max_abs_diff(partial_trace_r(psi, idx), diag({0.77, 0.0, 0.22, 0.01})) < 1e-12);

  const std::vector<double> bad{1.2, -0.2};
  CHECK_THROWS_AS(purify_diagonal(bad), Error);
  const std::vector<double> unnormalized{0.5, 0.4};
  CHECK_THROWS_AS(purify_diagonal(unnormalized), Error);
}

}
