#include <cmath>

#include "doctest.h"
#include "ecdiv/divergences.hpp"
#include "ecdiv/matfunc.hpp"
#include "ecdiv/oracle.hpp"
#include "support.hpp"

using namespace ecdiv;
using ecdiv::test::diag;
using ecdiv::test::max_abs_diff;

TEST_SUITE("oracle") {

TEST_CASE("seeded reproducibility") {
  oracle::RandomInstance a(7), b(7), c(8);
  const auto sa = a.state(4), sb = b.state(4), sc = c.state(4);
  CHECK(sa.matrix() == sb.matrix());
  CHECK(sa.matrix() != sc.matrix());
  CHECK(a.uniform(0, 1) == b.uniform(0, 1));
  const auto u = a.unitary(5);
  CHECK((u.adjoint() * u - Eigen::MatrixXcd::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-12);
  const auto pd = a.positive_definite(4, 0.5, 1.5);
  CHECK(pd.min_eigenvalue() >= 0.5 - 1e-12);
  const auto p = a.spectrum_with_energy(6, 0.3);
  CHECK(std::abs(p.sum() - 1.0) < 1e-12);
  CHECK(Eigen::VectorXd::LinSpaced(6, 0, 5).dot(p) <= 0.3 + 1e-12);
}

TEST_CASE("grid search over probe spectra") {
  const auto flat = oracle::grid_probe_maximize([](const Eigen::VectorXd&) { return 0.25; }, 1.0, 4, 10);
  CHECK(flat.value == 0.25);

  // budget above the top level: plain maximum of the diagonal
  const Eigen::VectorXd c = (Eigen::VectorXd(4) << 0.2, 0.9, 0.4, 0.7).finished();
  const auto slack = oracle::grid_probe_maximize([&](const Eigen::VectorXd& p) { return c.dot(p); }, 10.0, 4, 10);
  CHECK(std::abs(slack.value - 0.9) < 1e-15);

  // against the closed-form GRD at gamma 0.1 / 0.4, E = 0.5, N = 4
  const auto jn = dephasing_choi(0.1, 4), jm = dephasing_choi(0.4, 4);
  const int ell = 8;
  const auto cm = partial_trace_b(weighted_geometric_mean(jn.matrix, jm.matrix, -std::ldexp(1.0, -ell)), jn.index);
  const auto grid = oracle::grid_probe_maximize(
      [&](const Eigen::VectorXd& p) {
        double s = 0;
        for (Index n = 0; n < p.size(); ++n) s += p(n) * cm(n, n).real();
        return s;
      },
      0.5, 5, 50);
  const double grid_value = std::ldexp(std::log(grid.value), ell);
  const auto fast = ec_grd_channel(jn, jm, photon_budget(5, 0.5), ell);
  CHECK(grid_value <= fast.value + 1e-9);
  CHECK(fast.value - grid_value < 0.02);
}

TEST_CASE("measurement sampling") {
  oracle::RandomInstance inst(61);
  const auto rho = inst.state(3);
  CHECK(oracle::measurement_bruteforce_mre(rho, rho, 200, 1) < 1e-12);

  const auto p = diag({0.7, 0.3}), q = diag({0.2, 0.8});
  const double kl = 0.7 * std::log(3.5) + 0.3 * std::log(0.375);
  const double few = oracle::measurement_bruteforce_mre(p, q, 10, 2);
  const double many = oracle::measurement_bruteforce_mre(p, q, 10000, 2);
  CHECK(few <= many);
  CHECK(many <= kl + 1e-12);
  CHECK(kl - many < 1e-3);

  for (int trial = 0; trial < 10; ++trial) {
    const auto a = inst.state(2), b = inst.state(2);
    CHECK(oracle::measurement_bruteforce_mre(a, b, 10000, 100 + trial) <= state_measured_re(a, b).value + 1e-6);
  }
}

TEST_CASE("channel action from the Choi matrix") {
  oracle::RandomInstance inst(62);
  const auto rho = inst.state(2 * 4);  // R of dimension 2, A of dimension 4
  CHECK(max_abs_diff(oracle::choi_contraction_apply(identity_choi(3), rho, 2), rho) < 1e-14);

  // a single-system superposition, dephased through the Choi and entrywise
  Eigen::VectorXcd v(4);
  v << 0.6, cdouble(0.0, 0.48), 0.48, cdouble(0.28, 0.3);
  v.normalize();
  const HermitianMatrix pure(Eigen::MatrixXcd(v * v.adjoint()));
  CHECK(max_abs_diff(oracle::choi_contraction_apply(dephasing_choi(0.3, 3), pure, 1), apply_dephasing(0.3, pure)) < 1e-10);

  const auto full = oracle::choi_contraction_apply(dephasing_choi(1e6, 3), pure, 1);
  CHECK(max_abs_diff(full, HermitianMatrix::diagonal(pure.matrix().diagonal().real())) < 1e-12);
  CHECK_THROWS_AS(oracle::choi_contraction_apply(identity_choi(3), rho, 3), Error);
}

}
