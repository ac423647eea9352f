#include <cmath>
#include <functional>
#include <limits>

#include "ecdiv/divergences.hpp"
#include "ecdiv/matfunc.hpp"

namespace ecdiv {
namespace {

constexpr double kBlockFloor = 1e-13;

DivergenceResult infinite_result(Method m, const MethodParameters& params) {
  DivergenceResult r;
  r.value = std::numeric_limits<double>::infinity();
  r.status = ResultStatus::infinite;
  r.method = m;
  r.params = params;
  return r;
}

Eigen::VectorXd active_energies(const Reduction& red, const EnergyBudget& budget) {
  Eigen::VectorXd h(Index(red.levels.size()));
  for (Index i = 0; i < h.size(); ++i) h(i) = budget.level(red.levels[i]);
  return h;
}

using BlockFunction = std::function<Eigen::MatrixXd(const SymmetricMatrix&, const SymmetricMatrix&)>;

// max over admissible probes of the linear functional rho -> Tr[rho Tr_B F(J^N, J^M)].
DivergenceResult maximize_closed_form(const ChoiMatrix& jn, const ChoiMatrix& jm, const EnergyBudget& budget,
                                      const SolveOptions& opts, Method method, const MethodParameters& params,
                                      const BlockFunction& f, const std::function<double(double)>& transform) {
  const Reduction red = reduce(jn, jm, budget, opts.mode);
  if (red.infinite) return infinite_result(method, params);
  std::vector<Eigen::MatrixXd> fs;
  for (const auto& blk : red.blocks) fs.push_back(f(SymmetricMatrix(blk.jn), SymmetricMatrix(blk.jm)));
  const Eigen::VectorXd c = probe_functional(red, fs);

  DivergenceResult r;
  r.method = method;
  r.params = params;
  Eigen::VectorXd coords;
  double opt = 0.0;
  if (red.mode == ProbeMode::fock_diagonal) {
    const auto lp = maximize_on_energy_simplex(c, active_energies(red, budget), budget.budget);
    opt = lp.value;
    coords = lp.p;
    r.status = ResultStatus::optimal;
  } else {
    conic::ConicProgram p;
    const ProbeVariables pv = add_probe(p, red, budget);
    conic::LinearForm obj;
    for (Index k = 0; k < c.size(); ++k) obj += conic::LinearForm::variable(pv.coord_vars[k], c(k));
    p.maximize(obj);
    const auto sol = conic::solve(p, opts.tolerance, opts.backend);
    if (!sol.usable()) {
      r.status = ResultStatus::numerical_failure;
      return r;
    }
    r.status = sol.status == conic::Status::optimal ? ResultStatus::optimal : ResultStatus::near_optimal;
    r.solver_gap = sol.solver_gap;
    opt = sol.objective_value;
    coords.resize(c.size());
    for (Index k = 0; k < c.size(); ++k) coords(k) = sol.y(pv.coord_vars[k]);
  }
  r.value = transform(opt);
  r.probe = red.probe_populations(coords);
  return r;
}

}  // namespace

DivergenceResult ec_grd_channel(const ChoiMatrix& jn, const ChoiMatrix& jm, const EnergyBudget& budget, int ell,
                                const SolveOptions& opts) {
  if (ell < 0 || ell > 30) throw Error(ErrorKind::invalid_parameter, "ec_grd_channel: ell must lie in [0, 30]");
  MethodParameters params;
  params.ell = ell;
  const double t = -std::ldexp(1.0, -ell);
  return maximize_closed_form(
      jn, jm, budget, opts, Method::grd_direct, params,
      [t](const SymmetricMatrix& a, const SymmetricMatrix& b) {
        return weighted_geometric_mean(a, b, t, kBlockFloor).matrix();
      },
      [ell](double q) { return std::ldexp(std::log(q), ell); });
}

DivergenceResult ec_bs_channel(const ChoiMatrix& jn, const ChoiMatrix& jm, const EnergyBudget& budget,
                               const SolveOptions& opts) {
  return maximize_closed_form(
      jn, jm, budget, opts, Method::bs_closed_form, MethodParameters{},
      [](const SymmetricMatrix& a, const SymmetricMatrix& b) {
        // The reduction already compressed to supp J^M, so the support check cannot fail here.
        return operator_relative_entropy(a, b, kBlockFloor).value().matrix();
      },
      [](double v) { return v; });
}

}  // namespace ecdiv
