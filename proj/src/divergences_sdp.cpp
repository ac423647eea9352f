#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>

#include "ecdiv/divergences.hpp"
#include "ecdiv/matfunc.hpp"

namespace ecdiv {
namespace {

using conic::AffineExpr;
using conic::ConicProgram;
using conic::LinearForm;

constexpr double kInf = std::numeric_limits<double>::infinity();

DivergenceResult infinite_result(Method m, const MethodParameters& params) {
  DivergenceResult r;
  r.value = kInf;
  r.status = ResultStatus::infinite;
  r.method = m;
  r.params = params;
  return r;
}

AffineExpr constant(const Eigen::MatrixXd& m) { return AffineExpr::constant(m); }

std::string block_name(const std::string& base, std::size_t g, int i = -1) {
  std::string s = base + "_g" + std::to_string(g);
  if (i >= 0) s += "_" + std::to_string(i);
  return s;
}

ResultStatus map_status(conic::Status s) {
  switch (s) {
    case conic::Status::optimal: return ResultStatus::optimal;
    case conic::Status::near_optimal: return ResultStatus::near_optimal;
    case conic::Status::infeasible: return ResultStatus::infeasible;
    case conic::Status::unbounded: return ResultStatus::unbounded;
    case conic::Status::numerical_failure: return ResultStatus::numerical_failure;
  }
  return ResultStatus::numerical_failure;
}

void dump(const ConicProgram& p, const SolveOptions& opts, Method m) {
  if (opts.dump_dir.empty()) return;
  std::filesystem::create_directories(opts.dump_dir);
  const auto path = std::filesystem::path(opts.dump_dir) / (opts.tag + "_" + to_string(m) + ".dat-s");
  std::ofstream os(path);
  if (!os) throw Error(ErrorKind::invalid_input, "cannot write " + path.string());
  conic::write_sdpa(p, os);
}

DivergenceResult run(const ConicProgram& p, const SolveOptions& opts, Method m, const MethodParameters& params,
                     const Reduction* red, const ProbeVariables* pv, const std::function<double(double)>& transform) {
  dump(p, opts, m);
  const auto sol = conic::solve(p, opts.tolerance, opts.backend);
  DivergenceResult r;
  r.method = m;
  r.params = params;
  r.status = map_status(sol.status);
  r.solver_gap = sol.solver_gap;
  if (!sol.usable()) {
    r.value = std::numeric_limits<double>::quiet_NaN();
    return r;
  }
  r.value = transform(sol.objective_value);
  if (red && pv) {
    Eigen::VectorXd coords(red->num_coords());
    for (Index k = 0; k < coords.size(); ++k) coords(k) = sol.y(pv->coord_vars[k]);
    r.probe = red->probe_populations(coords);
  }
  return r;
}

double identity(double v) { return v; }

DivergenceResult ratio_program(const Reduction& red, const SolveOptions& opts, bool upper) {
  ConicProgram p;
  const auto v = p.add_scalar(upper ? "lambda" : "mu");
  for (std::size_t g = 0; g < red.blocks.size(); ++g) {
    const AffineExpr scaled = AffineExpr::scaled_variable(v.index, red.blocks[g].jm);
    if (upper)
      p.add_psd(scaled - red.blocks[g].jn, block_name("dmax", g));
    else
      p.add_psd(constant(red.blocks[g].jn) - scaled, block_name("dmin", g));
  }
  if (upper)
    p.minimize(p.expr(v));
  else
    p.maximize(p.expr(v));
  auto r = run(p, opts, Method::dmax, {}, nullptr, nullptr, identity);
  if (!upper && r.ok()) r.value = std::max(0.0, r.value);
  return r;
}

// lambda (inflated slightly) and mu (deflated slightly) bracketing every
// generalized eigenvalue of the reduced pair.
bool ratio_bounds(const Reduction& red, const SolveOptions& opts, double& mu, double& lambda) {
  SolveOptions inner = opts;
  inner.dump_dir.clear();
  const auto hi = ratio_program(red, inner, true);
  const auto lo = ratio_program(red, inner, false);
  if (!hi.ok() || !lo.ok()) return false;
  lambda = hi.value * (1.0 + 1e-9);
  mu = std::min(lambda, lo.value * (1.0 - 1e-6));
  return true;
}

}  // namespace

std::vector<double> sqrt_uniform_knots(double mu, double lambda, int r) {
  if (r < 1) throw Error(ErrorKind::invalid_parameter, "knot count r must be >= 1");
  if (!(mu >= 0.0 && lambda >= mu)) throw Error(ErrorKind::invalid_parameter, "knots need 0 <= mu <= lambda");
  std::vector<double> t(r + 1);
  const double a = std::sqrt(mu), b = std::sqrt(lambda);
  for (int k = 0; k <= r; ++k) {
    const double s = a + (b - a) * double(k) / double(r);
    t[k] = s * s;
  }
  t[r] = lambda;
  return t;
}

DivergenceResult dmax_channel(const ChoiMatrix& jn, const ChoiMatrix& jm, const SolveOptions& opts) {
  const Reduction red = reduce_unconstrained(jn, jm);
  if (red.infinite) return infinite_result(Method::dmax, {});
  return ratio_program(red, opts, true);
}

DivergenceResult dmin_ratio_channel(const ChoiMatrix& jn, const ChoiMatrix& jm, const SolveOptions& opts) {
  return ratio_program(reduce_unconstrained(jn, jm), opts, false);
}

DivergenceResult ec_channel_re_lower(const ChoiMatrix& jn, const ChoiMatrix& jm, const EnergyBudget& budget, int r,
                                     const SolveOptions& opts) {
  MethodParameters params;
  params.r = r;
  const Reduction red = reduce(jn, jm, budget, opts.mode);
  if (red.infinite) return infinite_result(Method::re_lower, params);
  double mu = 0.0, lambda = 1.0;
  if (!ratio_bounds(red, opts, mu, lambda)) return DivergenceResult{kInf, {}, ResultStatus::numerical_failure, Method::re_lower, params, 0.0};
  const auto t = sqrt_uniform_knots(mu, lambda, r);

  ConicProgram p;
  const ProbeVariables pv = add_probe(p, red, budget);
  LinearForm obj(std::log(lambda) + 1.0 - lambda);
  for (std::size_t g = 0; g < red.blocks.size(); ++g) {
    const auto& blk = red.blocks[g];
    obj += red.trace_scale * conic::trace_product(blk.jn - blk.jm, pv.block_exprs[g]);
    for (int k = 0; k < r; ++k) {
      if (!(t[k] > 0.0) || !(t[k + 1] > t[k])) continue;
      const double alpha = std::log(t[k] / t[k + 1]), beta = t[k + 1] - t[k];
      const auto q = p.add_symmetric(block_name("Q", g, k), blk.dim(), true);
      p.add_psd(pv.block_exprs[g] - p.expr(q), block_name("X-Q", g, k));
      obj += red.trace_scale * conic::trace_product(alpha * blk.jn + beta * blk.jm, p.expr(q));
    }
  }
  p.maximize(obj);
  return run(p, opts, Method::re_lower, params, &red, &pv, identity);
}

DivergenceResult ec_channel_re_upper(const ChoiMatrix& jn, const ChoiMatrix& jm, const EnergyBudget& budget, int r,
                                     const SolveOptions& opts) {
  MethodParameters params;
  params.r = r;
  const Reduction red = reduce(jn, jm, budget, opts.mode);
  if (red.infinite) return infinite_result(Method::re_upper, params);
  double mu = 0.0, lambda = 1.0;
  if (!ratio_bounds(red, opts, mu, lambda)) return DivergenceResult{kInf, {}, ResultStatus::numerical_failure, Method::re_upper, params, 0.0};
  const auto t = sqrt_uniform_knots(mu, lambda, r);

  // Chord interpolant of phi(x) = lambda - x - x ln lambda + x ln x on the knots,
  // written as sum_k c_k (t_{k+1} - x)_+ with c_k >= 0.
  std::vector<double> c;
  if (t[r] > t[0] * (1.0 + 1e-12)) {
    auto phi = [lambda](double x) { return lambda - x - x * std::log(lambda) + (x > 0.0 ? x * std::log(x) : 0.0); };
    std::vector<double> slope(r);
    for (int k = 0; k < r; ++k) slope[k] = (phi(t[k + 1]) - phi(t[k])) / (t[k + 1] - t[k]);
    for (int k = 0; k + 1 < r; ++k) c.push_back(std::max(0.0, slope[k + 1] - slope[k]));
    c.push_back(std::max(0.0, -slope[r - 1]));
  }

  ConicProgram p;
  const auto x = p.add_scalar("x");
  const auto y = p.add_scalar("y", true);
  std::vector<AffineExpr> total;
  for (std::size_t g = 0; g < red.blocks.size(); ++g) {
    const auto& blk = red.blocks[g];
    const auto n0 = p.add_symmetric(block_name("N", g, 0), blk.dim());
    p.add_psd(p.expr(n0) - (blk.jn - blk.jm), block_name("N0", g));
    AffineExpr sum = p.expr(n0);
    for (std::size_t k = 0; k < c.size(); ++k) {
      if (c[k] == 0.0) continue;
      const auto nk = p.add_symmetric(block_name("N", g, int(k) + 1), blk.dim(), true);
      p.add_psd(p.expr(nk) - (c[k] * t[k + 1] * blk.jm - c[k] * blk.jn), block_name("Nk", g, int(k) + 1));
      sum += p.expr(nk);
    }
    total.push_back(std::move(sum));
  }
  add_reference_bound(p, red, budget, p.expr(x), p.expr(y), probe_adjoint(red, total), "xI + yH >= Tr_B N");
  p.minimize(p.expr(x) + budget.budget * p.expr(y) + (std::log(lambda) + 1.0 - lambda));
  auto res = run(p, opts, Method::re_upper, params, nullptr, nullptr, identity);
  return res;
}

ReBounds ec_channel_re_bounds(const ChoiMatrix& jn, const ChoiMatrix& jm, const EnergyBudget& budget, int r,
                              const SolveOptions& opts, double tol) {
  ReBounds b;
  b.lower = ec_channel_re_lower(jn, jm, budget, r, opts);
  b.upper = ec_channel_re_upper(jn, jm, budget, r, opts);
  b.bs = ec_bs_channel(jn, jm, budget, opts);
  if (b.lower.infinite() || b.upper.infinite()) {
    b.sandwich_ok = b.lower.infinite() && b.upper.infinite();
    return b;
  }
  b.sandwich_ok = b.lower.ok() && b.upper.ok() && b.bs.ok() && b.lower.value <= b.upper.value + tol &&
                  b.upper.value <= b.bs.value + tol;
  if (!b.sandwich_ok) {
    b.lower.status = ResultStatus::schedule_rejected;
    b.upper.status = ResultStatus::schedule_rejected;
  }
  return b;
}

DivergenceResult ec_measured_re_channel(const ChoiMatrix& jn, const ChoiMatrix& jm, const EnergyBudget& budget,
                                        int m, int k, const SolveOptions& opts) {
  if (m < 1 || k < 0) throw Error(ErrorKind::invalid_parameter, "measured RE needs m >= 1 and k >= 0");
  MethodParameters params;
  params.m = m;
  params.k = k;
  const Reduction red = reduce(jn, jm, budget, opts.mode);
  if (red.infinite) return infinite_result(Method::measured_re, params);
  const auto rule = gauss_legendre(m);

  ConicProgram p;
  const ProbeVariables pv = add_probe(p, red, budget);
  LinearForm obj(1.0);
  for (std::size_t g = 0; g < red.blocks.size(); ++g) {
    const auto& blk = red.blocks[g];
    const Index s = blk.dim();
    const AffineExpr& x = pv.block_exprs[g];
    const auto omega = p.add_symmetric(block_name("Omega", g), s, true);
    AffineExpr z = p.expr(omega);
    for (int i = 1; i <= k; ++i) {
      const auto zi = p.add_symmetric(block_name("Z", g, i), s);
      p.add_psd_block_2x2(z, p.expr(zi), x, block_name("sqrt-cascade", g, i));
      z = p.expr(zi);
    }
    AffineExpr theta(s, s);
    for (int j = 0; j < m; ++j) {
      const double tj = rule.nodes[j];
      const auto tv = p.add_symmetric(block_name("T", g, j), s);
      const AffineExpr te = p.expr(tv);
      p.add_psd_block_2x2(z - x - te, -std::sqrt(tj) * te, x - tj * te, block_name("node", g, j));
      theta += std::ldexp(rule.weights[j], k) * te;
    }
    obj += red.trace_scale * (conic::trace_product(blk.jn, theta) - conic::trace_product(blk.jm, p.expr(omega)));
  }
  p.maximize(obj);
  return run(p, opts, Method::measured_re, params, &red, &pv, identity);
}

DivergenceResult grd_sdp_unconstrained(const ChoiMatrix& jn, const ChoiMatrix& jm, int ell, const SolveOptions& opts) {
  if (ell < 0 || ell > 30) throw Error(ErrorKind::invalid_parameter, "grd_sdp_unconstrained: ell must lie in [0, 30]");
  MethodParameters params;
  params.ell = ell;
  const Reduction red = reduce_unconstrained(jn, jm);
  if (red.infinite) return infinite_result(Method::grd_sdp, params);
  ConicProgram p;
  const auto y = p.add_scalar("y");
  std::vector<AffineExpr> ls;
  for (std::size_t g = 0; g < red.blocks.size(); ++g) {
    const auto& blk = red.blocks[g];
    AffineExpr prev = constant(blk.jm);
    for (int i = 1; i <= ell; ++i) {
      const auto ni = p.add_symmetric(block_name("N", g, i), blk.dim());
      p.add_psd_block_2x2(constant(blk.jn), p.expr(ni), prev, block_name("mean-cascade", g, i));
      prev = p.expr(ni);
    }
    const auto l = p.add_symmetric(block_name("L", g), blk.dim());
    p.add_psd_block_2x2(p.expr(l), constant(blk.jn), prev, block_name("L-block", g));
    ls.push_back(p.expr(l));
  }
  add_reference_bound(p, red, photon_budget(red.dim_r, 0.0), p.expr(y), LinearForm(0.0), probe_adjoint(red, ls),
                      "yI >= Tr_B L");
  p.minimize(p.expr(y));
  return run(p, opts, Method::grd_sdp, params, nullptr, nullptr, [ell](double v) { return std::ldexp(std::log(v), ell); });
}

DivergenceResult grd_sdp_dual_lower(const ChoiMatrix& jn, const ChoiMatrix& jm, const EnergyBudget& budget, int ell,
                                    const SolveOptions& opts) {
  if (ell < 0 || ell > 30) throw Error(ErrorKind::invalid_parameter, "grd_sdp_dual_lower: ell must lie in [0, 30]");
  MethodParameters params;
  params.ell = ell;
  const Reduction red = reduce(jn, jm, budget, opts.mode);
  if (red.infinite) return infinite_result(Method::grd_dual_lower, params);
  ConicProgram p;
  const ProbeVariables pv = add_probe(p, red, budget);
  LinearForm obj;
  for (std::size_t g = 0; g < red.blocks.size(); ++g) {
    const auto& blk = red.blocks[g];
    const Index s = blk.dim();
    const auto z0 = p.add_symmetric(block_name("Z", g, 0), s);
    obj -= red.trace_scale * conic::trace_product(blk.jm, p.expr(z0));
    AffineExpr z = p.expr(z0);
    for (int i = 0; i <= ell; ++i) {
      const auto w = p.add_matrix(block_name("W", g, i), s, s);
      const AffineExpr we = p.expr(w);
      AffineExpr yi;
      if (i < ell) {
        const auto yv = p.add_symmetric(block_name("Y", g, i), s);
        yi = p.expr(yv);
        obj -= red.trace_scale * conic::trace_product(blk.jn, yi);
      } else {
        yi = pv.block_exprs[g];
        obj += 2.0 * red.trace_scale * conic::trace_product(blk.jn, we);
      }
      p.add_psd_block_2x2(yi, we.transpose(), z, block_name("dual-block", g, i));
      z = we + we.transpose();
    }
  }
  p.maximize(obj);
  return run(p, opts, Method::grd_dual_lower, params, &red, &pv, [ell](double v) { return std::ldexp(std::log(v), ell); });
}

}  // namespace ecdiv
