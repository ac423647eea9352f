#include <chrono>
#include <cmath>
#include <limits>
#include <optional>

#include "ecdiv/divergences.hpp"

namespace ecdiv {

std::vector<DivergenceResult> evaluate_methods(const std::vector<Method>& methods, const ChoiMatrix& jn,
                                               const ChoiMatrix& jm, const EnergyBudget& budget,
                                               const MethodParameters& params, const SolveOptions& opts,
                                               std::vector<double>* wall_ms) {
  std::optional<ReBounds> bounds;
  auto re_bounds = [&]() -> const ReBounds& {
    if (!bounds) bounds = ec_channel_re_bounds(jn, jm, budget, params.r, opts);
    return *bounds;
  };

  std::vector<DivergenceResult> out;
  out.reserve(methods.size());
  if (wall_ms) wall_ms->clear();
  for (Method m : methods) {
    const auto t0 = std::chrono::steady_clock::now();
    DivergenceResult res;
    switch (m) {
      case Method::measured_re: res = ec_measured_re_channel(jn, jm, budget, params.m, params.k, opts); break;
      case Method::re_lower: res = re_bounds().lower; break;
      case Method::re_upper: res = re_bounds().upper; break;
      case Method::grd_direct: res = ec_grd_channel(jn, jm, budget, params.ell, opts); break;
      case Method::grd_sdp: res = grd_sdp_unconstrained(jn, jm, params.ell, opts); break;
      case Method::grd_dual_lower: res = grd_sdp_dual_lower(jn, jm, budget, params.ell, opts); break;
      case Method::bs_closed_form: res = bounds ? bounds->bs : ec_bs_channel(jn, jm, budget, opts); break;
      case Method::dmax:
        res = dmax_channel(jn, jm, opts);
        res.value = res.infinite() ? std::numeric_limits<double>::infinity() : std::log(res.value);
        break;
    }
    if (wall_ms)
      wall_ms->push_back(std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
    res.method = m;
    res.params = params;
    out.push_back(std::move(res));
  }
  return out;
}

}  // namespace ecdiv
