#include "ecdiv/truncation.hpp"

#include <cmath>
#include <limits>

#include "ecdiv/error.hpp"

namespace ecdiv {

TruncationCertificate bs_truncation_bound(double gamma1, double gamma2, double budget_e, Index cutoff) {
  if (!(gamma1 > 0.0) || !(gamma2 > 0.0)) throw Error(ErrorKind::invalid_parameter, "truncation bound needs gamma > 0");
  if (!(budget_e >= 0.0)) throw Error(ErrorKind::invalid_parameter, "truncation bound needs E >= 0");
  if (cutoff < 1) throw Error(ErrorKind::invalid_dimension, "truncation bound needs cutoff >= 1");
  TruncationCertificate c;
  c.cutoff = cutoff;
  c.budget_e = budget_e;
  c.kl_pq = gamma1 == gamma2 ? 0.0 : classical_kl_wrapped_normal(gamma1, gamma2);
  c.bound = 2.0 * budget_e / static_cast<double>(cutoff + 1) * c.kl_pq;
  return c;
}

TruncationCertificate certify_bs(const ChannelModel& n, const ChannelModel& m, double budget_e,
                                 const SolveOptions& opts) {
  if (n.cutoff != m.cutoff) throw Error(ErrorKind::invalid_dimension, "channel cutoffs differ");
  TruncationCertificate c;
  if (n.kind == ChannelKind::dephasing && m.kind == ChannelKind::dephasing) {
    c = bs_truncation_bound(n.gamma, m.gamma, budget_e, n.cutoff);
  } else {
    c.cutoff = n.cutoff;
    c.budget_e = budget_e;
    c.kl_pq = std::numeric_limits<double>::quiet_NaN();
    c.bound = std::numeric_limits<double>::infinity();
    c.kind = Certification::empirical_only;
  }
  const auto jn = choi(n);
  const auto jm = choi(m);
  c.truncated_value = ec_bs_channel(jn, jm, photon_budget(n.dim(), budget_e), opts).value;
  return c;
}

TruncationSweep truncation_sweep(const ChannelModel& n, const ChannelModel& m, double budget_e,
                                 const std::vector<Index>& cutoffs, const std::vector<Method>& methods,
                                 const MethodParameters& params, const SolveOptions& opts, double threshold,
                                 double monotone_tol) {
  if (cutoffs.empty() || methods.empty()) throw Error(ErrorKind::invalid_input, "truncation sweep needs cutoffs and methods");
  for (std::size_t i = 1; i < cutoffs.size(); ++i)
    if (cutoffs[i] <= cutoffs[i - 1]) throw Error(ErrorKind::invalid_input, "truncation cutoffs must be ascending");

  TruncationSweep sweep;
  sweep.cutoffs = cutoffs;
  sweep.threshold = threshold;
  for (Method meth : methods) sweep.series.push_back({meth, {}, std::nullopt, false});

  for (Index cut : cutoffs) {
    ChannelModel a = n, b = m;
    a.cutoff = b.cutoff = cut;
    const auto res = evaluate_methods(methods, choi(a), choi(b), photon_budget(a.dim(), budget_e), params, opts);
    for (std::size_t i = 0; i < methods.size(); ++i) sweep.series[i].values.push_back(res[i]);
  }

  analyze_stability(sweep, monotone_tol);
  return sweep;
}

void analyze_stability(TruncationSweep& sweep, double monotone_tol) {
  for (auto& s : sweep.series) {
    // first_stable is the earliest cutoff after which every change stays small
    for (std::size_t i = s.values.size(); i-- > 1;) {
      const double d = s.values[i].value - s.values[i - 1].value;
      if (!(std::abs(d) < sweep.threshold)) break;
      s.first_stable = sweep.cutoffs[i];
    }
    for (std::size_t i = 1; i < s.values.size(); ++i)
      if (s.values[i].value - s.values[i - 1].value < -monotone_tol) s.non_monotone = true;
  }
}

}  // namespace ecdiv
