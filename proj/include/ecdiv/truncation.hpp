#pragma once

#include <optional>
#include <vector>

#include "ecdiv/channels.hpp"
#include "ecdiv/divergences.hpp"

namespace ecdiv {

enum class Certification { certified, empirical_only };

/// Interval [truncated_value, truncated_value + bound] for the untruncated
/// BS divergence of two dephasing channels.
struct TruncationCertificate {
  Index cutoff = 0;
  double budget_e = 0.0;
  double kl_pq = 0.0;
  double bound = 0.0;  // 2E/(N+1) kl_pq
  double truncated_value = 0.0;
  Certification kind = Certification::certified;

  double upper() const { return truncated_value + bound; }
};

/// Bound only; truncated_value is left at 0.
TruncationCertificate bs_truncation_bound(double gamma1, double gamma2, double budget_e, Index cutoff);

/// Bound plus ec_bs_channel at this cutoff. Loss-dephasing pairs carry no
/// analytic bound and come back as empirical_only with bound = +inf.
TruncationCertificate certify_bs(const ChannelModel& n, const ChannelModel& m, double budget_e,
                                 const SolveOptions& opts = {});

struct TruncationSeries {
  Method method;
  std::vector<DivergenceResult> values;  // one per cutoff
  std::optional<Index> first_stable;  // every change at and after this cutoff is below threshold
  bool non_monotone = false;             // some value drops by more than monotone_tol
};

struct TruncationSweep {
  std::vector<Index> cutoffs;
  std::vector<TruncationSeries> series;
  double threshold = 1e-3;
};

/// Evaluates each method at every cutoff. The channel cutoffs in n and m are
/// overridden. cutoffs must be ascending.
TruncationSweep truncation_sweep(const ChannelModel& n, const ChannelModel& m, double budget_e,
                                 const std::vector<Index>& cutoffs, const std::vector<Method>& methods,
                                 const MethodParameters& params, const SolveOptions& opts = {},
                                 double threshold = 1e-3, double monotone_tol = 1e-6);

/// Fills first_stable and non_monotone of every series from its values.
void analyze_stability(TruncationSweep& sweep, double monotone_tol = 1e-6);

}  // namespace ecdiv
