#pragma once

#include <functional>

namespace ecdiv {

struct IntegralEstimate {
  double value = 0.0;
  double error = 0.0;
  int intervals = 0;
};

/// Adaptive Gauss-Kronrod (7/15) integration of f over [a, b]. Intervals are
/// bisected until the summed error estimate is below abs_tol.
IntegralEstimate integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    double abs_tol = 1e-12, int max_intervals = 4096);

}  // namespace ecdiv
