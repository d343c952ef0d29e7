#pragma once

#include <cmath>
#include <functional>

namespace dermkt {

/// Bracketing bisection for an increasing f with f(lo) <= 0 <= f(hi).
/// Stops when the bracket is narrower than `width` or after `max_iterations`.
template <typename F>
double bisect_increasing(F&& f, double lo, double hi, double width = 1e-10,
                         int max_iterations = 200) {
  for (int k = 0; k < max_iterations && hi - lo > width; ++k) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (f(mid) <= 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Adaptive Simpson quadrature of f on [a, b].
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tolerance = 1e-10, int max_depth = 48);

}  // namespace dermkt
