#pragma once

#include <cmath>
#include <optional>

namespace mevlab::detail {

inline constexpr int kMaxBisection = 200;
inline constexpr int kMaxBracketSteps = 2100;

// Root of a non-increasing function g on (0, inf). Points where g is NaN are
// treated as lying right of the root, which covers curves whose domain is
// bounded above. Returns the largest x found with g(x) >= 0.
template <class G>
std::optional<double> bisect_decreasing(G&& g, double x0) {
  if (!(x0 > 0.0) || !std::isfinite(x0)) x0 = 1.0;
  auto left = [&](double x) {
    double v = g(x);
    return !std::isnan(v) && v >= 0.0;
  };

  double lo = x0;
  double hi = x0;
  if (left(x0)) {
    int steps = 0;
    do {
      lo = hi;
      hi *= 2.0;
      if (++steps > kMaxBracketSteps || !std::isfinite(hi)) return std::nullopt;
    } while (left(hi));
  } else {
    int steps = 0;
    do {
      hi = lo;
      lo *= 0.5;
      if (++steps > kMaxBracketSteps || !(lo > 0.0)) return std::nullopt;
    } while (!left(lo));
  }

  for (int i = 0; i < kMaxBisection; ++i) {
    double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    if (left(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  // Pick the endpoint with the smaller residual when both are usable.
  double glo = g(lo);
  double ghi = g(hi);
  if (!std::isnan(ghi) && std::fabs(ghi) < std::fabs(glo)) return hi;
  return lo;
}

}  // namespace mevlab::detail
