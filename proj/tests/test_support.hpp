#pragma once

#include <cmath>
#include <vector>

#include "thumbside/touch.hpp"

namespace thumbside::testing {

/// Samples exactly on x = a + b*y + c*y^2 at the given ordinates, 10 ms apart.
inline SwipeTrace quadratic_trace(double a, double b, double c,
                                  const std::vector<double>& ys) {
  SwipeTrace out;
  double t = 0.0;
  for (double y : ys) {
    out.push_back({a + b * y + c * y * y, y, t});
    t += 10.0;
  }
  return out;
}

inline std::vector<double> range(double from, double to, double step) {
  std::vector<double> out;
  for (double y = from; y <= to + 1e-12; y += step) out.push_back(y);
  return out;
}

inline bool rel_close(double got, double want, double tol) {
  const double scale = std::max(std::abs(want), 1e-300);
  return std::abs(got - want) <= tol * scale;
}

}  // namespace thumbside::testing
