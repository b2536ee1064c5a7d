#include "thumbside/swipe_geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <utility>

namespace thumbside {

std::string_view to_string(Handedness h) {
  switch (h) {
    case Handedness::LeftThumb:
      return "left";
    case Handedness::RightThumb:
      return "right";
    case Handedness::Ambiguous:
      return "ambiguous";
  }
  return "ambiguous";
}

Handedness flip(Handedness h) {
  switch (h) {
    case Handedness::LeftThumb:
      return Handedness::RightThumb;
    case Handedness::RightThumb:
      return Handedness::LeftThumb;
    case Handedness::Ambiguous:
      break;
  }
  return Handedness::Ambiguous;
}

namespace {

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<Vec3, 3>;

// Gaussian elimination with partial pivoting on a 3x3 system.
bool solve3(Mat3 m, Vec3 rhs, Vec3& out) {
  for (int col = 0; col < 3; ++col) {
    int pivot = col;
    for (int row = col + 1; row < 3; ++row) {
      if (std::abs(m[row][col]) > std::abs(m[pivot][col])) pivot = row;
    }
    if (m[pivot][col] == 0.0) return false;
    std::swap(m[col], m[pivot]);
    std::swap(rhs[col], rhs[pivot]);
    for (int row = col + 1; row < 3; ++row) {
      const double f = m[row][col] / m[col][col];
      for (int k = col; k < 3; ++k) m[row][k] -= f * m[col][k];
      rhs[row] -= f * rhs[col];
    }
  }
  for (int row = 2; row >= 0; --row) {
    double acc = rhs[row];
    for (int k = row + 1; k < 3; ++k) acc -= m[row][k] * out[k];
    out[row] = acc / m[row][row];
  }
  return true;
}

}  // namespace

QuadraticFit fit_quadratic(std::span<const TouchSample> trace) {
  const std::size_t n = trace.size();
  if (n < kMinFitSamples) {
    throw GeometryError(GeometryError::Kind::DegenerateTrace,
                        "fit needs at least 5 samples, got " +
                            std::to_string(n));
  }

  // Pass 1: finiteness, means, y range, distinct-y count (capped at 3).
  double sum_x = 0.0;
  double sum_y = 0.0;
  double y_min = std::numeric_limits<double>::infinity();
  double y_max = -std::numeric_limits<double>::infinity();
  std::array<double, 2> seen_y{};
  int distinct_y = 0;
  for (const auto& s : trace) {
    if (!std::isfinite(s.x) || !std::isfinite(s.y)) {
      throw GeometryError(GeometryError::Kind::NonFiniteInput,
                          "trace contains a non-finite coordinate");
    }
    sum_x += s.x;
    sum_y += s.y;
    y_min = std::min(y_min, s.y);
    y_max = std::max(y_max, s.y);
    if (distinct_y < 3) {
      bool known = false;
      for (int i = 0; i < distinct_y; ++i) known = known || seen_y[i] == s.y;
      if (!known) {
        if (distinct_y < 2) seen_y[distinct_y] = s.y;
        ++distinct_y;
      }
    }
  }
  if (distinct_y < 3) {
    throw GeometryError(GeometryError::Kind::DegenerateTrace,
                        "fit needs at least 3 distinct y values");
  }

  const double inv_n = 1.0 / static_cast<double>(n);
  const double x_mean = sum_x * inv_n;
  const double y_center = sum_y * inv_n;
  const double y_scale = 0.5 * (y_max - y_min);
  const double inv_h = 1.0 / y_scale;

  // Pass 2: moments of u = (y - centre) / scale against d = x - mean(x).
  double su1 = 0.0, su2 = 0.0, su3 = 0.0, su4 = 0.0;
  double sd = 0.0, sdu = 0.0, sdu2 = 0.0, sdd = 0.0;
  for (const auto& s : trace) {
    const double u = (s.y - y_center) * inv_h;
    const double u2 = u * u;
    const double d = s.x - x_mean;
    su1 += u;
    su2 += u2;
    su3 += u2 * u;
    su4 += u2 * u2;
    sd += d;
    sdu += d * u;
    sdu2 += d * u2;
    sdd += d * d;
  }

  const Mat3 normal{{{static_cast<double>(n), su1, su2},
                     {su1, su2, su3},
                     {su2, su3, su4}}};
  Vec3 p{};
  if (!solve3(normal, {sd, sdu, sdu2}, p)) {
    throw GeometryError(GeometryError::Kind::DegenerateTrace,
                        "normal equations are singular");
  }

  // Pass 3: residuals in pixel units.
  double ss_res = 0.0;
  for (const auto& s : trace) {
    const double u = (s.y - y_center) * inv_h;
    const double r = (s.x - x_mean) - (p[0] + (p[1] + p[2] * u) * u);
    ss_res += r * r;
  }

  QuadraticFit fit;
  fit.c = p[2] * inv_h * inv_h;
  fit.b = p[1] * inv_h - 2.0 * fit.c * y_center;
  fit.a = x_mean + p[0] - p[1] * inv_h * y_center + fit.c * y_center * y_center;
  fit.n = n;
  fit.ss_res = ss_res;
  if (sdd == 0.0) {
    fit.r2 = ss_res == 0.0 ? 1.0 : 0.0;
  } else {
    fit.r2 = std::clamp(1.0 - ss_res / sdd, 0.0, 1.0);
  }
  if (!std::isfinite(fit.a) || !std::isfinite(fit.b) || !std::isfinite(fit.c)) {
    throw GeometryError(GeometryError::Kind::NonFiniteInput,
                        "fit produced non-finite coefficients");
  }
  return fit;
}

HandednessDecision classify_fit(const QuadraticFit& fit,
                                const ClassifierConfig& cfg) {
  HandednessDecision out;
  out.fit = fit;
  out.curvature_margin = std::abs(fit.c) - cfg.epsilon_c;
  if (fit.r2 < cfg.q_min) {
    out.label = Handedness::Ambiguous;
  } else if (fit.c < -cfg.epsilon_c) {
    out.label = Handedness::LeftThumb;
  } else if (fit.c > cfg.epsilon_c) {
    out.label = Handedness::RightThumb;
  } else {
    out.label = Handedness::Ambiguous;
  }
  return out;
}

SwipeTrace mirror_trace(std::span<const TouchSample> trace,
                        double screen_width) {
  SwipeTrace out;
  out.reserve(trace.size());
  for (const auto& s : trace) {
    if (!(s.x >= 0.0 && s.x <= screen_width)) {
      throw GeometryError(GeometryError::Kind::SampleOutOfBounds,
                          "sample x=" + std::to_string(s.x) +
                              " outside [0, " + std::to_string(screen_width) +
                              "]");
    }
    out.push_back({screen_width - s.x, s.y, s.t});
  }
  return out;
}

}  // namespace thumbside
