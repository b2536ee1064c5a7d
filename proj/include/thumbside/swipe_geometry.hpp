#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

#include "thumbside/touch.hpp"

namespace thumbside {

/// Least-squares parabola x = a + b*y + c*y^2 in raw screen pixels.
///
/// The sign of `c` carries the handedness signal: a swipe made by the left
/// thumb bends into a curve opening leftward (c < 0), the right thumb gives
/// c > 0. `r2` is the coefficient of determination of the fit.
struct QuadraticFit {
  double a = 0.0;   // px
  double b = 0.0;   // px/px
  double c = 0.0;   // 1/px
  double r2 = 0.0;  // [0, 1]
  std::size_t n = 0;
  /// Sum of squared x residuals, kept for diagnostics and oracle checks.
  double ss_res = 0.0;

  double evaluate(double y) const { return a + (b + c * y) * y; }
};

enum class Handedness { LeftThumb, RightThumb, Ambiguous };

std::string_view to_string(Handedness h);
Handedness flip(Handedness h);

struct ClassifierConfig {
  /// Dead zone on |c| in 1/px; curvature inside it is treated as noise.
  double epsilon_c = 1e-4;
  /// Minimum R^2 for a fit to be allowed to assert a side.
  double q_min = 0.5;
};

struct HandednessDecision {
  Handedness label = Handedness::Ambiguous;
  QuadraticFit fit;
  /// |c| - epsilon_c, in 1/px. Negative means inside the dead zone.
  double curvature_margin = 0.0;
};

class GeometryError : public std::runtime_error {
 public:
  enum class Kind { DegenerateTrace, NonFiniteInput, SampleOutOfBounds };

  GeometryError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

/// Minimum number of samples a fit will accept.
inline constexpr std::size_t kMinFitSamples = 5;

/// Fits x = a + b*y + c*y^2 by ordinary least squares.
///
/// Runs in O(n): one pass for the y centre/half-range and x mean, one pass
/// accumulating moments of the normalized abscissa, one pass for residuals.
/// The 3x3 normal system is solved in normalized coordinates and mapped back,
/// which keeps the solve well conditioned for y in the thousands of pixels.
/// Timestamps are ignored.
///
/// Throws GeometryError::NonFiniteInput on NaN/inf coordinates and
/// GeometryError::DegenerateTrace when there are fewer than kMinFitSamples
/// samples or fewer than three distinct y values.
QuadraticFit fit_quadratic(std::span<const TouchSample> trace);

/// Sign-of-curvature rule with a dead zone and a fit-quality floor.
HandednessDecision classify_fit(const QuadraticFit& fit,
                                const ClassifierConfig& cfg = {});

/// Reflects every sample about the vertical line x = screen_width / 2.
/// Throws GeometryError::SampleOutOfBounds if any x lies outside
/// [0, screen_width].
SwipeTrace mirror_trace(std::span<const TouchSample> trace,
                        double screen_width);

}  // namespace thumbside
