#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace thumbside {

/// One touch point in screen coordinates: origin top-left, y grows downward,
/// t is a monotonic timestamp in milliseconds.
struct TouchSample {
  double x = 0.0;
  double y = 0.0;
  double t = 0.0;

  friend bool operator==(const TouchSample&, const TouchSample&) = default;
};

/// Finger-down to finger-up samples of one gesture, in arrival order.
using SwipeTrace = std::vector<TouchSample>;

enum class TouchPhase : std::uint8_t { Down, Move, Up, Cancel };

struct TouchEvent {
  TouchPhase phase = TouchPhase::Move;
  TouchSample sample;
  int pointer_id = 0;

  friend bool operator==(const TouchEvent&, const TouchEvent&) = default;
};

std::string_view to_string(TouchPhase phase);
bool parse_touch_phase(std::string_view text, TouchPhase& out);

}  // namespace thumbside
