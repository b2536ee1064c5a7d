#include "thumbside/touch.hpp"

namespace thumbside {

std::string_view to_string(TouchPhase phase) {
  switch (phase) {
    case TouchPhase::Down:
      return "down";
    case TouchPhase::Move:
      return "move";
    case TouchPhase::Up:
      return "up";
    case TouchPhase::Cancel:
      return "cancel";
  }
  return "move";
}

bool parse_touch_phase(std::string_view text, TouchPhase& out) {
  if (text == "down") {
    out = TouchPhase::Down;
  } else if (text == "move") {
    out = TouchPhase::Move;
  } else if (text == "up") {
    out = TouchPhase::Up;
  } else if (text == "cancel") {
    out = TouchPhase::Cancel;
  } else {
    return false;
  }
  return true;
}

}  // namespace thumbside
