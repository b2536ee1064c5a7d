#pragma once

// JSON text messages exchanged with the playground and written by
// `thumbside classify --stream`. One object per WebSocket frame or per line.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

#include "json.hpp"
#include "thumbside/gesture_stream.hpp"
#include "thumbside/grip_state.hpp"
#include "thumbside/swipe_geometry.hpp"

namespace thumbside::wire {

inline constexpr int kWireVersion = 1;

/// A hint message. `t` is optional on the wire; the session falls back to
/// the latest timestamp it has seen.
struct HintMessage {
  GripHint hint = GripHint::Lock;
  std::optional<double> t;

  friend bool operator==(const HintMessage&, const HintMessage&) = default;
};

struct Inbound {
  std::optional<std::int64_t> seq;
  std::variant<TouchEvent, HintMessage> body;

  friend bool operator==(const Inbound&, const Inbound&) = default;
};

/// Rejected inbound text. `seq` is the offender's seq when it could be read.
class WireError : public std::runtime_error {
 public:
  WireError(const std::string& what, std::optional<std::int64_t> seq)
      : std::runtime_error(what), seq_(seq) {}

  std::optional<std::int64_t> seq() const { return seq_; }

 private:
  std::optional<std::int64_t> seq_;
};

/// Throws WireError for malformed JSON, unknown types or bad fields.
Inbound parse_inbound(std::string_view text);

nlohmann::json to_json(const GripEvent& e);
/// Throws WireError on missing or unknown fields.
GripEvent grip_event_from_json(const nlohmann::json& j);

nlohmann::json touch_message(const TouchEvent& e);
nlohmann::json hint_message(const HintMessage& h);

nlohmann::json decision_message(const HandednessDecision& d, double at);
nlohmann::json fit_debug_message(const QuadraticFit& fit,
                                 std::span<const TouchSample> trace);
nlohmann::json reject_debug_message(RejectReason reason);
nlohmann::json grip_event_message(const GripEvent& e);
nlohmann::json error_message(std::string_view what,
                             std::optional<std::int64_t> offender_seq);

}  // namespace thumbside::wire
