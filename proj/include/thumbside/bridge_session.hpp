#pragma once

#include <cstdint>
#include <deque>
#include <limits>
#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"
#include "thumbside/gesture_stream.hpp"
#include "thumbside/grip_state.hpp"
#include "thumbside/wire.hpp"

namespace thumbside {

struct SessionOptions {
  SegmenterConfig segmenter;
  ClassifierConfig classifier;
  HysteresisConfig hysteresis;
  /// Also emit fit_debug messages (coefficients, or the rejection reason).
  bool debug = false;
  /// Outbound backlog limit before shedding. grip_event messages are never
  /// shed, so the queue can exceed this when it holds nothing else.
  std::size_t queue_cap = 256;
};

/// Ordered outbound frames for one connection. Stamps each message with the
/// next seq when it is queued, so dropped messages leave gaps but seq stays
/// strictly increasing.
class OutboundQueue {
 public:
  explicit OutboundQueue(std::size_t cap = std::numeric_limits<std::size_t>::max());

  void push(nlohmann::json message);
  std::optional<std::string> pop();

  bool empty() const { return items_.empty(); }
  std::size_t size() const { return items_.size(); }
  std::size_t dropped() const { return dropped_; }
  std::int64_t next_seq() const { return next_seq_; }

 private:
  struct Item {
    std::string type;
    std::string text;
  };

  void shed();

  std::size_t cap_;
  std::deque<Item> items_;
  std::int64_t next_seq_ = 1;
  std::size_t dropped_ = 0;
};

/// One client's pipeline: touch messages feed a segmenter, completed traces
/// are fitted and classified, decisions drive a private grip store, and every
/// resulting message lands in the outbound queue. Single-threaded.
class BridgeSession {
 public:
  explicit BridgeSession(SessionOptions opts = {});
  BridgeSession(const BridgeSession&) = delete;
  BridgeSession& operator=(const BridgeSession&) = delete;

  /// Handles one inbound text frame or line. Never throws for bad input;
  /// problems become error messages.
  void on_text(std::string_view text);
  void on_message(const wire::Inbound& message);

  OutboundQueue& outbound() { return out_; }
  GripState grip_state() const { return store_.current_state(); }
  const SessionOptions& options() const { return opts_; }

 private:
  void on_touch(const TouchEvent& event);
  void on_hint(const wire::HintMessage& hint, std::optional<std::int64_t> seq);
  void on_trace(const SwipeTrace& trace);

  SessionOptions opts_;
  Segmenter segmenter_;
  GripStore store_;
  GripStore::Subscription sub_;
  OutboundQueue out_;
  std::optional<std::int64_t> last_seq_;
  double last_t_ = 0.0;
};

}  // namespace thumbside
