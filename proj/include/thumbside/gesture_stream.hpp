#pragma once

#include <map>
#include <optional>
#include <span>
#include <string_view>

#include "thumbside/touch.hpp"

namespace thumbside {

struct SegmenterConfig {
  std::size_t min_samples = 5;
  double min_vertical_extent = 80.0;  // px
  /// Required |dy| / |dx| between first and last sample.
  double vertical_dominance = 2.0;
  /// A gesture whose newest sample is older than this when another pointer
  /// goes down is treated as having lost its Up and is dropped (ms).
  double max_gesture_gap = 150.0;

  /// Throws std::invalid_argument unless every threshold is positive.
  void check() const;

  friend bool operator==(const SegmenterConfig&,
                         const SegmenterConfig&) = default;
};

enum class RejectReason {
  TooFewSamples,
  TooShort,
  NotVertical,
  DegenerateGeometry,
  NonMonotonicTime,
};

std::string_view to_string(RejectReason reason);

/// Empty optional means Accept.
std::optional<RejectReason> validate_trace(std::span<const TouchSample> trace,
                                           const SegmenterConfig& cfg = {});

/// What happened to one pushed event.
enum class PushStatus {
  Accumulating,   // sample appended to an in-flight gesture
  Duplicate,      // identical (x, y, t) to the previous sample, skipped
  Emitted,        // Up completed a valid trace
  Rejected,       // Up completed a trace that failed validation
  Cancelled,      // Cancel discarded the gesture
  MultiTouch,     // gesture discarded because another pointer overlapped it
  Orphan,         // Move/Up/Cancel with no active Down for that pointer
  OutOfOrder,     // timestamp regression for the pointer; event dropped
};

std::string_view to_string(PushStatus status);

struct PushOutcome {
  PushStatus status = PushStatus::Accumulating;
  std::optional<SwipeTrace> trace;
  std::optional<RejectReason> reject;
  int pointer_id = 0;
};

/// Turns a raw touch-event stream into validated vertical swipe traces.
///
/// Only single-pointer gestures are classified: a second concurrent Down
/// taints every in-flight gesture so that none of them is emitted. Not
/// thread-safe; push events for one stream from one thread.
class Segmenter {
 public:
  explicit Segmenter(SegmenterConfig cfg = {});

  PushOutcome push(const TouchEvent& event);

  const SegmenterConfig& config() const { return cfg_; }
  std::size_t active_pointers() const { return active_.size(); }

  friend bool operator==(const Segmenter&, const Segmenter&) = default;

 private:
  struct Gesture {
    SwipeTrace samples;
    bool tainted = false;

    friend bool operator==(const Gesture&, const Gesture&) = default;
  };

  PushOutcome finish(int pointer_id);

  SegmenterConfig cfg_;
  std::map<int, Gesture> active_;
};

}  // namespace thumbside
