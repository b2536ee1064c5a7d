#pragma once

#include <atomic>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string_view>

#include "thumbside/swipe_geometry.hpp"

namespace thumbside {

/// How the device is being held. Numbered values follow the usual grip
/// numbering: 1 and 2 are one-handed thumb use, 6 is locked.
enum class GripState : std::uint8_t {
  Unknown = 0,
  LeftThumb = 1,
  RightThumb = 2,
  TwoThumbs = 3,
  Surface = 4,
  Cradled = 5,
  Locked = 6,
};

enum class GripCause : std::uint8_t {
  SwipeEvidence,
  UnlockHint,
  LockHint,
  ExternalHint,
  Timeout,
};

enum class GripHint : std::uint8_t {
  UnlockLeft,
  UnlockRight,
  UnlockUnknown,
  Lock,
  SurfaceHint,
  CradledHint,
  TwoThumbsHint,
};

std::string_view to_string(GripState s);
std::string_view to_string(GripCause c);
std::string_view to_string(GripHint h);
std::optional<GripState> parse_grip_state(std::string_view text);
std::optional<GripCause> parse_grip_cause(std::string_view text);
std::optional<GripHint> parse_grip_hint(std::string_view text);

struct GripEvent {
  GripState previous = GripState::Unknown;
  GripState current = GripState::Unknown;
  GripCause cause = GripCause::SwipeEvidence;
  double at = 0.0;  // ms, taken from input data

  friend bool operator==(const GripEvent&, const GripEvent&) = default;
};

enum class AmbiguousPolicy : std::uint8_t { Hold, Decay };

struct HysteresisConfig {
  /// Consecutive agreeing decisions needed to leave the current state.
  int flip_count = 2;
  AmbiguousPolicy ambiguous_policy = AmbiguousPolicy::Hold;
  /// Inactivity (ms) after which an unlocked store reverts to Unknown.
  double session_timeout = 120000.0;
};

class GripError : public std::runtime_error {
 public:
  enum class Kind { HintWhileLocked };

  GripError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

/// Handedness flag with poll and subscribe access.
///
/// Reads of current_state() are lock-free atomic loads. Mutations are
/// serialized on an internal writer mutex. Events are handed to subscribers
/// after the writer mutex is released, in emission order, by whichever
/// mutating thread drains the delivery queue first; a sink may call back
/// into the store. The store must outlive its subscriptions.
class GripStore {
 public:
  using Sink = std::function<void(const GripEvent&)>;

  /// Unsubscribes on destruction or reset().
  class Subscription {
   public:
    Subscription() = default;
    Subscription(Subscription&& other) noexcept;
    Subscription& operator=(Subscription&& other) noexcept;
    Subscription(const Subscription&) = delete;
    Subscription& operator=(const Subscription&) = delete;
    ~Subscription();

    void reset();
    bool active() const { return store_ != nullptr; }

   private:
    friend class GripStore;
    Subscription(GripStore* store, std::uint64_t id) : store_(store), id_(id) {}

    GripStore* store_ = nullptr;
    std::uint64_t id_ = 0;
  };

  /// Throws std::invalid_argument if cfg.flip_count < 1.
  explicit GripStore(HysteresisConfig cfg = {});
  GripStore(const GripStore&) = delete;
  GripStore& operator=(const GripStore&) = delete;

  /// Feeds one per-swipe decision observed at time `at` (ms).
  std::optional<GripEvent> ingest_decision(const HandednessDecision& decision,
                                           double at);
  std::optional<GripEvent> ingest_label(Handedness label, double at);

  /// Applies an authoritative hint. Unlock hints bypass hysteresis.
  /// Throws GripError::HintWhileLocked for Surface/Cradled/TwoThumbs hints
  /// while the device is locked.
  std::optional<GripEvent> apply_hint(GripHint hint, double at);

  /// Applies the inactivity timeout as of time `now` without new evidence.
  std::optional<GripEvent> tick(double now);

  GripState current_state() const {
    return state_.load(std::memory_order_acquire);
  }

  /// The sink sees only events emitted after this call returns.
  [[nodiscard]] Subscription subscribe(Sink sink);

  const HysteresisConfig& config() const { return cfg_; }

 private:
  struct Run {
    Handedness side = Handedness::Ambiguous;
    int count = 0;
  };

  // All of these run under writer_mu_.
  std::optional<GripEvent> transition(GripState next, GripCause cause,
                                      double at);
  std::optional<GripEvent> expire_locked(double now);
  void touch_locked(double at);

  void enqueue_locked(const GripEvent& event);
  void drain();
  void unsubscribe(std::uint64_t id);

  const HysteresisConfig cfg_;
  std::atomic<GripState> state_{GripState::Unknown};

  std::mutex writer_mu_;
  Run run_;
  std::optional<double> last_activity_;

  std::uint64_t next_seq_ = 0;

  struct SinkEntry {
    Sink sink;
    std::uint64_t first_seq = 0;
    std::atomic<bool> alive{true};
  };
  std::mutex sinks_mu_;
  std::map<std::uint64_t, std::shared_ptr<SinkEntry>> sinks_;
  std::uint64_t next_sink_id_ = 1;

  struct Pending {
    std::uint64_t seq = 0;
    GripEvent event;
  };
  std::mutex queue_mu_;
  std::deque<Pending> pending_;
  std::mutex delivery_mu_;
};

}  // namespace thumbside
