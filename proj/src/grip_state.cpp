#include "thumbside/grip_state.hpp"

#include <utility>
#include <vector>

namespace thumbside {

std::string_view to_string(GripState s) {
  switch (s) {
    case GripState::Unknown:
      return "unknown";
    case GripState::LeftThumb:
      return "left_thumb";
    case GripState::RightThumb:
      return "right_thumb";
    case GripState::TwoThumbs:
      return "two_thumbs";
    case GripState::Surface:
      return "surface";
    case GripState::Cradled:
      return "cradled";
    case GripState::Locked:
      return "locked";
  }
  return "unknown";
}

std::string_view to_string(GripCause c) {
  switch (c) {
    case GripCause::SwipeEvidence:
      return "swipe_evidence";
    case GripCause::UnlockHint:
      return "unlock_hint";
    case GripCause::LockHint:
      return "lock_hint";
    case GripCause::ExternalHint:
      return "external_hint";
    case GripCause::Timeout:
      return "timeout";
  }
  return "swipe_evidence";
}

std::string_view to_string(GripHint h) {
  switch (h) {
    case GripHint::UnlockLeft:
      return "unlock_left";
    case GripHint::UnlockRight:
      return "unlock_right";
    case GripHint::UnlockUnknown:
      return "unlock_unknown";
    case GripHint::Lock:
      return "lock";
    case GripHint::SurfaceHint:
      return "surface";
    case GripHint::CradledHint:
      return "cradled";
    case GripHint::TwoThumbsHint:
      return "two_thumbs";
  }
  return "lock";
}

namespace {

template <typename Enum, std::size_t N>
std::optional<Enum> parse_by_name(std::string_view text,
                                  const Enum (&values)[N]) {
  for (Enum v : values) {
    if (to_string(v) == text) return v;
  }
  return std::nullopt;
}

constexpr GripState kStates[] = {
    GripState::Unknown, GripState::LeftThumb, GripState::RightThumb,
    GripState::TwoThumbs, GripState::Surface, GripState::Cradled,
    GripState::Locked};
constexpr GripCause kCauses[] = {GripCause::SwipeEvidence,
                                 GripCause::UnlockHint, GripCause::LockHint,
                                 GripCause::ExternalHint, GripCause::Timeout};
constexpr GripHint kHints[] = {
    GripHint::UnlockLeft,  GripHint::UnlockRight, GripHint::UnlockUnknown,
    GripHint::Lock,        GripHint::SurfaceHint, GripHint::CradledHint,
    GripHint::TwoThumbsHint};

GripState state_for(Handedness h) {
  return h == Handedness::LeftThumb ? GripState::LeftThumb
                                    : GripState::RightThumb;
}

// Set while a thread is inside drain(), so a sink that mutates the store
// leaves delivery to the outer loop instead of deadlocking.
thread_local const void* tls_draining_store = nullptr;

}  // namespace

std::optional<GripState> parse_grip_state(std::string_view text) {
  return parse_by_name(text, kStates);
}
std::optional<GripCause> parse_grip_cause(std::string_view text) {
  return parse_by_name(text, kCauses);
}
std::optional<GripHint> parse_grip_hint(std::string_view text) {
  return parse_by_name(text, kHints);
}

GripStore::Subscription::Subscription(Subscription&& other) noexcept
    : store_(std::exchange(other.store_, nullptr)), id_(other.id_) {}

GripStore::Subscription& GripStore::Subscription::operator=(
    Subscription&& other) noexcept {
  if (this != &other) {
    reset();
    store_ = std::exchange(other.store_, nullptr);
    id_ = other.id_;
  }
  return *this;
}

GripStore::Subscription::~Subscription() { reset(); }

void GripStore::Subscription::reset() {
  if (store_ != nullptr) {
    store_->unsubscribe(id_);
    store_ = nullptr;
  }
}

GripStore::GripStore(HysteresisConfig cfg) : cfg_(cfg) {
  if (cfg_.flip_count < 1) {
    throw std::invalid_argument("flip_count must be at least 1");
  }
}

std::optional<GripEvent> GripStore::ingest_decision(
    const HandednessDecision& decision, double at) {
  return ingest_label(decision.label, at);
}

std::optional<GripEvent> GripStore::ingest_label(Handedness label, double at) {
  std::optional<GripEvent> first;
  std::optional<GripEvent> second;
  {
    std::lock_guard lock(writer_mu_);
    const GripState current = state_.load(std::memory_order_relaxed);
    if (current == GripState::Locked) return std::nullopt;

    first = expire_locked(at);
    touch_locked(at);

    if (label == Handedness::Ambiguous) {
      if (cfg_.ambiguous_policy == AmbiguousPolicy::Decay) run_ = {};
    } else {
      if (run_.side == label) {
        ++run_.count;
      } else {
        run_ = {label, 1};
      }
      const GripState target = state_for(label);
      if (run_.count >= cfg_.flip_count &&
          state_.load(std::memory_order_relaxed) != target) {
        second = transition(target, GripCause::SwipeEvidence, at);
        run_ = {};
      }
    }
  }
  drain();
  // Two events only happen when a timeout precedes fresh evidence; the
  // caller gets the latest one, subscribers see both.
  return second ? second : first;
}

std::optional<GripEvent> GripStore::apply_hint(GripHint hint, double at) {
  std::optional<GripEvent> event;
  {
    std::lock_guard lock(writer_mu_);
    const GripState current = state_.load(std::memory_order_relaxed);
    const bool locked = current == GripState::Locked;
    switch (hint) {
      case GripHint::Lock:
        event = transition(GripState::Locked, GripCause::LockHint, at);
        run_ = {};
        last_activity_.reset();
        break;
      case GripHint::UnlockLeft:
      case GripHint::UnlockRight:
      case GripHint::UnlockUnknown: {
        const GripState target =
            hint == GripHint::UnlockLeft    ? GripState::LeftThumb
            : hint == GripHint::UnlockRight ? GripState::RightThumb
                                            : GripState::Unknown;
        event = transition(target, GripCause::UnlockHint, at);
        run_ = {};
        touch_locked(at);
        break;
      }
      case GripHint::SurfaceHint:
      case GripHint::CradledHint:
      case GripHint::TwoThumbsHint: {
        if (locked) {
          throw GripError(GripError::Kind::HintWhileLocked,
                          std::string("hint '") +
                              std::string(to_string(hint)) +
                              "' rejected while locked");
        }
        const GripState target =
            hint == GripHint::SurfaceHint   ? GripState::Surface
            : hint == GripHint::CradledHint ? GripState::Cradled
                                            : GripState::TwoThumbs;
        event = transition(target, GripCause::ExternalHint, at);
        run_ = {};
        touch_locked(at);
        break;
      }
    }
  }
  drain();
  return event;
}

std::optional<GripEvent> GripStore::tick(double now) {
  std::optional<GripEvent> event;
  {
    std::lock_guard lock(writer_mu_);
    event = expire_locked(now);
  }
  drain();
  return event;
}

GripStore::Subscription GripStore::subscribe(Sink sink) {
  auto entry = std::make_shared<SinkEntry>();
  entry->sink = std::move(sink);
  {
    std::lock_guard writer(writer_mu_);
    entry->first_seq = next_seq_;
  }
  std::lock_guard lock(sinks_mu_);
  const std::uint64_t id = next_sink_id_++;
  sinks_.emplace(id, std::move(entry));
  return Subscription(this, id);
}

void GripStore::unsubscribe(std::uint64_t id) {
  std::lock_guard lock(sinks_mu_);
  auto it = sinks_.find(id);
  if (it != sinks_.end()) {
    it->second->alive.store(false, std::memory_order_release);
    sinks_.erase(it);
  }
}

std::optional<GripEvent> GripStore::transition(GripState next, GripCause cause,
                                               double at) {
  const GripState previous = state_.load(std::memory_order_relaxed);
  if (previous == next) return std::nullopt;
  state_.store(next, std::memory_order_release);
  GripEvent event{previous, next, cause, at};
  enqueue_locked(event);
  return event;
}

std::optional<GripEvent> GripStore::expire_locked(double now) {
  const GripState current = state_.load(std::memory_order_relaxed);
  if (current == GripState::Locked || current == GripState::Unknown) {
    return std::nullopt;
  }
  if (!last_activity_ || now - *last_activity_ <= cfg_.session_timeout) {
    return std::nullopt;
  }
  run_ = {};
  last_activity_.reset();
  return transition(GripState::Unknown, GripCause::Timeout, now);
}

void GripStore::touch_locked(double at) { last_activity_ = at; }

void GripStore::enqueue_locked(const GripEvent& event) {
  std::lock_guard lock(queue_mu_);
  pending_.push_back({next_seq_++, event});
}

void GripStore::drain() {
  if (tls_draining_store == this) return;
  std::lock_guard delivery(delivery_mu_);
  tls_draining_store = this;
  for (;;) {
    Pending item;
    {
      std::lock_guard lock(queue_mu_);
      if (pending_.empty()) break;
      item = pending_.front();
      pending_.pop_front();
    }
    std::vector<std::shared_ptr<SinkEntry>> targets;
    {
      std::lock_guard lock(sinks_mu_);
      targets.reserve(sinks_.size());
      for (const auto& [id, entry] : sinks_) targets.push_back(entry);
    }
    for (const auto& entry : targets) {
      if (item.seq < entry->first_seq) continue;
      if (!entry->alive.load(std::memory_order_acquire)) continue;
      entry->sink(item.event);
    }
  }
  tls_draining_store = nullptr;
}

}  // namespace thumbside
