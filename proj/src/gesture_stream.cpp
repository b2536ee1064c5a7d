#include "thumbside/gesture_stream.hpp"

#include <cmath>
#include <stdexcept>

namespace thumbside {

void SegmenterConfig::check() const {
  if (min_samples == 0 || !(min_vertical_extent > 0.0) ||
      !(vertical_dominance > 0.0) || !(max_gesture_gap > 0.0)) {
    throw std::invalid_argument("segmenter thresholds must be positive");
  }
}

std::string_view to_string(RejectReason reason) {
  switch (reason) {
    case RejectReason::TooFewSamples:
      return "TooFewSamples";
    case RejectReason::TooShort:
      return "TooShort";
    case RejectReason::NotVertical:
      return "NotVertical";
    case RejectReason::DegenerateGeometry:
      return "DegenerateGeometry";
    case RejectReason::NonMonotonicTime:
      return "NonMonotonicTime";
  }
  return "DegenerateGeometry";
}

std::string_view to_string(PushStatus status) {
  switch (status) {
    case PushStatus::Accumulating:
      return "accumulating";
    case PushStatus::Duplicate:
      return "duplicate";
    case PushStatus::Emitted:
      return "emitted";
    case PushStatus::Rejected:
      return "rejected";
    case PushStatus::Cancelled:
      return "cancelled";
    case PushStatus::MultiTouch:
      return "multi_touch";
    case PushStatus::Orphan:
      return "orphan";
    case PushStatus::OutOfOrder:
      return "out_of_order";
  }
  return "orphan";
}

std::optional<RejectReason> validate_trace(std::span<const TouchSample> trace,
                                           const SegmenterConfig& cfg) {
  if (trace.size() < cfg.min_samples || trace.empty()) {
    return RejectReason::TooFewSamples;
  }
  const auto& first = trace.front();
  const auto& last = trace.back();
  const double dy = std::abs(last.y - first.y);
  const double dx = std::abs(last.x - first.x);
  if (!std::isfinite(dx) || !std::isfinite(dy)) {
    return RejectReason::DegenerateGeometry;
  }

  int distinct_y = 0;
  double seen[2] = {0.0, 0.0};
  for (const auto& s : trace) {
    if (distinct_y >= 3) break;
    bool known = false;
    for (int i = 0; i < distinct_y; ++i) known = known || seen[i] == s.y;
    if (!known) {
      if (distinct_y < 2) seen[distinct_y] = s.y;
      ++distinct_y;
    }
  }
  if (distinct_y < 3) return RejectReason::DegenerateGeometry;
  if (dy < cfg.vertical_dominance * dx) return RejectReason::NotVertical;
  if (dy < cfg.min_vertical_extent) return RejectReason::TooShort;
  for (std::size_t i = 1; i < trace.size(); ++i) {
    if (!(trace[i].t > trace[i - 1].t)) return RejectReason::NonMonotonicTime;
  }
  return std::nullopt;
}

Segmenter::Segmenter(SegmenterConfig cfg) : cfg_(cfg) { cfg_.check(); }

PushOutcome Segmenter::push(const TouchEvent& event) {
  const int id = event.pointer_id;
  const auto& s = event.sample;
  PushOutcome out;
  out.pointer_id = id;

  if (event.phase == TouchPhase::Down) {
    active_.erase(id);
    for (auto it = active_.begin(); it != active_.end();) {
      if (s.t - it->second.samples.back().t > cfg_.max_gesture_gap) {
        it = active_.erase(it);
      } else {
        ++it;
      }
    }
    Gesture g;
    g.samples.push_back(s);
    if (!active_.empty()) {
      g.tainted = true;
      for (auto& [other, gesture] : active_) gesture.tainted = true;
    }
    active_.emplace(id, std::move(g));
    out.status = PushStatus::Accumulating;
    return out;
  }

  auto it = active_.find(id);
  if (it == active_.end()) {
    out.status = PushStatus::Orphan;
    return out;
  }
  Gesture& g = it->second;

  if (event.phase == TouchPhase::Cancel) {
    active_.erase(it);
    out.status = PushStatus::Cancelled;
    return out;
  }

  const TouchSample& prev = g.samples.back();
  if (s.t < prev.t) {
    out.status = PushStatus::OutOfOrder;
    return out;
  }
  const bool duplicate = s == prev;
  if (!duplicate) g.samples.push_back(s);

  if (event.phase == TouchPhase::Move) {
    out.status = duplicate ? PushStatus::Duplicate : PushStatus::Accumulating;
    return out;
  }
  return finish(id);
}

PushOutcome Segmenter::finish(int pointer_id) {
  auto node = active_.extract(pointer_id);
  Gesture& g = node.mapped();
  PushOutcome out;
  out.pointer_id = pointer_id;
  if (g.tainted) {
    out.status = PushStatus::MultiTouch;
    return out;
  }
  if (auto reason = validate_trace(g.samples, cfg_)) {
    out.status = PushStatus::Rejected;
    out.reject = reason;
    return out;
  }
  out.status = PushStatus::Emitted;
  out.trace = std::move(g.samples);
  return out;
}

}  // namespace thumbside
