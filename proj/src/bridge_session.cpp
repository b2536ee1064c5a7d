#include "thumbside/bridge_session.hpp"

#include <algorithm>

namespace thumbside {

using nlohmann::json;

OutboundQueue::OutboundQueue(std::size_t cap) : cap_(std::max<std::size_t>(cap, 1)) {}

void OutboundQueue::push(json message) {
  message["seq"] = next_seq_++;
  std::string type = message.value("type", "");
  items_.push_back({std::move(type), message.dump()});
  if (items_.size() > cap_) shed();
}

// Oldest fit_debug goes first, then the oldest other non-grip_event.
void OutboundQueue::shed() {
  while (items_.size() > cap_) {
    auto victim = std::find_if(items_.begin(), items_.end(),
                               [](const Item& i) { return i.type == "fit_debug"; });
    if (victim == items_.end()) {
      victim = std::find_if(items_.begin(), items_.end(),
                            [](const Item& i) { return i.type != "grip_event"; });
    }
    if (victim == items_.end()) return;
    items_.erase(victim);
    ++dropped_;
  }
}

std::optional<std::string> OutboundQueue::pop() {
  if (items_.empty()) return std::nullopt;
  std::string text = std::move(items_.front().text);
  items_.pop_front();
  return text;
}

BridgeSession::BridgeSession(SessionOptions opts)
    : opts_(opts),
      segmenter_(opts.segmenter),
      store_(opts.hysteresis),
      out_(opts.queue_cap) {
  sub_ = store_.subscribe(
      [this](const GripEvent& e) { out_.push(wire::grip_event_message(e)); });
}

void BridgeSession::on_text(std::string_view text) {
  wire::Inbound message;
  try {
    message = wire::parse_inbound(text);
  } catch (const wire::WireError& e) {
    out_.push(wire::error_message(e.what(), e.seq()));
    return;
  }
  on_message(message);
}

void BridgeSession::on_message(const wire::Inbound& message) {
  if (message.seq) {
    if (last_seq_ && *message.seq <= *last_seq_) {
      out_.push(wire::error_message(
          "seq " + std::to_string(*message.seq) + " not greater than " +
              std::to_string(*last_seq_),
          message.seq));
      return;
    }
    last_seq_ = message.seq;
  }
  if (const auto* touch = std::get_if<TouchEvent>(&message.body)) {
    on_touch(*touch);
  } else {
    on_hint(std::get<wire::HintMessage>(message.body), message.seq);
  }
}

void BridgeSession::on_touch(const TouchEvent& event) {
  last_t_ = std::max(last_t_, event.sample.t);
  store_.tick(event.sample.t);
  auto outcome = segmenter_.push(event);
  if (outcome.trace) {
    on_trace(*outcome.trace);
  } else if (outcome.reject && opts_.debug) {
    out_.push(wire::reject_debug_message(*outcome.reject));
  }
}

void BridgeSession::on_trace(const SwipeTrace& trace) {
  QuadraticFit fit;
  try {
    fit = fit_quadratic(trace);
  } catch (const GeometryError&) {
    if (opts_.debug) {
      out_.push(wire::reject_debug_message(RejectReason::DegenerateGeometry));
    }
    return;
  }
  const auto decision = classify_fit(fit, opts_.classifier);
  const double at = trace.back().t;
  out_.push(wire::decision_message(decision, at));
  if (opts_.debug) out_.push(wire::fit_debug_message(fit, trace));
  store_.ingest_decision(decision, at);
}

void BridgeSession::on_hint(const wire::HintMessage& hint,
                            std::optional<std::int64_t> seq) {
  const double at = hint.t.value_or(last_t_);
  last_t_ = std::max(last_t_, at);
  try {
    store_.apply_hint(hint.hint, at);
  } catch (const GripError& e) {
    out_.push(wire::error_message(e.what(), seq));
  }
}

}  // namespace thumbside
