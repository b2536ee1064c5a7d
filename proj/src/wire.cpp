#include "thumbside/wire.hpp"

#include <algorithm>
#include <cmath>

namespace thumbside::wire {

using nlohmann::json;

namespace {

std::optional<std::int64_t> read_seq(const json& j) {
  if (!j.is_object()) return std::nullopt;
  auto it = j.find("seq");
  if (it == j.end() || !it->is_number_integer()) return std::nullopt;
  return it->get<std::int64_t>();
}

double number_field(const json& j, const char* key,
                    std::optional<std::int64_t> seq) {
  auto it = j.find(key);
  if (it == j.end()) throw WireError(std::string("missing field '") + key + "'", seq);
  if (!it->is_number()) {
    throw WireError(std::string("field '") + key + "' must be a number", seq);
  }
  const double v = it->get<double>();
  if (!std::isfinite(v)) {
    throw WireError(std::string("field '") + key + "' must be finite", seq);
  }
  return v;
}

std::string string_field(const json& j, const char* key,
                         std::optional<std::int64_t> seq) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) {
    throw WireError(std::string("missing string field '") + key + "'", seq);
  }
  return it->get<std::string>();
}

}  // namespace

Inbound parse_inbound(std::string_view text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw WireError("malformed JSON", std::nullopt);
  if (!j.is_object()) throw WireError("message must be a JSON object", std::nullopt);

  Inbound in;
  in.seq = read_seq(j);
  if (j.contains("seq") && !in.seq) {
    throw WireError("field 'seq' must be an integer", std::nullopt);
  }
  const std::string type = string_field(j, "type", in.seq);

  if (type == "touch") {
    TouchEvent e;
    const std::string phase = string_field(j, "phase", in.seq);
    if (!parse_touch_phase(phase, e.phase)) {
      throw WireError("unknown phase '" + phase + "'", in.seq);
    }
    e.sample = {number_field(j, "x", in.seq), number_field(j, "y", in.seq),
                number_field(j, "t", in.seq)};
    if (auto it = j.find("pointer"); it != j.end()) {
      if (!it->is_number_integer()) {
        throw WireError("field 'pointer' must be an integer", in.seq);
      }
      e.pointer_id = it->get<int>();
    }
    in.body = e;
    return in;
  }
  if (type == "hint") {
    HintMessage h;
    const std::string name = string_field(j, "hint", in.seq);
    auto hint = parse_grip_hint(name);
    if (!hint) throw WireError("unknown hint '" + name + "'", in.seq);
    h.hint = *hint;
    if (j.contains("t")) h.t = number_field(j, "t", in.seq);
    in.body = h;
    return in;
  }
  throw WireError("unknown message type '" + type + "'", in.seq);
}

json to_json(const GripEvent& e) {
  return {{"previous", to_string(e.previous)},
          {"current", to_string(e.current)},
          {"cause", to_string(e.cause)},
          {"at", e.at}};
}

GripEvent grip_event_from_json(const json& j) {
  if (!j.is_object()) throw WireError("grip event must be an object", std::nullopt);
  GripEvent e;
  const auto state = [&](const char* key) {
    auto s = parse_grip_state(string_field(j, key, std::nullopt));
    if (!s) throw WireError(std::string("bad grip state in '") + key + "'", std::nullopt);
    return *s;
  };
  e.previous = state("previous");
  e.current = state("current");
  auto cause = parse_grip_cause(string_field(j, "cause", std::nullopt));
  if (!cause) throw WireError("bad grip cause", std::nullopt);
  e.cause = *cause;
  e.at = number_field(j, "at", std::nullopt);
  return e;
}

json touch_message(const TouchEvent& e) {
  return {{"type", "touch"},
          {"phase", to_string(e.phase)},
          {"x", e.sample.x},
          {"y", e.sample.y},
          {"t", e.sample.t},
          {"pointer", e.pointer_id}};
}

json hint_message(const HintMessage& h) {
  json j = {{"type", "hint"}, {"hint", to_string(h.hint)}};
  if (h.t) j["t"] = *h.t;
  return j;
}

json decision_message(const HandednessDecision& d, double at) {
  return {{"type", "decision"},
          {"label", to_string(d.label)},
          {"c", d.fit.c},
          {"r2", d.fit.r2},
          {"margin", d.curvature_margin},
          {"at", at}};
}

json fit_debug_message(const QuadraticFit& fit,
                       std::span<const TouchSample> trace) {
  double y_min = 0.0, y_max = 0.0;
  if (!trace.empty()) {
    auto [lo, hi] = std::minmax_element(
        trace.begin(), trace.end(),
        [](const TouchSample& p, const TouchSample& q) { return p.y < q.y; });
    y_min = lo->y;
    y_max = hi->y;
  }
  return {{"type", "fit_debug"},
          {"a", fit.a},
          {"b", fit.b},
          {"c", fit.c},
          {"r2", fit.r2},
          {"n", fit.n},
          {"ss_res", fit.ss_res},
          {"y_min", y_min},
          {"y_max", y_max}};
}

json reject_debug_message(RejectReason reason) {
  return {{"type", "fit_debug"}, {"rejected", to_string(reason)}};
}

json grip_event_message(const GripEvent& e) {
  json j = to_json(e);
  j["type"] = "grip_event";
  return j;
}

json error_message(std::string_view what, std::optional<std::int64_t> offender_seq) {
  json j = {{"type", "error"}, {"message", what}};
  j["offender_seq"] = offender_seq ? json(*offender_seq) : json(nullptr);
  return j;
}

}  // namespace thumbside::wire
