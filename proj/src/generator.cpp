#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "thumbside/synth_bench.hpp"

namespace thumbside {

std::string_view to_string(GripLabel label) {
  switch (label) {
    case GripLabel::LeftThumb:
      return "left_thumb";
    case GripLabel::RightThumb:
      return "right_thumb";
    case GripLabel::IndexFinger:
      return "index_finger";
  }
  return "index_finger";
}

std::optional<GripLabel> parse_grip_label(std::string_view text) {
  for (auto l : {GripLabel::LeftThumb, GripLabel::RightThumb,
                 GripLabel::IndexFinger}) {
    if (to_string(l) == text) return l;
  }
  return std::nullopt;
}

void GeneratorParams::check() const {
  auto fail = [](const char* what) { throw std::invalid_argument(what); };
  if (!(screen_w > 0.0) || !(screen_h > 0.0)) fail("screen size must be positive");
  if (!(pixels_per_inch > 0.0)) fail("pixels_per_inch must be positive");
  if (!(thumb_length_min_in > 0.0) || thumb_length_max_in < thumb_length_min_in) {
    fail("thumb length range is empty");
  }
  if (thumb_length && !(*thumb_length > 0.0)) fail("thumb_length must be positive");
  if (!(arc_span_min > 0.0) || arc_span_max < arc_span_min) {
    fail("arc span range is empty");
  }
  if (!(noise_sigma >= 0.0)) fail("noise_sigma must be non-negative");
  if (samples_min < 3 || samples_max < samples_min) {
    fail("sample count range is empty");
  }
}

nlohmann::json to_json(const GeneratorParams& p) {
  nlohmann::json j;
  j["grip"] = to_string(p.grip);
  j["screen_w"] = p.screen_w;
  j["screen_h"] = p.screen_h;
  j["pixels_per_inch"] = p.pixels_per_inch;
  j["thumb_length_in"] = {p.thumb_length_min_in, p.thumb_length_max_in};
  j["thumb_length"] = p.thumb_length ? nlohmann::json(*p.thumb_length)
                                     : nlohmann::json(nullptr);
  j["anchor"] = p.anchor ? nlohmann::json{p.anchor->x, p.anchor->y}
                         : nlohmann::json(nullptr);
  j["arc_span"] = {p.arc_span_min, p.arc_span_max};
  j["noise_sigma"] = p.noise_sigma;
  j["samples"] = {p.samples_min, p.samples_max};
  j["seed"] = p.seed;
  return j;
}

std::string params_digest(const GeneratorParams& p) {
  const std::string canonical = to_json(p).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canonical) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::mt19937_64 record_rng(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

namespace {

constexpr double kPi = std::numbers::pi;

// Minimum-jerk position profile on [0, 1].
double min_jerk(double tau) {
  const double t3 = tau * tau * tau;
  return t3 * (10.0 - 15.0 * tau + 6.0 * tau * tau);
}

class Draw {
 public:
  explicit Draw(std::mt19937_64& rng) : rng_(rng) {}

  double uniform(double lo, double hi) { return lo + (hi - lo) * unit_(rng_); }
  int integer(int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng_);
  }
  double normal() { return normal_(rng_); }

 private:
  std::mt19937_64& rng_;
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
  std::normal_distribution<double> normal_{0.0, 1.0};
};

struct Shape {
  int samples = 0;
  double duration = 0.0;
  double t0 = 0.0;
  bool upward = true;
};

// Pure path positions (before noise) at each sample, in the frame where the
// thumb belongs to the right hand.
std::vector<Point> thumb_path(const GeneratorParams& p, const Shape& shape, Point anchor, double length,
                              double theta_mid, double span) {
  // Angle measured from straight up at the pivot, sweeping toward the
  // opposite edge: theta = pi/2 puts the tip level with the pivot.
  auto at = [&](double theta) {
    return Point{anchor.x - length * std::sin(theta),
                 anchor.y - length * std::cos(theta)};
  };
  auto visible = [&](const Point& q) {
    return q.x >= 0.0 && q.x <= p.screen_w && q.y >= 0.0 && q.y <= p.screen_h;
  };

  // Longest contiguous on-screen stretch of the requested arc.
  constexpr int kGrid = 2000;
  const double lo = theta_mid - 0.5 * span;
  int best_start = -1, best_len = 0, run_start = -1;
  for (int i = 0; i <= kGrid; ++i) {
    const double theta = lo + span * i / kGrid;
    if (visible(at(theta))) {
      if (run_start < 0) run_start = i;
      if (i - run_start + 1 > best_len) {
        best_len = i - run_start + 1;
        best_start = run_start;
      }
    } else {
      run_start = -1;
    }
  }
  if (best_len < 2) {
    throw BenchError(BenchError::Kind::GeometryInfeasible,
                     "thumb arc does not intersect the screen");
  }
  const double theta_a = lo + span * best_start / kGrid;
  const double theta_b = lo + span * (best_start + best_len - 1) / kGrid;

  std::vector<Point> out;
  out.reserve(static_cast<std::size_t>(shape.samples));
  for (int i = 0; i < shape.samples; ++i) {
    const double s = min_jerk(static_cast<double>(i) / (shape.samples - 1));
    // Increasing theta moves the tip down the screen.
    const double theta = shape.upward ? theta_b + (theta_a - theta_b) * s
                                      : theta_a + (theta_b - theta_a) * s;
    out.push_back(at(theta));
  }
  return out;
}

}  // namespace

TraceRecord generate_swipe(const GeneratorParams& params, std::mt19937_64& rng) {
  params.check();
  Draw draw(rng);
  const double w = params.screen_w;
  const double h = params.screen_h;

  // Draw order is fixed and independent of grip and of which optional
  // parameters are pinned, so left/right pairs share every random value.
  const double drawn_length =
      draw.uniform(params.thumb_length_min_px(), params.thumb_length_max_px());
  const double pivot_dx = draw.uniform(0.0, 0.08) * w;
  const double pivot_y = draw.uniform(0.60, 0.90) * h;
  const double theta_mid = kPi / 2 + draw.uniform(-0.26, 0.26);
  const double span = draw.uniform(params.arc_span_min, params.arc_span_max);
  Shape shape;
  shape.samples = draw.integer(params.samples_min, params.samples_max);
  shape.duration = draw.uniform(120.0, 400.0);
  shape.upward = draw.uniform(0.0, 1.0) < 0.5;
  shape.t0 = std::round(draw.uniform(0.0, 50.0) * 1000.0) / 1000.0;
  // Index-finger line: horizontal position, slope, extent, centre.
  const double line_x = draw.uniform(0.3, 0.7) * w;
  const double line_slope = draw.uniform(-0.05, 0.05);
  const double line_extent = draw.uniform(0.3, 0.6) * h;
  const double line_centre = draw.uniform(0.0, 1.0);

  std::vector<Point> path;
  if (params.grip == GripLabel::IndexFinger) {
    const double half = 0.5 * line_extent;
    const double yc = half + 20.0 + line_centre * (h - line_extent - 40.0);
    for (int i = 0; i < shape.samples; ++i) {
      const double s = min_jerk(static_cast<double>(i) / (shape.samples - 1));
      const double y = shape.upward ? yc + half - line_extent * s
                                     : yc - half + line_extent * s;
      path.push_back({line_x + line_slope * (y - yc), y});
    }
  } else {
    const double length = params.thumb_length.value_or(drawn_length);
    Point anchor{w + pivot_dx, pivot_y};
    if (params.anchor) {
      anchor = *params.anchor;
      if (params.grip == GripLabel::LeftThumb) anchor.x = w - anchor.x;
    }
    path = thumb_path(params, shape, anchor, length, theta_mid, span);
  }

  TraceRecord rec;
  rec.label = params.grip;
  rec.params_digest = params_digest(params);
  rec.id = "syn-" + std::to_string(params.seed);
  rec.trace.reserve(path.size());
  const double sigma = params.noise_sigma;
  for (std::size_t i = 0; i < path.size(); ++i) {
    const double nx = draw.normal();
    const double ny = draw.normal();
    double x = std::clamp(path[i].x + sigma * nx, 0.0, w);
    const double y = std::clamp(path[i].y + sigma * ny, 0.0, h);
    if (params.grip == GripLabel::LeftThumb) x = w - x;
    const double frac = static_cast<double>(i) / (path.size() - 1);
    rec.trace.push_back({x, y, shape.t0 + shape.duration * frac});
  }
  return rec;
}

TraceRecord generate_swipe(const GeneratorParams& params) {
  std::mt19937_64 rng(params.seed);
  return generate_swipe(params, rng);
}

GripMix parse_grip_mix(std::string_view text) {
  GripMix mix{0.0, 0.0, 0.0};
  std::string item;
  std::istringstream in{std::string(text)};
  while (std::getline(in, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      throw BenchError(BenchError::Kind::InvalidArgument,
                       "grip mix entry '" + item + "' is not key=value");
    }
    const std::string key = item.substr(0, eq);
    double value = 0.0;
    const char* first = item.data() + eq + 1;
    const char* last = item.data() + item.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || !(value >= 0.0)) {
      throw BenchError(BenchError::Kind::InvalidArgument,
                       "grip mix value for '" + key + "' is not a fraction");
    }
    if (key == "left") {
      mix.left = value;
    } else if (key == "right") {
      mix.right = value;
    } else if (key == "index") {
      mix.index = value;
    } else {
      throw BenchError(BenchError::Kind::InvalidArgument,
                       "unknown grip mix key '" + key + "'");
    }
  }
  if (!(mix.left + mix.right + mix.index > 0.0)) {
    throw BenchError(BenchError::Kind::InvalidArgument,
                     "grip mix must have a positive total");
  }
  return mix;
}

std::array<std::size_t, 3> label_counts(std::size_t count, const GripMix& mix) {
  const std::array<double, 3> weights{mix.left, mix.right, mix.index};
  const double total = weights[0] + weights[1] + weights[2];
  if (!(total > 0.0)) {
    throw BenchError(BenchError::Kind::InvalidArgument,
                     "grip mix must have a positive total");
  }
  std::array<std::size_t, 3> counts{};
  std::array<double, 3> remainder{};
  std::size_t assigned = 0;
  for (int k = 0; k < 3; ++k) {
    const double exact = weights[k] / total * static_cast<double>(count);
    // Snap values that are integral up to rounding noise (0.1 * 1400).
    const double snapped = std::abs(exact - std::round(exact)) < 1e-9
                               ? std::round(exact)
                               : std::floor(exact);
    counts[k] = static_cast<std::size_t>(snapped);
    remainder[k] = exact - snapped;
    assigned += counts[k];
  }
  while (assigned < count) {
    int best = 0;
    for (int k = 1; k < 3; ++k) {
      if (remainder[k] > remainder[best]) best = k;
    }
    ++counts[best];
    remainder[best] = -1.0;
    ++assigned;
  }
  return counts;
}

std::vector<TraceRecord> generate_corpus(const CorpusSpec& spec) {
  if (spec.count == 0) {
    throw BenchError(BenchError::Kind::InvalidArgument,
                     "corpus size must be at least 1");
  }
  const auto counts = label_counts(spec.count, spec.mix);
  std::vector<GripLabel> labels;
  labels.reserve(spec.count);
  labels.insert(labels.end(), counts[0], GripLabel::LeftThumb);
  labels.insert(labels.end(), counts[1], GripLabel::RightThumb);
  labels.insert(labels.end(), counts[2], GripLabel::IndexFinger);
  auto shuffle_rng = record_rng(spec.seed, ~std::uint64_t{0});
  std::shuffle(labels.begin(), labels.end(), shuffle_rng);

  std::vector<TraceRecord> out;
  out.reserve(spec.count);
  for (std::size_t i = 0; i < spec.count; ++i) {
    GeneratorParams params = spec.base;
    params.grip = labels[i];
    params.seed = spec.seed;
    auto rng = record_rng(spec.seed, i);
    constexpr int kAttempts = 32;
    for (int attempt = 0;; ++attempt) {
      try {
        TraceRecord rec = generate_swipe(params, rng);
        char id[48];
        std::snprintf(id, sizeof id, "syn-%llu-%05zu",
                      static_cast<unsigned long long>(spec.seed), i);
        rec.id = id;
        rec.params_digest = params_digest(params);
        out.push_back(std::move(rec));
        break;
      } catch (const BenchError& e) {
        if (e.kind() != BenchError::Kind::GeometryInfeasible ||
            attempt + 1 >= kAttempts) {
          throw;
        }
      }
    }
  }
  return out;
}

}  // namespace thumbside
