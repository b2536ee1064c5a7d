#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "doctest.h"
#include "thumbside/synth_bench.hpp"

using namespace thumbside;

namespace {

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() /
         ("thumbside_test_" + std::to_string(::getpid()) + "_" + name);
}

Handedness classify(const SwipeTrace& t, const ClassifierConfig& cfg = {}) {
  return classify_fit(fit_quadratic(t), cfg).label;
}

}  // namespace

TEST_CASE("noiseless thumb arcs curve toward the grip side") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    GeneratorParams p;
    p.noise_sigma = 0.0;
    p.seed = seed;
    p.grip = GripLabel::RightThumb;
    const auto right = generate_swipe(p);
    CHECK(fit_quadratic(right.trace).c > 0.0);
    CHECK(classify(right.trace) == Handedness::RightThumb);
    p.grip = GripLabel::LeftThumb;
    const auto left = generate_swipe(p);
    CHECK(fit_quadratic(left.trace).c < 0.0);
    CHECK(classify(left.trace) == Handedness::LeftThumb);
  }
}

TEST_CASE("label soundness across the thumb-length range") {
  GeneratorParams p;
  p.noise_sigma = 0.0;
  int n = 0;
  for (double length = p.thumb_length_min_px(); length <= p.thumb_length_max_px();
       length += 8.0) {
    for (auto grip : {GripLabel::LeftThumb, GripLabel::RightThumb}) {
      for (std::uint64_t seed = 0; seed < 20; ++seed) {
        p.thumb_length = length;
        p.grip = grip;
        p.seed = seed;
        const auto rec = generate_swipe(p);
        REQUIRE_FALSE(validate_trace(rec.trace));
        const auto want = grip == GripLabel::LeftThumb ? Handedness::LeftThumb
                                                       : Handedness::RightThumb;
        CHECK(classify(rec.trace) == want);
        ++n;
      }
    }
  }
  CHECK(n > 400);
}

TEST_CASE("straight index swipes are ambiguous") {
  GeneratorParams p;
  p.grip = GripLabel::IndexFinger;
  p.noise_sigma = 0.0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    p.seed = seed;
    const auto fit = fit_quadratic(generate_swipe(p).trace);
    CHECK(std::abs(fit.c) < ClassifierConfig{}.epsilon_c);
    CHECK(classify_fit(fit).label == Handedness::Ambiguous);
  }

  SUBCASE("default dead zone absorbs realistic jitter") {
    p.noise_sigma = 2.0;
    int ambiguous = 0;
    constexpr int kTrials = 1000;
    for (int i = 0; i < kTrials; ++i) {
      auto rng = record_rng(123, i);
      const auto rec = generate_swipe(p, rng);
      if (classify(rec.trace) == Handedness::Ambiguous) ++ambiguous;
    }
    CHECK(ambiguous >= 0.95 * kTrials);
  }
}

TEST_CASE("generation is deterministic") {
  GeneratorParams p;
  p.seed = 9;
  CHECK(generate_swipe(p) == generate_swipe(p));
  CHECK(record_to_json(generate_swipe(p)).dump() ==
        record_to_json(generate_swipe(p)).dump());
  auto q = p;
  q.seed = 10;
  CHECK_FALSE(generate_swipe(p).trace == generate_swipe(q).trace);
}

TEST_CASE("generated traces are monotone in time and on screen") {
  GeneratorParams p;
  p.noise_sigma = 8.0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    p.seed = seed;
    p.grip = static_cast<GripLabel>(seed % 3);
    const auto rec = generate_swipe(p);
    REQUIRE(rec.trace.size() >= 15);
    REQUIRE(rec.trace.size() <= 45);
    for (std::size_t i = 0; i < rec.trace.size(); ++i) {
      const auto& s = rec.trace[i];
      CHECK(s.x >= 0.0);
      CHECK(s.x <= p.screen_w);
      CHECK(s.y >= 0.0);
      CHECK(s.y <= p.screen_h);
      if (i > 0) CHECK(s.t > rec.trace[i - 1].t);
    }
  }
}

TEST_CASE("mirror duality: left with mirrored anchor is the mirrored right") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    GeneratorParams right;
    right.seed = seed;
    right.grip = GripLabel::RightThumb;
    right.anchor = Point{500.0 + seed % 7, 700.0 - seed};
    right.noise_sigma = seed % 2 ? 2.0 : 0.0;
    auto left = right;
    left.grip = GripLabel::LeftThumb;
    left.anchor = Point{right.screen_w - right.anchor->x, right.anchor->y};

    const auto r = generate_swipe(right);
    const auto l = generate_swipe(left);
    const auto mirrored = mirror_trace(r.trace, right.screen_w);
    REQUIRE(l.trace.size() == mirrored.size());
    for (std::size_t i = 0; i < mirrored.size(); ++i) {
      CHECK(std::abs(l.trace[i].x - mirrored[i].x) <= 1e-9);
      CHECK(l.trace[i].y == mirrored[i].y);
      CHECK(l.trace[i].t == mirrored[i].t);
    }
  }
}

TEST_CASE("infeasible geometry is reported") {
  GeneratorParams p;
  p.anchor = Point{5000.0, 480.0};
  try {
    (void)generate_swipe(p);
    FAIL("expected GeometryInfeasible");
  } catch (const BenchError& e) {
    CHECK(e.kind() == BenchError::Kind::GeometryInfeasible);
  }
  p.anchor.reset();
  p.screen_w = -1;
  CHECK_THROWS_AS((void)generate_swipe(p), std::invalid_argument);
}

TEST_CASE("corpus label proportions are exact") {
  CorpusSpec spec;
  spec.count = 800;
  spec.mix = {0.5, 0.5, 0.0};
  spec.seed = 42;
  auto corpus = generate_corpus(spec);
  REQUIRE(corpus.size() == 800);
  std::array<int, 3> counts{};
  for (const auto& r : corpus) counts[static_cast<int>(*r.label)]++;
  CHECK(counts == std::array<int, 3>{400, 400, 0});

  CHECK(label_counts(1400, parse_grip_mix("left=0.45,right=0.45,index=0.1")) ==
        std::array<std::size_t, 3>{630, 630, 140});
  CHECK(label_counts(7, {1, 1, 1}) == std::array<std::size_t, 3>{3, 2, 2});
  CHECK_THROWS_AS(parse_grip_mix("left=0.5,thumb=0.5"), BenchError);
  CHECK_THROWS_AS(parse_grip_mix("left=abc"), BenchError);
  spec.count = 0;
  CHECK_THROWS_AS(generate_corpus(spec), BenchError);
}

TEST_CASE("corpus regeneration is byte identical") {
  CorpusSpec spec;
  spec.count = 60;
  spec.mix = {0.45, 0.45, 0.1};
  spec.seed = 7;
  const auto a = write_corpus_string(generate_corpus(spec));
  const auto b = write_corpus_string(generate_corpus(spec));
  CHECK(a == b);
  spec.seed = 8;
  CHECK(a != write_corpus_string(generate_corpus(spec)));
}

TEST_CASE("corpus files round trip and keep unknown fields") {
  CorpusSpec spec;
  spec.count = 10;
  spec.seed = 3;
  auto records = generate_corpus(spec);
  records[2].extra["device"] = "pixel";
  records[2].extra["session"] = {{"user", 4}};
  records[5].label.reset();

  const auto path = temp_file("roundtrip.jsonl");
  write_corpus(records, path);
  const auto back = read_corpus(path);
  CHECK(back == records);
  CHECK(back[2].extra["device"] == "pixel");
  std::filesystem::remove(path);
}

TEST_CASE("empty and malformed corpora") {
  const auto path = temp_file("bad.jsonl");
  {
    std::ofstream out(path);
  }
  CHECK(read_corpus(path).empty());
  CHECK_THROWS_AS(evaluate_corpus(path), BenchError);

  {
    std::ofstream out(path);
    out << R"({"schema":1,"id":"ok","label":"left_thumb","samples":[[1,2,3]]})" << "\n";
    out << "not json\n";
    out << R"({"schema":1,"id":"bad","label":"left_thumb","samples":[[1,"y",3]]})" << "\n";
  }
  const auto scan = scan_corpus(path);
  CHECK(scan.records.size() == 1);
  REQUIRE(scan.malformed.size() == 2);
  CHECK(scan.malformed[0].line == 2);
  CHECK(scan.malformed[1].line == 3);
  CHECK(scan.malformed[1].message.find("'bad'") != std::string::npos);
  CHECK(scan.malformed[1].message.find("samples[0][1]") != std::string::npos);
  CHECK_THROWS_AS(read_corpus(path), BenchError);

  const auto report = evaluate_corpus(path);
  CHECK(report.total == 1);
  CHECK(report.malformed == 2);
  CHECK(report.rejected == 1);
  std::filesystem::remove(path);
}

TEST_CASE("unlabeled records stop evaluation") {
  CorpusSpec spec;
  spec.count = 4;
  auto records = generate_corpus(spec);
  records[1].label.reset();
  try {
    (void)evaluate(records);
    FAIL("expected UnlabeledRecord");
  } catch (const BenchError& e) {
    CHECK(e.kind() == BenchError::Kind::UnlabeledRecord);
  }
}

TEST_CASE("noiseless corpus scores perfectly") {
  CorpusSpec spec;
  spec.count = 300;
  spec.mix = {0.45, 0.45, 0.1};
  spec.base.noise_sigma = 0.0;
  spec.seed = 11;
  const auto report = evaluate(generate_corpus(spec));
  CHECK(report.accuracy == 1.0);
  CHECK(report.sign_consistency == 1.0);
  CHECK(report.correct + report.ambiguous + report.misclassified == report.total);
  CHECK(report.confusion[2][2] == 30);
}

TEST_CASE("report invariants and determinism") {
  CorpusSpec spec;
  spec.count = 500;
  spec.mix = {0.4, 0.4, 0.2};
  spec.base.noise_sigma = 6.0;
  spec.seed = 5;
  const auto corpus = generate_corpus(spec);
  const auto a = evaluate(corpus);
  const auto b = evaluate(corpus);
  CHECK(a == b);
  CHECK(a.correct + a.ambiguous + a.misclassified == a.total);
  std::size_t sum = 0;
  for (const auto& row : a.confusion) {
    for (auto v : row) sum += v;
  }
  CHECK(sum == a.total);
  for (double rate : {a.accuracy, a.strict_accuracy, a.sign_consistency,
                      a.mean_r2, a.r2_at_least_0_9}) {
    CHECK(rate >= 0.0);
    CHECK(rate <= 1.0);
  }
  CHECK(to_json(a)["confusion"]["index_finger"]["ambiguous"] == a.confusion[2][2]);
  CHECK(format_table(a).find("sign_consistency") != std::string::npos);
}

TEST_CASE("accuracy degrades monotonically with noise") {
  double prev_accuracy = 1.0;
  double prev_strict = 1.0;
  for (double sigma : {0.0, 1.0, 2.0, 4.0, 8.0}) {
    CorpusSpec spec;
    spec.count = 600;
    spec.mix = {0.5, 0.5, 0.0};
    spec.base.noise_sigma = sigma;
    spec.seed = 2024;
    const auto r = evaluate(generate_corpus(spec));
    CAPTURE(sigma);
    CHECK(r.accuracy <= prev_accuracy);
    CHECK(r.strict_accuracy <= prev_strict);
    prev_accuracy = r.accuracy;
    prev_strict = r.strict_accuracy;
  }
}
