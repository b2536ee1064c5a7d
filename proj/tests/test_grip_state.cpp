#include <random>
#include <thread>
#include <vector>

#include "doctest.h"
#include "thumbside/grip_state.hpp"

using namespace thumbside;

namespace {

constexpr auto L = Handedness::LeftThumb;
constexpr auto R = Handedness::RightThumb;
constexpr auto A = Handedness::Ambiguous;

struct Recorder {
  std::vector<GripEvent> events;
  GripStore::Subscription sub;

  explicit Recorder(GripStore& store)
      : sub(store.subscribe([this](const GripEvent& e) { events.push_back(e); })) {}
};

}  // namespace

TEST_CASE("fresh store is Unknown and polling is side-effect free") {
  GripStore store;
  CHECK(store.current_state() == GripState::Unknown);
  CHECK(store.current_state() == store.current_state());
}

TEST_CASE("two right decisions leave Unknown") {
  GripStore store;
  Recorder rec(store);
  CHECK_FALSE(store.ingest_label(R, 10));
  auto e = store.ingest_label(R, 20);
  REQUIRE(e);
  CHECK(*e == GripEvent{GripState::Unknown, GripState::RightThumb,
                        GripCause::SwipeEvidence, 20});
  CHECK(store.current_state() == GripState::RightThumb);
  REQUIRE(rec.events.size() == 1);
  CHECK(rec.events[0] == *e);
}

TEST_CASE("hysteresis between thumbs") {
  GripStore store;
  store.apply_hint(GripHint::UnlockRight, 0);
  Recorder rec(store);
  CHECK_FALSE(store.ingest_label(L, 10));
  CHECK(store.current_state() == GripState::RightThumb);
  auto e = store.ingest_label(L, 20);
  REQUIRE(e);
  CHECK(e->previous == GripState::RightThumb);
  CHECK(e->current == GripState::LeftThumb);
  CHECK(rec.events.size() == 1);

  SUBCASE("an agreeing decision breaks an opposing run") {
    store.ingest_label(R, 30);
    store.ingest_label(L, 40);
    store.ingest_label(R, 50);
    CHECK(store.current_state() == GripState::LeftThumb);
  }
}

TEST_CASE("ambiguous decisions never flip the state") {
  GripStore store;
  store.apply_hint(GripHint::UnlockRight, 0);
  Recorder rec(store);
  for (int i = 0; i < 10; ++i) CHECK_FALSE(store.ingest_label(A, 10.0 * i));
  CHECK(store.current_state() == GripState::RightThumb);
  CHECK(rec.events.empty());
}

TEST_CASE("ambiguous policy: hold keeps the run, decay resets it") {
  SUBCASE("hold") {
    GripStore store({2, AmbiguousPolicy::Hold, 120000});
    store.ingest_label(L, 0);
    store.ingest_label(A, 1);
    CHECK(store.ingest_label(L, 2));
  }
  SUBCASE("decay") {
    GripStore store({2, AmbiguousPolicy::Decay, 120000});
    store.ingest_label(L, 0);
    store.ingest_label(A, 1);
    CHECK_FALSE(store.ingest_label(L, 2));
    CHECK(store.ingest_label(L, 3));
  }
}

TEST_CASE("flip_count of one follows every swipe") {
  GripStore store({1, AmbiguousPolicy::Hold, 120000});
  CHECK(store.ingest_label(L, 0));
  CHECK(store.ingest_label(R, 1));
  CHECK(store.ingest_label(L, 2));
  CHECK_FALSE(store.ingest_label(L, 3));
  CHECK_THROWS_AS(GripStore({0, AmbiguousPolicy::Hold, 1}), std::invalid_argument);
}

TEST_CASE("hints") {
  GripStore store;
  Recorder rec(store);

  auto e = store.apply_hint(GripHint::Lock, 0);
  REQUIRE(e);
  CHECK(e->cause == GripCause::LockHint);
  CHECK(store.current_state() == GripState::Locked);

  SUBCASE("unlock right bypasses hysteresis") {
    e = store.apply_hint(GripHint::UnlockRight, 5);
    REQUIRE(e);
    CHECK(*e == GripEvent{GripState::Locked, GripState::RightThumb,
                          GripCause::UnlockHint, 5});
    CHECK(store.apply_hint(GripHint::Lock, 6)->current == GripState::Locked);
    CHECK(rec.events.size() == 3);
  }
  SUBCASE("evidence hints are rejected while locked") {
    for (auto h : {GripHint::SurfaceHint, GripHint::CradledHint,
                   GripHint::TwoThumbsHint}) {
      try {
        store.apply_hint(h, 1);
        FAIL("expected HintWhileLocked");
      } catch (const GripError& err) {
        CHECK(err.kind() == GripError::Kind::HintWhileLocked);
      }
    }
    CHECK(store.current_state() == GripState::Locked);
    CHECK(rec.events.size() == 1);
  }
  SUBCASE("decisions while locked are ignored") {
    CHECK_FALSE(store.ingest_label(R, 1));
    CHECK_FALSE(store.ingest_label(R, 2));
    CHECK(store.current_state() == GripState::Locked);
  }
  SUBCASE("unknown unlock then external hints") {
    CHECK(store.apply_hint(GripHint::UnlockUnknown, 1)->current == GripState::Unknown);
    CHECK(store.apply_hint(GripHint::SurfaceHint, 2)->current == GripState::Surface);
    CHECK(store.apply_hint(GripHint::CradledHint, 3)->current == GripState::Cradled);
    CHECK(store.apply_hint(GripHint::TwoThumbsHint, 4)->cause == GripCause::ExternalHint);
    CHECK_FALSE(store.apply_hint(GripHint::TwoThumbsHint, 5));
    store.ingest_label(L, 6);
    CHECK(store.ingest_label(L, 7)->previous == GripState::TwoThumbs);
  }
  SUBCASE("repeated lock is not an event") {
    CHECK_FALSE(store.apply_hint(GripHint::Lock, 1));
  }
}

TEST_CASE("session timeout reverts to Unknown") {
  GripStore store({2, AmbiguousPolicy::Hold, 1000});
  Recorder rec(store);
  store.apply_hint(GripHint::UnlockLeft, 0);
  CHECK_FALSE(store.tick(1000));
  auto e = store.tick(1001);
  REQUIRE(e);
  CHECK(e->cause == GripCause::Timeout);
  CHECK(store.current_state() == GripState::Unknown);

  store.apply_hint(GripHint::UnlockLeft, 2000);
  // A late swipe first expires the session, then counts as fresh evidence.
  store.ingest_label(R, 5000);
  CHECK(store.current_state() == GripState::Unknown);
  CHECK(store.ingest_label(R, 5100)->current == GripState::RightThumb);
  CHECK(rec.events.back().previous == GripState::Unknown);
}

TEST_CASE("subscription fan-out, no replay, unsubscribe") {
  GripStore store;
  Recorder first(store);
  Recorder second(store);
  store.apply_hint(GripHint::UnlockLeft, 1);
  REQUIRE(first.events.size() == 1);
  CHECK(first.events == second.events);

  Recorder late(store);
  CHECK(late.events.empty());
  second.sub.reset();
  store.apply_hint(GripHint::UnlockRight, 2);
  CHECK(first.events.size() == 2);
  CHECK(second.events.size() == 1);
  CHECK(late.events.size() == 1);
}

TEST_CASE("a sink may call back into the store") {
  GripStore store;
  std::vector<GripEvent> seen;
  auto sub = store.subscribe([&](const GripEvent& e) {
    seen.push_back(e);
    if (e.current == GripState::RightThumb) store.apply_hint(GripHint::Lock, e.at + 1);
  });
  store.apply_hint(GripHint::UnlockRight, 0);
  REQUIRE(seen.size() == 2);
  CHECK(seen[1].previous == GripState::RightThumb);
  CHECK(seen[1].current == GripState::Locked);
}

namespace {

struct Step {
  bool is_hint = false;
  GripHint hint = GripHint::Lock;
  Handedness label = A;
};

std::vector<Step> random_script(std::mt19937_64& rng, int length) {
  std::uniform_int_distribution<int> pick(0, 99);
  std::vector<Step> out;
  for (int i = 0; i < length; ++i) {
    const int p = pick(rng);
    Step s;
    if (p < 10) {
      s.is_hint = true;
      s.hint = static_cast<GripHint>(pick(rng) % 7);
    } else {
      s.label = p < 50 ? L : p < 85 ? R : A;
    }
    out.push_back(s);
  }
  return out;
}

std::vector<GripEvent> run_script(const std::vector<Step>& script,
                                  const HysteresisConfig& cfg,
                                  GripState* final_state) {
  GripStore store(cfg);
  std::vector<GripEvent> events;
  auto sub = store.subscribe([&](const GripEvent& e) { events.push_back(e); });
  double t = 0;
  for (const auto& s : script) {
    t += 100;
    const GripState before = store.current_state();
    std::optional<GripEvent> e;
    if (s.is_hint) {
      try {
        e = store.apply_hint(s.hint, t);
      } catch (const GripError&) {
        CHECK(before == GripState::Locked);
      }
    } else {
      e = store.ingest_label(s.label, t);
    }
    // An event is returned exactly when the polled state changed.
    CHECK(e.has_value() == (store.current_state() != before));
    if (e) {
      CHECK(e->previous == before);
      CHECK(e->current == store.current_state());
    }
  }
  if (final_state) *final_state = store.current_state();
  return events;
}

}  // namespace

TEST_CASE("property: chaining, no spurious events, determinism") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const auto script = random_script(rng, 60);
    const HysteresisConfig cfg{1 + trial % 3,
                               trial % 2 ? AmbiguousPolicy::Decay : AmbiguousPolicy::Hold,
                               120000};
    GripState s1{}, s2{};
    const auto a = run_script(script, cfg, &s1);
    const auto b = run_script(script, cfg, &s2);
    CHECK(a == b);
    CHECK(s1 == s2);
    GripState prev = GripState::Unknown;
    for (const auto& e : a) {
      CHECK(e.previous != e.current);
      CHECK(e.previous == prev);
      prev = e.current;
    }
    CHECK(prev == s1);
  }
}

TEST_CASE("property: fewer than flip_count opposing decisions never flip") {
  for (int flip = 1; flip <= 5; ++flip) {
    for (GripHint start : {GripHint::UnlockLeft, GripHint::UnlockRight}) {
      GripStore store({flip, AmbiguousPolicy::Hold, 120000});
      store.apply_hint(start, 0);
      const GripState s = store.current_state();
      const Handedness opposing = s == GripState::LeftThumb ? R : L;
      for (int i = 1; i < flip; ++i) {
        CHECK_FALSE(store.ingest_label(opposing, i));
        store.ingest_label(A, i + 0.5);
      }
      CHECK(store.current_state() == s);
      CHECK(store.ingest_label(opposing, flip).has_value());
    }
  }
}

TEST_CASE("concurrent writers deliver a chained sequence") {
  GripStore store({1, AmbiguousPolicy::Hold, 1e12});
  std::mutex mu;
  std::vector<GripEvent> events;
  auto sub = store.subscribe([&](const GripEvent& e) {
    std::lock_guard lock(mu);
    events.push_back(e);
  });
  std::vector<std::thread> writers;
  for (int w = 0; w < 4; ++w) {
    writers.emplace_back([&store, w] {
      for (int i = 0; i < 500; ++i) {
        store.ingest_label((i + w) % 2 ? L : R, i);
        (void)store.current_state();
      }
    });
  }
  for (auto& t : writers) t.join();
  REQUIRE_FALSE(events.empty());
  GripState prev = GripState::Unknown;
  for (const auto& e : events) {
    CHECK(e.previous == prev);
    prev = e.current;
  }
  CHECK(prev == store.current_state());
}
