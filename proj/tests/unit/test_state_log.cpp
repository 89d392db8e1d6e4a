#include "doctest.h"

#include <random>
#include <sstream>

#include "airkit/errors.hpp"
#include "airkit/state_log.hpp"

using namespace airkit;

namespace {

HeartbeatRecord beat(std::int64_t t, BeatStatus s = BeatStatus::alive) { return {"vm-1", t, s}; }

double hours(std::int64_t seconds) { return static_cast<double>(seconds) / 3600.0; }

double total_hours(const MachineHistory& h) {
  double sum = 0.0;
  for (const auto& iv : h.intervals) sum += iv.duration_hours;
  return sum;
}

}  // namespace

TEST_CASE("gap longer than the threshold opens a DOWN interval") {
  const auto h = compress_heartbeats({beat(0), beat(300), beat(600), beat(2400)}, {300, 3.0}, {0, 3000});
  REQUIRE(h.intervals.size() == 3);
  CHECK(h.intervals[0].state == State::up);
  CHECK(h.intervals[0].duration_hours == doctest::Approx(hours(900)));
  CHECK(h.intervals[0].censored_at_start);
  CHECK_FALSE(h.intervals[0].censored_at_end);
  CHECK(h.intervals[1].state == State::down);
  CHECK(h.intervals[1].duration_hours == doctest::Approx(hours(1500)));
  CHECK_FALSE(h.intervals[1].censored());
  CHECK(h.intervals[2].state == State::up);
  CHECK(h.intervals[2].duration_hours == doctest::Approx(hours(600)));
  CHECK(h.intervals[2].censored_at_end);
  CHECK_FALSE(h.intervals[2].censored_at_start);
}

TEST_CASE("single beat filling the window is censored on both sides") {
  const auto h = compress_heartbeats({beat(0)}, {300, 3.0}, {0, 300});
  REQUIRE(h.intervals.size() == 1);
  CHECK(h.intervals[0].state == State::up);
  CHECK(h.intervals[0].duration_hours == doctest::Approx(hours(300)));
  CHECK(h.intervals[0].censored_at_start);
  CHECK(h.intervals[0].censored_at_end);
}

TEST_CASE("explicit DOWN beat forces a transition") {
  const auto h = compress_heartbeats({beat(0), beat(300, BeatStatus::down), beat(600)}, {300, 3.0}, {0, 900});
  REQUIRE(h.intervals.size() == 3);
  CHECK(h.intervals[0].state == State::up);
  CHECK(h.intervals[0].duration_hours == doctest::Approx(hours(300)));
  CHECK(h.intervals[1].state == State::down);
  CHECK(h.intervals[1].duration_hours == doctest::Approx(hours(300)));
  CHECK(h.intervals[2].state == State::up);
  CHECK(h.intervals[2].duration_hours == doctest::Approx(hours(300)));
  CHECK(h.intervals[2].censored_at_end);
}

TEST_CASE("a single dropped beat does not break an UP interval") {
  const auto h = compress_heartbeats({beat(0), beat(300), beat(900), beat(1200)}, {300, 3.0}, {0, 1500});
  REQUIRE(h.intervals.size() == 1);
  CHECK(h.intervals[0].duration_hours == doctest::Approx(hours(1500)));
}

TEST_CASE("leading and trailing silence become DOWN") {
  const auto h = compress_heartbeats({beat(3600), beat(3900)}, {300, 3.0}, {0, 7200});
  REQUIRE(h.intervals.size() == 3);
  CHECK(h.intervals[0].state == State::down);
  CHECK(h.intervals[0].duration_hours == doctest::Approx(1.0));
  CHECK(h.intervals[0].censored_at_start);
  CHECK(h.intervals[1].state == State::up);
  CHECK(h.intervals[1].duration_hours == doctest::Approx(hours(600)));
  CHECK(h.intervals[2].state == State::down);
  CHECK(h.intervals[2].censored_at_end);
}

TEST_CASE("no beats at all means DOWN for the whole window") {
  const auto h = compress_heartbeats({}, {300, 3.0}, {0, 3600});
  REQUIRE(h.intervals.size() == 1);
  CHECK(h.intervals[0].state == State::down);
  CHECK(h.intervals[0].censored_at_start);
  CHECK(h.intervals[0].censored_at_end);
}

TEST_CASE("unsorted heartbeats are rejected with the offending index") {
  try {
    compress_heartbeats({beat(0), beat(600), beat(300)}, {300, 3.0}, {0, 900});
    FAIL("expected rejection");
  } catch (const HeartbeatError& e) {
    CHECK(e.index() == 2);
  }
}

TEST_CASE("fleet compression reports indices into the mixed log") {
  std::vector<HeartbeatRecord> log{{"a", 0, BeatStatus::alive},
                                   {"b", 0, BeatStatus::alive},
                                   {"a", 300, BeatStatus::alive},
                                   {"b", 600, BeatStatus::alive},
                                   {"b", 300, BeatStatus::alive}};
  try {
    compress_fleet(log, {300, 3.0}, {0, 900});
    FAIL("expected rejection");
  } catch (const HeartbeatError& e) {
    CHECK(e.index() == 4);
  }
  log.pop_back();
  const auto fleet = compress_fleet(log, {300, 3.0}, {0, 900});
  REQUIRE(fleet.size() == 2);
  CHECK(fleet[0].machine_id == "a");
  CHECK(fleet[1].machine_id == "b");
}

TEST_CASE("bad options are rejected") {
  CHECK_THROWS_AS(compress_heartbeats({}, {0, 3.0}, {0, 10}), InvalidArgument);
  CHECK_THROWS_AS(compress_heartbeats({}, {300, 0.5}, {0, 10}), InvalidArgument);
  CHECK_THROWS_AS(compress_heartbeats({}, {300, 3.0}, {10, 10}), InvalidArgument);
}

TEST_CASE("validate_history") {
  auto iv = [](State s, double d) { return StateInterval{"m", s, d, false, false}; };
  CHECK(validate_history({"m", {iv(State::up, 2), iv(State::down, 1), iv(State::up, 3)}}).empty());

  const auto twice = validate_history({"m", {iv(State::up, 2), iv(State::up, 1)}});
  REQUIRE(twice.size() == 1);
  CHECK(twice[0] == Violation{1, ViolationRule::non_alternating});

  const auto negative = validate_history({"m", {iv(State::up, -1)}});
  REQUIRE(negative.size() == 1);
  CHECK(negative[0] == Violation{0, ViolationRule::negative_duration});

  const auto foreign = validate_history({"m", {iv(State::up, 1), StateInterval{"x", State::down, 1}}});
  REQUIRE(foreign.size() == 1);
  CHECK(foreign[0].rule == ViolationRule::machine_mismatch);
}

TEST_CASE("property: random logs compress to valid histories covering the window") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const std::int64_t period = 60 + static_cast<std::int64_t>(rng() % 600);
    const double gap = 1.0 + static_cast<double>(rng() % 5);
    const std::int64_t start = static_cast<std::int64_t>(rng() % 10000);
    const std::int64_t end = start + 1 + static_cast<std::int64_t>(rng() % 200000);
    std::vector<HeartbeatRecord> beats;
    std::int64_t t = start;
    while (true) {
      t += static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(period * 8));
      if (t >= end) break;
      beats.push_back(beat(t, rng() % 10 == 0 ? BeatStatus::down : BeatStatus::alive));
    }
    const auto h = compress_heartbeats(beats, {period, gap}, {start, end});
    CHECK(validate_history(h).empty());
    REQUIRE_FALSE(h.intervals.empty());
    CHECK(h.intervals.front().censored_at_start);
    CHECK(h.intervals.back().censored_at_end);
    for (std::size_t i = 1; i + 1 < h.intervals.size(); ++i) CHECK_FALSE(h.intervals[i].censored());
    CHECK(total_hours(h) == doctest::Approx(hours(end - start)).epsilon(1e-12));
  }
}

TEST_CASE("property: heartbeats synthesized from a history recompress to the same boundaries") {
  std::mt19937_64 rng(5);
  const std::int64_t period = 300;
  for (int trial = 0; trial < 200; ++trial) {
    // Boundaries on the heartbeat lattice; DOWN stretches long enough to exceed the gap threshold.
    std::vector<std::pair<State, std::int64_t>> truth;
    State s = rng() % 2 ? State::up : State::down;
    const int pieces = 1 + static_cast<int>(rng() % 8);
    for (int i = 0; i < pieces; ++i) {
      const std::int64_t beats = s == State::up ? 1 + static_cast<std::int64_t>(rng() % 40)
                                                : 4 + static_cast<std::int64_t>(rng() % 40);
      truth.emplace_back(s, beats * period);
      s = s == State::up ? State::down : State::up;
    }
    std::vector<HeartbeatRecord> log;
    std::int64_t t = 0;
    for (const auto& [state, length] : truth) {
      if (state == State::up)
        for (std::int64_t b = t; b < t + length; b += period) log.push_back(beat(b));
      t += length;
    }
    const auto h = compress_heartbeats(log, {period, 3.0}, {0, t});
    REQUIRE(h.intervals.size() == truth.size());
    std::int64_t expected = 0;
    double recovered = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      CHECK(h.intervals[i].state == truth[i].first);
      expected += truth[i].second;
      recovered += h.intervals[i].duration_hours;
      CHECK(std::abs(recovered - hours(expected)) <= hours(period));
    }
  }
}

TEST_CASE("heartbeat CSV parsing") {
  std::istringstream ok("machine_id,timestamp,status\nvm-1,0,ALIVE\nvm-1,300,DOWN\n");
  const auto records = read_heartbeat_csv(ok);
  REQUIRE(records.size() == 2);
  CHECK(records[1].status == BeatStatus::down);
  CHECK(records[1].timestamp == 300);

  std::istringstream unknown("machine_id,timestamp,status\nvm-1,0,SLEEPING\n");
  CHECK_THROWS_AS(read_heartbeat_csv(unknown), InvalidArgument);
  std::istringstream headerless("vm-1,0,ALIVE\n");
  CHECK_THROWS_AS(read_heartbeat_csv(headerless), InvalidArgument);
  std::istringstream negative("machine_id,timestamp,status\nvm-1,-5,ALIVE\n");
  CHECK_THROWS_AS(read_heartbeat_csv(negative), InvalidArgument);
}

TEST_CASE("state CSV round trip keeps censoring sides") {
  const auto h = compress_heartbeats({beat(0), beat(300), beat(600), beat(2400)}, {300, 3.0}, {0, 3000});
  std::ostringstream out;
  write_state_csv(out, {h});
  CHECK(out.str().rfind("machine_id,state,duration_hours,censored\n", 0) == 0);
  std::istringstream in(out.str());
  const auto back = read_state_csv(in);
  REQUIRE(back.size() == 1);
  REQUIRE(back[0].intervals.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(back[0].intervals[i].state == h.intervals[i].state);
    CHECK(back[0].intervals[i].duration_hours == doctest::Approx(h.intervals[i].duration_hours).epsilon(1e-11));
    CHECK(back[0].intervals[i].censored_at_start == h.intervals[i].censored_at_start);
    CHECK(back[0].intervals[i].censored_at_end == h.intervals[i].censored_at_end);
  }

  std::istringstream bad("machine_id,state,duration_hours,censored\nm,UP,1,2\n");
  CHECK_THROWS_AS(read_state_csv(bad), InvalidArgument);
  std::istringstream bad_state("machine_id,state,duration_hours,censored\nm,SIDEWAYS,1,0\n");
  CHECK_THROWS_AS(read_state_csv(bad_state), InvalidArgument);
}
