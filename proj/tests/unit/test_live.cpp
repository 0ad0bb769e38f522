#include <doctest.h>

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "onevision/sim/live.hpp"

using namespace onevision;
using namespace onevision::sim;

namespace {

LiveEvent steer(double accel, double rate) { return {0, LiveEventKind::Steer, accel, rate}; }
LiveEvent formation(controllers::FormationId id) { return {0, LiveEventKind::Formation, 0.0, 0.0, id}; }

}  // namespace

TEST_CASE("a live session replays bit-exactly from its event log") {
  const RunConfig c;
  LiveSession s(c);
  for (Tick t = 0; t < 700; ++t) {
    if (t == 5) s.submit(steer(0.8, 0.0));
    if (t == 150) s.submit(steer(0.0, 0.3));
    if (t == 151) s.submit(steer(0.0, 0.35));
    if (t == 320) s.submit(formation(controllers::FormationId::Circle));
    if (t == 600) s.submit({0, LiveEventKind::Disconnect});
    s.step();
  }
  REQUIRE(s.events().size() == 5);
  CHECK(s.events()[2].tick == 151);
  const auto replayed = LiveSession::replay(c, s.events(), s.now());
  CHECK(replayed.x == s.trajectory().x);
  CHECK(replayed.u == s.trajectory().u);
  CHECK(replayed.z == s.trajectory().z);
  CHECK(s.diagnostics().causality_violations == 0);
}

TEST_CASE("steer latency to the leader actuation is bounded by sensing, one control period and actuation") {
  const RunConfig c;
  const auto d = c.delays();
  const Tick first_at = 200, span = 260;
  LiveSession base(c);
  for (Tick t = 0; t < span; ++t) base.step();
  Tick worst = 0, best = span;
  for (Tick at = first_at; at < first_at + d.control_interval(); ++at) {
    LiveSession s(c);
    for (Tick t = 0; t < span; ++t) {
      if (t == at) s.submit(steer(1.0, 0.0));
      s.step();
    }
    Tick first = -1;
    for (Tick t = 0; t < span && first < 0; ++t) {
      if (base.trajectory().u.at(t)[0] != s.trajectory().u.at(t)[0]) first = t;
    }
    REQUIRE(first >= at);
    worst = std::max(worst, first - at);
    best = std::min(best, first - at);
  }
  // The command reaches the leader as an observation, so it is sensed T^x late.
  CHECK(best >= d.act());
  CHECK(worst <= d.obs() + d.control_interval() + d.act());
  MESSAGE("steer latency " << best << " to " << worst << " ticks");
}

TEST_CASE("a formation switch recovers below twice the pre-switch deviation within ten seconds") {
  const RunConfig c;
  LiveSession s(c);
  const Tick switch_at = 800;
  double before = 0.0, peak = 0.0;
  Tick recovered = -1;
  for (Tick t = 0; t < switch_at + 1000; ++t) {
    if (t == 10) s.submit(steer(0.5, 0.0));
    if (t == 210) s.submit(steer(0.0, 0.0));
    if (t == switch_at) s.submit(formation(controllers::FormationId::Line));
    s.step();
    const double dev = s.avg_deviation();
    if (t >= switch_at - 200 && t < switch_at) before = std::max(before, dev);
    if (t >= switch_at) peak = std::max(peak, dev);
    if (t >= switch_at + 100 && recovered < 0 && dev < 2.0 * before) recovered = t;
  }
  CHECK(peak > 5.0 * before);
  REQUIRE(recovered > 0);
  CHECK(recovered - switch_at <= 1000);
}

TEST_CASE("a disconnect ramps the commanded speed to zero over half a second") {
  const RunConfig c;
  LiveSession s(c);
  s.submit(steer(2.0, 0.0));
  for (int k = 0; k < 150; ++k) s.step();
  CHECK(s.command().speed == doctest::Approx(2.0));
  s.submit({0, LiveEventKind::Disconnect});
  s.step();
  CHECK(s.command().speed == doctest::Approx(2.0 * 49.0 / 50.0));
  for (int k = 0; k < 24; ++k) s.step();
  CHECK(s.command().speed == doctest::Approx(1.0));
  for (int k = 0; k < 25; ++k) s.step();
  CHECK(s.command().speed == 0.0);
  for (int k = 0; k < 20; ++k) s.step();
  CHECK(s.command().speed == 0.0);
}

TEST_CASE("an idle session stays at rest in formation") {
  const RunConfig c;
  LiveSession s(c);
  for (int k = 0; k < 300; ++k) s.step();
  CHECK(s.command().speed == 0.0);
  CHECK(s.avg_deviation() < 0.05);
  const auto frame = nlohmann::json::parse(s.frame_json());
  CHECK(frame["t"] == 300);
  CHECK(frame["cars"].size() == 4);
  CHECK(frame["refs"].size() == 3);
  CHECK(frame["formation"] == "triangle");
  CHECK(frame["metrics"]["avg_deviation"].get<double>() == doctest::Approx(s.avg_deviation()));
}

TEST_CASE("client messages parse or fail cleanly") {
  const auto s = parse_client_message(R"({"type":"steer","accel":0.5,"steer_rate":-0.2})");
  REQUIRE(s);
  CHECK(s->kind == LiveEventKind::Steer);
  CHECK(s->accel == 0.5);
  CHECK(s->steer_rate == -0.2);
  const auto f = parse_client_message(R"({"type":"formation","id":"circle"})");
  REQUIRE(f);
  CHECK(f->formation == controllers::FormationId::Circle);
  CHECK_FALSE(parse_client_message(R"({"type":"ping"})"));
  CHECK_THROWS_AS(parse_client_message("{"), std::invalid_argument);
  CHECK_THROWS_AS(parse_client_message(R"({"accel":1})"), std::invalid_argument);
  CHECK_THROWS_AS(parse_client_message(R"({"type":"steer","accel":"fast"})"), std::invalid_argument);
  CHECK_THROWS_AS(parse_client_message(R"({"type":"formation","id":"square"})"), std::invalid_argument);
  CHECK_THROWS_AS(parse_client_message(R"({"type":"formation"})"), std::invalid_argument);
}
