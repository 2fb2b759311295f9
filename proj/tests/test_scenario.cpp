#include <catch2/catch_amalgamated.hpp>
#include <cstdio>

#include "mclear/scenario.hpp"

using namespace mclear;

namespace {

const char* kMinimal = R"JSON({
  "config": {"T": 1, "phi": 0.0, "theta_limit": 0.5, "slack_bus": "b1"},
  "buses": ["b1", "b2"],
  "lines": [{"id": "l1", "from": "b1", "to": "b2", "reactance": 0.25, "fmax": 500.0}],
  "generators": [{
    "id": "g1", "bus": "b1", "lambda": 50.0, "c_su": 1000.0, "c_rp": 1.0,
    "ru": 30.0, "rd": 25.0, "gmin": 0.0, "gmax": 100.0, "dmin": 1, "umin": 1,
    "reserve_capable": true, "z0": 1, "g0": 40.0, "t_on": 0, "t_off": 0}],
  "demands": [{"bus": "b2",
    "series": [{"qbar": 100.0, "qmin": 85.0, "ph": 40.0, "pl": 20.0}]}]
})JSON";

std::string data_path(const char* f) {
  return std::string(MCLEAR_DATA_DIR) + "/" + f;
}

}  // namespace

TEST_CASE("load: minimal two-bus instance") {
  Scenario s = load_scenario_text(kMinimal, "minimal");
  CHECK(s.network.buses.size() == 2);
  CHECK(s.network.lines.size() == 1);
  CHECK(s.network.lines[0].susceptance == Catch::Approx(4.0));
  CHECK(s.generators.size() == 1);
  CHECK(s.demands.size() == 1);
  // derived curve populated
  CHECK(s.demands[0].periods[0].curve.slope == Catch::Approx(4.0 / 3.0));
}

TEST_CASE("load: defaults fill reserve cost, shutdown cost, start/stop rates") {
  Scenario s = load_scenario_text(kMinimal, "minimal");
  const auto& g = s.generators[0];
  CHECK(g.reserve_cost == Catch::Approx(20.0));    // 0.4 * 50
  CHECK(g.shutdown_cost == Catch::Approx(200.0));  // 0.2 * 1000
  CHECK(g.startup_rate == Catch::Approx(30.0));    // ru
  CHECK(g.shutdown_rate == Catch::Approx(25.0));   // rd
}

TEST_CASE("load: errors carry field paths") {
  {
    std::string bad = kMinimal;
    auto pos = bad.find("\"to\": \"b2\"");
    bad.replace(pos, 10, "\"to\": \"b9\"");
    try {
      load_scenario_text(bad);
      FAIL("expected a validation error");
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find("lines[0].to") != std::string::npos);
      CHECK(std::string(e.what()).find("l1") != std::string::npos);
    }
  }
  {
    std::string bad = kMinimal;
    auto pos = bad.find("\"qbar\": 100.0");
    bad.replace(pos, 13, "\"qbar\": 85.0");
    CHECK_THROWS_AS(load_scenario_text(bad), Error);  // qbar == qmin
  }
  {
    std::string bad = kMinimal;
    auto pos = bad.find("\"phi\": 0.0");
    bad.replace(pos, 10, "\"phi\": 0.05");
    std::string off = bad;
    auto rpos = off.find("\"reserve_capable\": true");
    off.replace(rpos, 23, "\"reserve_capable\": false");
    CHECK_THROWS_AS(load_scenario_text(off), Error);  // phi > 0 without reserves
  }
  CHECK_THROWS_AS(load_scenario_text("{ not json"), Error);
  CHECK_THROWS_AS(load_scenario("/nonexistent/path.json"), Error);
}

TEST_CASE("susceptance: reciprocal with a division guard") {
  CHECK(derive_susceptance(0.25) == Catch::Approx(4.0));
  CHECK(derive_susceptance(1.0) == Catch::Approx(1.0));
  CHECK_THROWS_AS(derive_susceptance(0.0), Error);
  CHECK_THROWS_AS(derive_susceptance(-2.0), Error);
}

TEST_CASE("scale: identity, capacity scaling, and composition") {
  Scenario s = load_scenario_text(kMinimal, "minimal");
  Scenario same = scale_scenario(s, 1.0, 100.0, 100.0);
  CHECK(scenario_io::to_json(same).dump() == scenario_io::to_json(s).dump());

  Scenario f60 = scale_scenario(s, 1.0, 60.0, 100.0);
  CHECK(f60.network.lines[0].fmax == Catch::Approx(300.0));

  Scenario chained = scale_scenario(scale_scenario(s, 1.0, 80.0, 100.0), 1.0, 50.0, 100.0);
  Scenario direct = scale_scenario(s, 1.0, 40.0, 100.0);
  CHECK(chained.network.lines[0].fmax == Catch::Approx(direct.network.lines[0].fmax));

  Scenario h12 = scale_scenario(s, 1.2, 100.0, 100.0);
  CHECK(h12.floor(h12.demands[0].periods[0]) == Catch::Approx(102.0));
  // curves untouched
  CHECK(h12.demands[0].periods[0].curve.slope == Catch::Approx(4.0 / 3.0));

  Scenario g70 = scale_scenario(s, 1.0, 100.0, 70.0);
  CHECK(g70.generators[0].gmax == Catch::Approx(70.0));

  CHECK_THROWS_AS(scale_scenario(s, -1.0, 100.0, 100.0), Error);
}

TEST_CASE("scale: floor crossing qbar emits a warning, not an error") {
  Scenario s = load_scenario_text(kMinimal, "minimal");
  Scenario h13 = scale_scenario(s, 1.3, 100.0, 100.0);  // 110.5 > 100
  CHECK_FALSE(h13.warnings.empty());
  CHECK(s.warnings.empty());
}

TEST_CASE("round trip: save then load is a fixed point") {
  Scenario s = load_scenario(data_path("desk.json"));
  std::string tmp = "/tmp/mclear_roundtrip.json";
  save_scenario(s, tmp);
  Scenario s2 = load_scenario(tmp);
  CHECK(scenario_io::to_json(s).dump() == scenario_io::to_json(s2).dump());
  std::remove(tmp.c_str());
}

TEST_CASE("bundled instances load and have the published shape") {
  Scenario desk = load_scenario(data_path("desk.json"));
  CHECK(desk.network.buses.size() == 3);
  CHECK(desk.generators.size() == 2);
  CHECK(desk.config.periods == 3);

  Scenario rts = load_scenario(data_path("rts24.json"));
  CHECK(rts.network.buses.size() == 24);
  CHECK(rts.network.lines.size() == 38);
  CHECK(rts.generators.size() == 12);
  CHECK(rts.demands.size() == 17);
  CHECK(rts.config.periods == 24);
}
