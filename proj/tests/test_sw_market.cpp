#include <catch2/catch_amalgamated.hpp>
#include <random>
#include <sstream>

#include "mclear/lp_format.hpp"
#include "mclear/sw_market.hpp"

using namespace mclear;

namespace {

std::string data_path(const char* f) {
  return std::string(MCLEAR_DATA_DIR) + "/" + f;
}

// Small two-bus system with randomized costs and capacities, feasible by
// construction; used for equivalence sweeps.
Scenario random_desk(unsigned seed) {
  std::mt19937 rng(seed);
  auto uni = [&](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };
  Scenario s;
  s.name = "random_desk_" + std::to_string(seed);
  s.config.periods = 3;
  s.config.phi = 0.05;
  s.config.theta_limit = 0.5;
  s.config.slack_bus = "b1";
  s.network.buses = {"b1", "b2"};
  s.network.slack_bus = "b1";
  s.network.theta_limit = 0.5;

  double peak = uni(80.0, 140.0);
  Line l{"l1", "b1", "b2", 0.002, 2.0 * peak, 0.0};
  l.susceptance = derive_susceptance(l.reactance);
  s.network.lines.push_back(l);

  for (int i = 0; i < 2; ++i) {
    GeneratorSpec g;
    g.id = "g" + std::to_string(i + 1);
    g.bus = i == 0 ? "b1" : "b2";
    g.marginal_cost = uni(8.0, 35.0);
    g.reserve_cost = 0.4 * g.marginal_cost;
    g.startup_cost = uni(0.0, 400.0);
    g.shutdown_cost = 0.2 * g.startup_cost;
    g.ramp_cost = uni(0.0, 2.0);
    g.gmax = uni(0.8 * peak, 1.4 * peak);
    g.gmin = uni(0.0, 0.2 * g.gmax);
    g.ramp_up = g.ramp_down = g.startup_rate = g.shutdown_rate = g.gmax;
    g.min_up = 1 + (rng() % 2);
    g.min_down = 1 + (rng() % 2);
    g.reserve_capable = true;
    if (i == 0) {
      g.initial_on = 1;
      g.initial_output = uni(g.gmin, 0.8 * g.gmax);
    } else {
      g.initial_on = 0;
      g.initial_output = 0.0;
    }
    s.generators.push_back(g);
  }

  DemandSpec d;
  d.bus = "b2";
  for (int t = 0; t < 3; ++t) {
    DemandPeriod p;
    p.qbar = peak * uni(0.7, 1.0);
    p.qmin = 0.55 * p.qbar;
    p.price_high = uni(45.0, 60.0);
    p.price_low = uni(8.0, 18.0);
    d.periods.push_back(p);
  }
  s.demands.push_back(d);
  finalize_scenario(s);
  return s;
}

}  // namespace

TEST_CASE("assemble: published binary count on the bundled 24-bus shape") {
  Scenario rts = load_scenario(data_path("rts24.json"));
  auto t0 = std::chrono::steady_clock::now();
  MarketAssembly a = assemble_sw(rts);
  double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  auto stats = model_stats(a.model);
  CHECK(stats.binaries == 288);  // 12 units x 24 periods, commitment only
  CHECK(secs < 5.0);
}

TEST_CASE("assemble: zero reserve fraction pins reserve supply to zero") {
  Scenario s = load_scenario(data_path("desk.json"));
  s.config.phi = 0.0;
  SolverGateway gw;
  MarketSolution sol = solve_sw(gw, s);
  for (const auto& sched : sol.schedules)
    for (double gr : sched.reserve) CHECK(std::abs(gr) < 1e-7);
}

TEST_CASE("assemble: dumped model re-read by the independent counter") {
  Scenario desk = load_scenario(data_path("desk.json"));
  MarketAssembly a = assemble_sw(desk);
  std::stringstream ss;
  write_lp_format(a.model, ss);
  auto counts = read_lp_counts(ss);
  auto stats = model_stats(a.model);
  CHECK(counts.rows == stats.rows);
  CHECK(counts.binaries == stats.binaries);
}

TEST_CASE("solve: desk objective matches the exhaustive oracle") {
  Scenario desk = load_scenario(data_path("desk.json"));
  SolverGateway gw;
  MarketSolution sol = solve_sw(gw, desk);
  MarketAssembly a = assemble_sw(desk);
  SolveResult oracle = gw.enumerate_binaries(a.model, 1 << 12);
  REQUIRE(oracle.status == SolveStatus::Optimal);
  CHECK(std::abs(sol.objective - oracle.objective) < 1e-6);
}

TEST_CASE("solve: single-bus interior demand prices at marginal cost") {
  Scenario s;
  s.name = "one_bus";
  s.config.periods = 1;
  s.config.phi = 0.0;
  s.config.theta_limit = 0.5;
  s.config.slack_bus = "b1";
  s.network.buses = {"b1"};
  s.network.slack_bus = "b1";
  s.network.theta_limit = 0.5;
  GeneratorSpec g;
  g.id = "g1";
  g.bus = "b1";
  g.marginal_cost = 20.0;
  g.reserve_cost = 8.0;
  g.startup_cost = 100.0;
  g.shutdown_cost = 20.0;
  g.ramp_cost = 0.0;
  g.gmax = 200.0;
  g.gmin = 5.0;
  g.ramp_up = g.ramp_down = g.startup_rate = g.shutdown_rate = 200.0;
  g.reserve_capable = true;
  g.initial_on = 1;
  g.initial_output = 0.0;
  g.forced_on_hours = 1;
  s.generators.push_back(g);
  DemandSpec d;
  d.bus = "b1";
  DemandPeriod p;
  p.qbar = 80.0;
  p.qmin = 10.0;
  p.price_high = 45.0;
  p.price_low = 10.0;
  d.periods.push_back(p);
  s.demands.push_back(d);
  finalize_scenario(s);

  SolverGateway gw;
  MarketSolution sol = solve_sw(gw, s);
  CHECK(sol.price[0][0] == Catch::Approx(20.0).margin(1e-6));
  // demand sits where marginal value meets the price
  const DemandCurve& curve = s.demands[0].periods[0].curve;
  double q_expect = (curve.intercept - 20.0) / curve.slope;
  CHECK(sol.demand[0][0] == Catch::Approx(q_expect).margin(1e-6));
}

TEST_CASE("solve: every consumer is stationary at the extracted prices") {
  Scenario desk = load_scenario(data_path("desk.json"));
  SolverGateway gw;
  MarketSolution sol = solve_sw(gw, desk);
  for (size_t d = 0; d < desk.demands.size(); ++d) {
    int bus = desk.network.bus_index(desk.demands[d].bus);
    for (int t = 0; t < desk.config.periods; ++t) {
      const DemandPeriod& p = desk.demands[d].periods[t];
      auto r = optimal_demand(p.curve, sol.price[bus][t], sol.price_reserve[t],
                              desk.config.phi, desk.floor(p));
      CHECK(sol.demand[d][t] == Catch::Approx(r.q).margin(1e-5));
    }
  }
}

TEST_CASE("solve: welfare is the negated objective") {
  Scenario desk = load_scenario(data_path("desk.json"));
  SolverGateway gw;
  MarketSolution sol = solve_sw(gw, desk);
  CHECK(social_welfare(desk, sol) == Catch::Approx(-sol.objective).margin(1e-6));
}

TEST_CASE("equivalence: reduced and three-binary start/stop forms agree") {
  SolverGateway gw;
  for (unsigned seed : {11u, 23u, 37u, 59u, 71u}) {
    Scenario s = random_desk(seed);
    MarketAssembly reduced = assemble_sw(s, StartStopVars::Continuous);
    MarketAssembly full = assemble_sw(s, StartStopVars::Binary);
    SolveResult r1 = gw.solve_miqp(reduced.model);
    SolveResult r2 = gw.solve_miqp(full.model);
    REQUIRE(r1.status == SolveStatus::Optimal);
    REQUIRE(r2.status == SolveStatus::Optimal);
    CHECK(std::abs(r1.objective - r2.objective) < 1e-6);
  }
}

TEST_CASE("monotonicity: tighter floors and capacities move welfare the right way") {
  Scenario desk = load_scenario(data_path("desk.json"));
  SolverGateway gw;
  double prev = kInf;
  for (double h : {0.0, 0.6, 1.2}) {
    Scenario s = scale_scenario(desk, h, 100.0, 100.0);
    double w = social_welfare(s, solve_sw(gw, s));
    CHECK(w <= prev + 1e-6);
    prev = w;
  }
  double w60 = social_welfare(scale_scenario(desk, 1.0, 60.0, 100.0),
                              solve_sw(gw, scale_scenario(desk, 1.0, 60.0, 100.0)));
  double w100 = social_welfare(desk, solve_sw(gw, desk));
  CHECK(w60 <= w100 + 1e-6);
}
