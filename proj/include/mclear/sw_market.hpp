#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "mclear/market_solution.hpp"
#include "mclear/participants.hpp"
#include "mclear/scenario.hpp"
#include "mclear/solver.hpp"

namespace mclear {

// A price cap generous enough that no sensible clearing price reaches it;
// used to box prices in the complementarity model and to bound demand
// columns. Overridable from the CLI.
inline double default_price_cap(const Scenario& s) {
  double top = 0.0;
  for (const auto& g : s.generators)
    top = std::max(top, g.marginal_cost + (g.reserve_capable ? g.reserve_cost : 0.0));
  for (const auto& d : s.demands)
    for (const auto& p : d.periods) top = std::max(top, p.curve.intercept);
  return 4.0 * top + 100.0;
}

// Largest demand compatible with the stationarity rows once prices are
// boxed at +-cap.
inline double demand_upper_bound(const DemandPeriod& p, double phi, double cap) {
  return (p.curve.intercept + cap * (1.0 + phi)) / p.curve.slope;
}

struct MarketAssembly {
  ModelInstance model;
  std::vector<FirmBlock> gen_blocks;  // scenario generator order
  FirmBlock net_block;
  // model variable index per block column: gen_vars[i][col], net_vars[col]
  std::vector<std::vector<int>> gen_vars;
  std::vector<int> net_vars;
  std::vector<std::vector<int>> q_vars;        // [demand index][t]
  std::vector<std::vector<int>> balance_rows;  // [bus][t]
  std::vector<int> reserve_rows;               // [t]
  double price_cap = 0.0;
};

namespace assembly_detail {

// Emit a firm's columns and rows into the model under "<firm>:" prefixes and
// accumulate the clearing-row terms its columns contribute.
inline std::vector<int> emit_block(
    ModelInstance& m, const FirmBlock& b,
    std::vector<std::vector<std::vector<LinTerm>>>& balance_terms,
    std::vector<std::vector<LinTerm>>& reserve_terms) {
  std::vector<int> vi(b.cols.size());
  for (size_t j = 0; j < b.cols.size(); ++j) {
    const BlockCol& c = b.cols[j];
    double lo = c.sign == ColSign::NonNeg ? 0.0 : -kInf;
    double hi = c.kind == VarKind::Binary ? 1.0 : kInf;
    vi[j] = m.add_var(b.firm_id + ":" + c.name, c.kind, lo, hi);
    m.add_obj(vi[j], c.obj);
    // The balance rows are oriented demand-positive: demand plus outbound
    // flow minus generation equals zero, so firm terms enter negated.
    for (const auto& e : c.energy)
      balance_terms[e.bus][e.period].push_back({vi[j], -e.coef});
    for (const auto& rr : c.reserve)
      reserve_terms[rr.period].push_back({vi[j], -rr.coef});
  }
  for (const auto& row : b.rows) {
    std::vector<LinTerm> terms;
    for (const auto& t : row.terms) terms.push_back({vi[t.var], t.coef});
    m.add_con(b.firm_id + ":" + row.name, std::move(terms), row.sense, row.rhs,
              row.tag);
  }
  return vi;
}

}  // namespace assembly_detail

// The welfare-clearing program: all firm blocks, demand floors, reserve and
// energy balance rows, and the cost-minus-benefit objective with its convex
// quadratic demand term.
inline MarketAssembly assemble_sw(const Scenario& s,
                                  StartStopVars mode = StartStopVars::Continuous,
                                  double price_cap = 0.0) {
  const int T = s.config.periods;
  const int N = static_cast<int>(s.network.buses.size());
  MarketAssembly a;
  a.price_cap = price_cap > 0 ? price_cap : default_price_cap(s);
  a.model.name = s.name + ":sw";

  std::vector<std::vector<std::vector<LinTerm>>> balance_terms(
      N, std::vector<std::vector<LinTerm>>(T));
  std::vector<std::vector<LinTerm>> reserve_terms(T);

  for (const auto& g : s.generators) {
    int bus = s.network.bus_index(g.bus);
    a.gen_blocks.push_back(build_generator_block(g, bus, T, mode));
  }
  a.net_block = build_network_block(s.network, T);
  for (const auto& b : a.gen_blocks)
    a.gen_vars.push_back(
        assembly_detail::emit_block(a.model, b, balance_terms, reserve_terms));
  a.net_vars =
      assembly_detail::emit_block(a.model, a.net_block, balance_terms, reserve_terms);

  // consumers: bounded columns with the concave benefit entering as cost
  a.q_vars.resize(s.demands.size());
  for (size_t d = 0; d < s.demands.size(); ++d) {
    int bus = s.network.bus_index(s.demands[d].bus);
    a.q_vars[d].resize(T);
    for (int t = 0; t < T; ++t) {
      const DemandPeriod& p = s.demands[d].periods[t];
      double floor = s.floor(p);
      double q_ub = std::max(demand_upper_bound(p, s.config.phi, a.price_cap),
                             floor + 1.0);
      int q = a.model.add_var(
          "q[" + s.demands[d].bus + "," + std::to_string(t + 1) + "]",
          VarKind::Continuous, floor, q_ub);
      a.q_vars[d][t] = q;
      a.model.add_obj(q, -p.curve.intercept);
      a.model.add_obj_quad(q, 0.5 * p.curve.slope);
      balance_terms[bus][t].push_back({q, 1.0});
      reserve_terms[t].push_back({q, s.config.phi});
    }
  }

  a.balance_rows.assign(N, std::vector<int>(T, -1));
  for (int n = 0; n < N; ++n)
    for (int t = 0; t < T; ++t)
      a.balance_rows[n][t] = a.model.add_con(
          "energy_balance[" + s.network.buses[n] + "," + std::to_string(t + 1) + "]",
          balance_terms[n][t], Sense::EQ, 0.0, "energy_balance");
  a.reserve_rows.resize(T);
  for (int t = 0; t < T; ++t)
    a.reserve_rows[t] =
        a.model.add_con("reserve_req[" + std::to_string(t + 1) + "]",
                        reserve_terms[t], Sense::EQ, 0.0, "reserve_req");
  return a;
}

namespace sw_detail {

inline MarketSolution extract_solution(const Scenario& s, const MarketAssembly& a,
                                       const SolveResult& priced,
                                       const char* kind) {
  const int T = s.config.periods;
  const int N = static_cast<int>(s.network.buses.size());
  MarketSolution sol;
  sol.model_kind = kind;
  sol.scenario_name = s.name;
  sol.scenario_id = scenario_fingerprint(s);
  sol.objective = priced.objective;
  sol.nodes = priced.nodes;
  sol.pwl_bound = priced.pwl_bound;

  sol.price.assign(N, std::vector<double>(T, 0.0));
  for (int n = 0; n < N; ++n)
    for (int t = 0; t < T; ++t)
      sol.price[n][t] = priced.duals[a.balance_rows[n][t]];
  sol.price_reserve.resize(T);
  for (int t = 0; t < T; ++t)
    sol.price_reserve[t] = priced.duals[a.reserve_rows[t]];

  sol.demand.assign(s.demands.size(), std::vector<double>(T, 0.0));
  for (size_t d = 0; d < s.demands.size(); ++d)
    for (int t = 0; t < T; ++t) sol.demand[d][t] = priced.x[a.q_vars[d][t]];

  for (size_t i = 0; i < a.gen_blocks.size(); ++i) {
    std::vector<double> cols(a.gen_blocks[i].cols.size());
    for (size_t j = 0; j < cols.size(); ++j) cols[j] = priced.x[a.gen_vars[i][j]];
    sol.schedules.push_back(schedule_from_columns(a.gen_blocks[i], cols));
  }

  const int L = static_cast<int>(s.network.lines.size());
  sol.flow.assign(L, std::vector<double>(T, 0.0));
  sol.angle.assign(N, std::vector<double>(T, 0.0));
  for (int l = 0; l < L; ++l)
    for (int t = 0; t < T; ++t)
      sol.flow[l][t] = priced.x[a.model.var_index(
          "network:f[" + s.network.lines[l].id + "," + std::to_string(t + 1) + "]")];
  for (int n = 0; n < N; ++n)
    for (int t = 0; t < T; ++t)
      sol.angle[n][t] = priced.x[a.model.var_index(
          "network:theta[" + s.network.buses[n] + "," + std::to_string(t + 1) + "]")];

  for (size_t i = 0; i < a.model.cons().size(); ++i) {
    const Constraint& c = a.model.con(i);
    if (c.name.find(':') != std::string::npos)
      sol.row_duals[c.name] = priced.duals.empty() ? 0.0 : priced.duals[i];
  }

  // clearing residuals are part of the solution contract
  for (int n = 0; n < N; ++n)
    for (int t = 0; t < T; ++t) {
      double r = std::abs(a.model.row_activity(a.model.con(a.balance_rows[n][t]),
                                               priced.x));
      if (r > kFeasTol)
        throw solver_error("energy balance residual " + std::to_string(r));
    }
  for (int t = 0; t < T; ++t) {
    double r = std::abs(
        a.model.row_activity(a.model.con(a.reserve_rows[t]), priced.x));
    if (r > kFeasTol) throw solver_error("reserve residual " + std::to_string(r));
  }
  return sol;
}

}  // namespace sw_detail

// Two-step clearing: commit with the mixed-integer solve, then re-solve the
// continuous program with commitments pinned and read prices off the
// balance-row multipliers.
inline MarketSolution solve_sw(const SolverGateway& gw, const Scenario& s,
                               StartStopVars mode = StartStopVars::Continuous,
                               double price_cap = 0.0) {
  MarketAssembly a = assemble_sw(s, mode, price_cap);
  SolveResult step1 = gw.solve_miqp(a.model);
  if (step1.status != SolveStatus::Optimal)
    throw solver_error("commitment step ended " +
                       std::string(to_string(step1.status)) + " for " + s.name);

  ModelInstance pricing = a.model;
  for (size_t j = 0; j < pricing.vars().size(); ++j)
    if (pricing.var(j).kind == VarKind::Binary)
      pricing.fix_var(j, std::round(step1.x[j]));
  SolveResult step2 = gw.solve_qp_with_duals(pricing);
  if (step2.status != SolveStatus::Optimal)
    throw solver_error("pricing step ended " +
                       std::string(to_string(step2.status)) + " for " + s.name);
  if (std::abs(step2.objective - step1.objective) >
      1e-6 * (1.0 + std::abs(step1.objective)))
    throw solver_error("pricing step moved the objective: " +
                       std::to_string(step1.objective) + " vs " +
                       std::to_string(step2.objective));

  MarketSolution sol = sw_detail::extract_solution(s, a, step2, "sw");
  sol.nodes = step1.nodes;
  sol.pwl_bound = std::max(step1.pwl_bound, step2.pwl_bound);
  sol.wall_time_s = step1.wall_time_s + step2.wall_time_s;
  return sol;
}

// Consumers' benefit minus total generation cost at a solved point.
inline double social_welfare(const Scenario& s, const MarketSolution& sol) {
  double w = 0.0;
  for (size_t d = 0; d < s.demands.size(); ++d)
    for (int t = 0; t < s.config.periods; ++t)
      w += benefit(s.demands[d].periods[t].curve, sol.demand[d][t]);
  for (size_t i = 0; i < s.generators.size(); ++i)
    w -= generation_cost(s.generators[i], sol.schedules[i]);
  return w;
}

}  // namespace mclear
