#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "mclear/participants.hpp"

namespace mclear {

// A solved market: commitments, dispatch, flows, angles, demands, prices,
// and (for the complementarity model) every dual value by name.
struct MarketSolution {
  std::string model_kind;  // "sw" or "mtoc"
  std::string scenario_name;
  std::uint64_t scenario_id = 0;
  std::string status = "optimal";

  double objective = 0.0;  // minimized model objective
  std::vector<std::vector<double>> price;    // [bus][t], energy
  std::vector<double> price_reserve;         // [t]
  std::vector<std::vector<double>> demand;   // [scenario demand index][t]
  std::vector<std::vector<double>> flow;     // [line][t]
  std::vector<std::vector<double>> angle;    // [bus][t]
  std::vector<GeneratorSchedule> schedules;  // scenario generator order

  // Multipliers of the firms' rows from the fixed-commitment pricing solve,
  // keyed "<firm>:<row>". Populated for the welfare model.
  std::unordered_map<std::string, double> row_duals;

  // Dual decision variables of the complementarity model, by name.
  std::map<std::string, double> dual_values;
  std::vector<std::vector<double>> beta;          // [demand index][t]
  std::vector<std::vector<char>> fam_indicator;   // u, [demand index][t]
  double dropped_constant = 0.0;  // sum of a * floor removed from the objective

  double pwl_bound = 0.0;
  long nodes = 0;
  double wall_time_s = 0.0;

  double total_demand(int t) const {
    double s = 0.0;
    for (const auto& d : demand) s += d[t];
    return s;
  }
};

}  // namespace mclear
