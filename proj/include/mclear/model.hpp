#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mclear/common.hpp"

namespace mclear {

enum class VarKind { Continuous, Binary };
enum class Sense { LE, EQ, GE };

struct Variable {
  std::string name;
  VarKind kind = VarKind::Continuous;
  double lo = 0.0;
  double hi = kInf;
};

struct LinTerm {
  int var = -1;
  double coef = 0.0;
};

struct Constraint {
  std::string name;
  std::vector<LinTerm> terms;
  Sense sense = Sense::LE;
  double rhs = 0.0;
  // Names the rule of the formulation the row came from ("ramp_up_rate",
  // "energy_balance", ...) or "plumbing" for artifact-internal rows.
  std::string tag = "plumbing";
};

// An assembled mathematical program: variables with kinds/bounds, linear
// constraints, and a minimized objective that is linear plus a nonnegative
// diagonal quadratic (sum lin[j]*x_j + quad[j]*x_j^2 + constant).
class ModelInstance {
 public:
  std::string name = "model";

  int add_var(const std::string& vname, VarKind kind, double lo, double hi) {
    if (var_index_.count(vname))
      throw assembly_error("duplicate variable name: " + vname);
    vars_.push_back(Variable{vname, kind, lo, hi});
    obj_lin_.push_back(0.0);
    obj_quad_.push_back(0.0);
    var_index_.emplace(vname, static_cast<int>(vars_.size()) - 1);
    return static_cast<int>(vars_.size()) - 1;
  }

  int add_con(const std::string& cname, std::vector<LinTerm> terms, Sense sense,
              double rhs, const std::string& tag) {
    if (con_index_.count(cname))
      throw assembly_error("duplicate constraint name: " + cname);
    for (const auto& t : terms)
      if (t.var < 0 || t.var >= static_cast<int>(vars_.size()))
        throw assembly_error("constraint " + cname + " references unknown column");
    cons_.push_back(Constraint{cname, std::move(terms), sense, rhs, tag});
    con_index_.emplace(cname, static_cast<int>(cons_.size()) - 1);
    return static_cast<int>(cons_.size()) - 1;
  }

  void add_obj(int var, double lin) { obj_lin_.at(var) += lin; }
  void add_obj_quad(int var, double quad) {
    if (quad < 0) throw assembly_error("negative quadratic coefficient on " + vars_.at(var).name);
    obj_quad_.at(var) += quad;
  }
  void set_obj_quad(int var, double quad) {
    if (quad < 0) throw assembly_error("negative quadratic coefficient on " + vars_.at(var).name);
    obj_quad_.at(var) = quad;
  }
  void add_obj_constant(double c) { obj_constant_ += c; }

  const std::vector<Variable>& vars() const { return vars_; }
  const std::vector<Constraint>& cons() const { return cons_; }
  const std::vector<double>& obj_lin() const { return obj_lin_; }
  const std::vector<double>& obj_quad() const { return obj_quad_; }
  double obj_constant() const { return obj_constant_; }

  Variable& var(int j) { return vars_.at(j); }
  const Variable& var(int j) const { return vars_.at(j); }
  const Constraint& con(int i) const { return cons_.at(i); }

  int var_index(const std::string& vname) const {
    auto it = var_index_.find(vname);
    return it == var_index_.end() ? -1 : it->second;
  }
  int con_index(const std::string& cname) const {
    auto it = con_index_.find(cname);
    return it == con_index_.end() ? -1 : it->second;
  }

  bool has_quadratic() const {
    return std::any_of(obj_quad_.begin(), obj_quad_.end(),
                       [](double q) { return q != 0.0; });
  }
  bool has_binaries() const {
    return std::any_of(vars_.begin(), vars_.end(), [](const Variable& v) {
      return v.kind == VarKind::Binary;
    });
  }

  void fix_var(int j, double value) {
    vars_.at(j).lo = value;
    vars_.at(j).hi = value;
  }

  double eval_objective(const std::vector<double>& x) const {
    double v = obj_constant_;
    for (size_t j = 0; j < vars_.size(); ++j)
      v += obj_lin_[j] * x[j] + obj_quad_[j] * x[j] * x[j];
    return v;
  }

  double row_activity(const Constraint& c, const std::vector<double>& x) const {
    double a = 0.0;
    for (const auto& t : c.terms) a += t.coef * x[t.var];
    return a;
  }

  // Max violation of rows and bounds at x.
  double feasibility_residual(const std::vector<double>& x) const {
    double r = 0.0;
    for (const auto& c : cons_) {
      double a = row_activity(c, x);
      switch (c.sense) {
        case Sense::LE: r = std::max(r, a - c.rhs); break;
        case Sense::GE: r = std::max(r, c.rhs - a); break;
        case Sense::EQ: r = std::max(r, std::abs(a - c.rhs)); break;
      }
    }
    for (size_t j = 0; j < vars_.size(); ++j) {
      r = std::max(r, vars_[j].lo - x[j]);
      r = std::max(r, x[j] - vars_[j].hi);
    }
    return r;
  }

 private:
  std::vector<Variable> vars_;
  std::vector<Constraint> cons_;
  std::vector<double> obj_lin_;
  std::vector<double> obj_quad_;
  double obj_constant_ = 0.0;
  std::unordered_map<std::string, int> var_index_;
  std::unordered_map<std::string, int> con_index_;
};

struct ModelStats {
  long binaries = 0;
  long continuous = 0;
  long rows = 0;
};

inline ModelStats model_stats(const ModelInstance& m) {
  ModelStats s;
  for (const auto& v : m.vars())
    (v.kind == VarKind::Binary ? s.binaries : s.continuous)++;
  s.rows = static_cast<long>(m.cons().size());
  return s;
}

enum class SolveStatus { Optimal, Infeasible, Unbounded, Limit };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::Limit: return "limit";
  }
  return "unknown";
}

// Duals follow the Lagrange-multiplier convention in each row's stated
// orientation: y >= 0 for LE rows (penalizing a'x - b), y >= 0 for GE rows
// (penalizing b - a'x), free for EQ rows with L = f + y (a'x - b).
struct SolveResult {
  SolveStatus status = SolveStatus::Limit;
  double objective = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> x;
  std::vector<double> duals;       // per constraint; empty for MILP solves
  std::vector<double> redcost_lo;  // bound duals, >= 0; empty for MILP solves
  std::vector<double> redcost_hi;
  double wall_time_s = 0.0;
  double pwl_bound = 0.0;  // certified overestimation when the PWL path ran
  long nodes = 0;          // relaxations solved during search
  double primal_residual = 0.0;
  double dual_residual = 0.0;
};

}  // namespace mclear
