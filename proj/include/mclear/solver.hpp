#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "mclear/interior_point.hpp"
#include "mclear/model.hpp"

namespace mclear {

struct SolverConfig {
  double feas_tol = kFeasTol;
  double int_tol = kIntTol;
  // Quadratic objectives are handled natively by the QP core; the piecewise
  // linear route stays available as a fallback and for cross-checks.
  bool use_pwl = false;
  int pwl_segments = 32;
  double pwl_tolerance = kInf;
  long max_nodes = 2000000;
  double time_limit_s = kInf;
  std::string dump_dir;  // when set, each solved model is written here in LP format
};

// ---------------------------------------------------------------------------
// Piecewise-linear secant overestimation of coef * q^2 on [lo, hi].

struct PwlCut {
  double slope = 0.0;
  double intercept = 0.0;  // epigraph row: s >= slope * q + intercept
};

struct PwlApproximation {
  std::vector<PwlCut> cuts;
  double bound = 0.0;  // certified max overestimation: coef * (span/segments)^2 / 4
};

inline PwlApproximation pwl_approximate(double coef, double lo, double hi,
                                        int segments) {
  if (coef < 0) throw solver_error("pwl_approximate: negative quadratic coefficient");
  if (segments < 1) throw solver_error("pwl_approximate: segments must be >= 1");
  PwlApproximation out;
  if (coef == 0.0) return out;
  if (!(hi > lo)) throw solver_error("pwl_approximate: empty domain");
  const double step = (hi - lo) / segments;
  out.bound = coef * step * step / 4.0;
  out.cuts.reserve(segments);
  for (int k = 0; k < segments; ++k) {
    const double q0 = lo + k * step;
    const double q1 = (k + 1 == segments) ? hi : q0 + step;
    // Secant of q^2 through (q0, q0^2), (q1, q1^2); lies above the parabola
    // inside the segment and below it outside, so the max over all secants
    // is the usual piecewise-linear overestimator.
    out.cuts.push_back(PwlCut{coef * (q0 + q1), -coef * q0 * q1});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Lowering of a ModelInstance into the dense standard form. Variables and
// rows are ordered by stable sorted names so emission is reproducible,
// fixed variables are substituted out, and identically-empty rows dropped.

namespace lowering {

struct Lowered {
  StdQp qp;
  std::vector<int> col_of_var;    // -1 when the variable was fixed
  std::vector<double> fixed_val;  // valid where col_of_var == -1
  // Per model row: where it went. kind 0 = dropped, 1 = equality, 2 = LE
  // inequality, and `flip` records a GE row negated into LE form.
  struct RowMap {
    int kind = 0;
    int index = -1;
    bool flip = false;
  };
  std::vector<RowMap> row_of_con;
  std::vector<int> lo_row, hi_row;  // bound rows per variable (-1 if absent)
  bool infeasible = false;
  std::string infeasible_reason;
};

inline Lowered lower(const ModelInstance& m, bool relax_binaries) {
  const int nv = static_cast<int>(m.vars().size());
  const int nc = static_cast<int>(m.cons().size());

  std::vector<int> vorder(nv), corder(nc);
  std::iota(vorder.begin(), vorder.end(), 0);
  std::iota(corder.begin(), corder.end(), 0);
  std::sort(vorder.begin(), vorder.end(), [&](int a, int b) {
    return m.var(a).name < m.var(b).name;
  });
  std::sort(corder.begin(), corder.end(), [&](int a, int b) {
    return m.con(a).name < m.con(b).name;
  });

  Lowered L;
  L.col_of_var.assign(nv, -1);
  L.fixed_val.assign(nv, 0.0);
  L.row_of_con.assign(nc, {});
  L.lo_row.assign(nv, -1);
  L.hi_row.assign(nv, -1);

  int ncol = 0;
  std::vector<double> lo(nv), hi(nv);
  for (int j = 0; j < nv; ++j) {
    const Variable& v = m.var(j);
    lo[j] = v.lo;
    hi[j] = v.hi;
    if (v.kind == VarKind::Binary) {
      lo[j] = std::max(lo[j], 0.0);
      hi[j] = std::min(hi[j], 1.0);
      if (!relax_binaries && !(hi[j] - lo[j] < 1e-12))
        throw solver_error("model has unfixed binaries: " + v.name);
    }
    if (lo[j] > hi[j] + 1e-12) {
      L.infeasible = true;
      L.infeasible_reason = "empty bound interval on " + v.name;
      return L;
    }
    if (hi[j] - lo[j] < 1e-12) L.fixed_val[j] = 0.5 * (lo[j] + hi[j]);
  }
  // assign columns in sorted-name order
  for (int j : vorder)
    if (hi[j] - lo[j] >= 1e-12) L.col_of_var[j] = ncol++;
    else L.col_of_var[j] = -1;

  // objective
  Eigen::VectorXd cost = Eigen::VectorXd::Zero(ncol);
  Eigen::VectorXd quad = Eigen::VectorXd::Zero(ncol);
  for (int j = 0; j < nv; ++j) {
    int c = L.col_of_var[j];
    if (c < 0) continue;
    cost(c) = m.obj_lin()[j];
    quad(c) = 2.0 * m.obj_quad()[j];  // standard form carries 0.5 x'Px
  }

  // rows
  std::vector<std::vector<std::pair<int, double>>> eq_rows, le_rows;
  std::vector<double> eq_rhs, le_rhs;
  double bscale = 1.0;
  for (int ci : corder) {
    const Constraint& c = m.con(ci);
    double rhs = c.rhs;
    std::vector<std::pair<int, double>> terms;
    for (const auto& t : c.terms) {
      int col = L.col_of_var[t.var];
      if (col < 0) rhs -= t.coef * L.fixed_val[t.var];
      else terms.emplace_back(col, t.coef);
    }
    bscale = std::max(bscale, std::abs(rhs));
    if (terms.empty()) {
      double viol = 0.0;
      if (c.sense == Sense::LE) viol = -rhs;
      else if (c.sense == Sense::GE) viol = rhs;
      else viol = std::abs(rhs);
      if (viol > 1e-7 * std::max(1.0, std::abs(c.rhs))) {
        L.infeasible = true;
        L.infeasible_reason = "row " + c.name + " infeasible after substitution";
        return L;
      }
      L.row_of_con[ci] = {0, -1, false};
      continue;
    }
    if (c.sense == Sense::EQ) {
      L.row_of_con[ci] = {1, static_cast<int>(eq_rows.size()), false};
      eq_rows.push_back(std::move(terms));
      eq_rhs.push_back(rhs);
    } else {
      bool flip = c.sense == Sense::GE;
      if (flip) {
        for (auto& t : terms) t.second = -t.second;
        rhs = -rhs;
      }
      L.row_of_con[ci] = {2, static_cast<int>(le_rows.size()), flip};
      le_rows.push_back(std::move(terms));
      le_rhs.push_back(rhs);
    }
  }
  // bound rows, in sorted variable order
  for (int j : vorder) {
    int col = L.col_of_var[j];
    if (col < 0) continue;
    if (lo[j] > -kInf) {
      L.lo_row[j] = static_cast<int>(le_rows.size());
      le_rows.push_back({{col, -1.0}});
      le_rhs.push_back(-lo[j]);
    }
    if (hi[j] < kInf) {
      L.hi_row[j] = static_cast<int>(le_rows.size());
      le_rows.push_back({{col, 1.0}});
      le_rhs.push_back(hi[j]);
    }
  }

  const std::size_t me = eq_rows.size(), mi = le_rows.size();
  if (static_cast<double>(ncol) * (me + mi + ncol) > 4e8)
    throw solver_error("model too large for the dense backend");

  L.qp.cost = cost;
  L.qp.quad = quad;
  L.qp.eq_mat = Eigen::MatrixXd::Zero(me, ncol);
  L.qp.eq_rhs = Eigen::VectorXd::Zero(me);
  for (std::size_t i = 0; i < me; ++i) {
    for (auto& [col, coef] : eq_rows[i]) L.qp.eq_mat(i, col) += coef;
    L.qp.eq_rhs(i) = eq_rhs[i];
  }
  L.qp.ineq_mat = Eigen::MatrixXd::Zero(mi, ncol);
  L.qp.ineq_rhs = Eigen::VectorXd::Zero(mi);
  for (std::size_t i = 0; i < mi; ++i) {
    for (auto& [col, coef] : le_rows[i]) L.qp.ineq_mat(i, col) += coef;
    L.qp.ineq_rhs(i) = le_rhs[i];
  }
  return L;
}

}  // namespace lowering

// ---------------------------------------------------------------------------

class SolverGateway {
 public:
  explicit SolverGateway(SolverConfig cfg = {}) : cfg_(std::move(cfg)) {}
  const SolverConfig& config() const { return cfg_; }

  // LP with dual extraction. Binaries must be absent or fixed via bounds.
  SolveResult solve_lp_with_duals(const ModelInstance& m) const {
    if (m.has_quadratic())
      throw solver_error("solve_lp_with_duals: model has quadratic terms");
    return solve_continuous(m, /*relax_binaries=*/false);
  }

  // Continuous convex QP with dual extraction (binaries absent or fixed).
  SolveResult solve_qp_with_duals(const ModelInstance& m) const {
    return solve_continuous(m, /*relax_binaries=*/false);
  }

  // MILP to proven optimality (zero relative gap within tolerances).
  SolveResult solve_milp(const ModelInstance& m) const {
    if (m.has_quadratic())
      throw solver_error("solve_milp: model has quadratic terms");
    return branch_and_bound(m);
  }

  // Convex MIQP: native branch and bound over QP relaxations, or the
  // piecewise-linear reformulation when configured; the certified PWL
  // bound is reported on the result.
  SolveResult solve_miqp(const ModelInstance& m) const {
    if (!m.has_quadratic() || !cfg_.use_pwl) return branch_and_bound(m);
    double bound = 0.0;
    ModelInstance pwl = pwl_reformulate(m, cfg_.pwl_segments, &bound);
    if (bound > cfg_.pwl_tolerance)
      throw solver_error("certified PWL bound " + std::to_string(bound) +
                         " exceeds configured tolerance");
    SolveResult r = branch_and_bound(pwl);
    r.pwl_bound = bound;
    r.x.resize(m.vars().size());  // epigraph columns were appended at the end
    return r;
  }

  // Exhaustive verification oracle: enumerate every binary assignment and
  // solve the continuous restriction of each leaf.
  SolveResult enumerate_binaries(const ModelInstance& m, std::uint64_t budget) const {
    std::vector<int> bins;
    for (size_t j = 0; j < m.vars().size(); ++j)
      if (m.var(j).kind == VarKind::Binary &&
          m.var(j).hi - m.var(j).lo >= 1e-12)
        bins.push_back(static_cast<int>(j));
    if (bins.size() >= 63 || (1ull << bins.size()) > budget)
      throw Error(ErrorKind::Budget, "enumerate_binaries: 2^" +
                                         std::to_string(bins.size()) +
                                         " assignments exceed budget");
    auto t0 = std::chrono::steady_clock::now();
    SolveResult best;
    best.status = SolveStatus::Infeasible;
    for (std::uint64_t mask = 0; mask < (1ull << bins.size()); ++mask) {
      ModelInstance leaf = m;
      for (size_t k = 0; k < bins.size(); ++k)
        leaf.fix_var(bins[k], (mask >> k) & 1 ? 1.0 : 0.0);
      SolveResult r = solve_continuous(leaf, /*relax_binaries=*/true);
      if (r.status == SolveStatus::Unbounded) {
        r.nodes = static_cast<long>(mask) + 1;
        return r;
      }
      if (r.status == SolveStatus::Limit)
        throw solver_error("enumeration leaf failed to converge in " + m.name);
      if (r.status != SolveStatus::Optimal) continue;
      if (best.status != SolveStatus::Optimal || r.objective < best.objective)
        best = r;
    }
    best.nodes = static_cast<long>(1ull << bins.size());
    best.duals.clear();
    best.redcost_lo.clear();
    best.redcost_hi.clear();
    best.wall_time_s = std::chrono::duration<double>(
                           std::chrono::steady_clock::now() - t0)
                           .count();
    return best;
  }

  // Dual objective under the documented multiplier conventions; for an
  // optimal LP/QP result it matches the primal objective to ~1e-9.
  static double dual_objective(const ModelInstance& m, const SolveResult& r) {
    double g = m.obj_constant();
    for (size_t i = 0; i < m.cons().size(); ++i) {
      const Constraint& c = m.con(i);
      g += (c.sense == Sense::GE ? 1.0 : -1.0) * r.duals[i] * c.rhs;
    }
    for (size_t j = 0; j < m.vars().size(); ++j) {
      const Variable& v = m.var(j);
      if (v.lo > -kInf) g += r.redcost_lo[j] * v.lo;
      if (v.hi < kInf) g -= r.redcost_hi[j] * v.hi;
      g -= m.obj_quad()[j] * r.x[j] * r.x[j];
    }
    return g;
  }

  // PWL reformulation: replaces each diagonal quadratic term with an
  // epigraph variable supported by secant cuts. Appends columns after the
  // original ones so caller-side indices survive.
  static ModelInstance pwl_reformulate(const ModelInstance& m, int segments,
                                       double* total_bound) {
    ModelInstance out = m;
    double bound = 0.0;
    std::vector<std::pair<int, double>> quads;
    for (size_t j = 0; j < m.vars().size(); ++j)
      if (m.obj_quad()[j] > 0.0) quads.emplace_back(static_cast<int>(j), m.obj_quad()[j]);
    for (auto [j, coef] : quads) {
      const Variable& v = m.var(j);
      if (!(v.lo > -kInf) || !(v.hi < kInf))
        throw solver_error("pwl_reformulate: variable " + v.name +
                           " needs finite bounds");
      out.set_obj_quad(j, 0.0);  // replaced by the epigraph column
      if (v.hi - v.lo < 1e-12) {
        out.add_obj_constant(coef * v.lo * v.lo);
        continue;
      }
      PwlApproximation ap = pwl_approximate(coef, v.lo, v.hi, segments);
      bound += ap.bound;
      int s = out.add_var("pwl_epi:" + v.name, VarKind::Continuous, -kInf, kInf);
      out.add_obj(s, 1.0);
      for (size_t k = 0; k < ap.cuts.size(); ++k)
        out.add_con("pwl:" + v.name + ":" + std::to_string(k),
                    {{s, 1.0}, {j, -ap.cuts[k].slope}}, Sense::GE,
                    ap.cuts[k].intercept, "plumbing");
    }
    if (total_bound) *total_bound = bound;
    return out;
  }

  // Continuous solve; binaries are relaxed to [0,1] when requested (used by
  // the search) and rejected otherwise. Runs on the equilibrated problem,
  // then re-polishes in original units for machine-accurate KKT points.
  SolveResult solve_continuous(const ModelInstance& m, bool relax_binaries) const {
    auto t0 = std::chrono::steady_clock::now();
    SolveResult out;
    lowering::Lowered L = lowering::lower(m, relax_binaries);
    if (L.infeasible) {
      out.status = SolveStatus::Infeasible;
      out.wall_time_s = elapsed(t0);
      return out;
    }
    StdQp scaled = L.qp;
    Equilibration eq = equilibrate(scaled);

    IpmResult r;
    IpmOptions opt;
    for (int attempt = 0; attempt < 3; ++attempt) {
      r = InteriorPointSolver(opt).solve(scaled);
      if (r.status == IpmStatus::Converged) break;
      opt.max_iterations += 200;        // escalate
      opt.regularization *= 100.0;
      opt.tol_mu_polish *= 100.0;
    }
    if (r.status == IpmStatus::Converged) {
      unscale(eq, r);
      InteriorPointSolver().polish(L.qp, r, qp_scale(L.qp));
      fill_result(m, L, r, out);
      out.status = SolveStatus::Optimal;
      out.wall_time_s = elapsed(t0);
      return out;
    }
    out.status = classify_failure(scaled);
    out.wall_time_s = elapsed(t0);
    return out;
  }

 private:
  SolverConfig cfg_;

  static double qp_scale(const StdQp& qp) {
    double s = 1.0;
    if (qp.eq_rhs.size()) s = std::max(s, qp.eq_rhs.cwiseAbs().maxCoeff());
    if (qp.ineq_rhs.size()) s = std::max(s, qp.ineq_rhs.cwiseAbs().maxCoeff());
    if (qp.cost.size()) s = std::max(s, qp.cost.cwiseAbs().maxCoeff());
    return s;
  }

  static double elapsed(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
  }

  static void fill_result(const ModelInstance& m, const lowering::Lowered& L,
                          const IpmResult& r, SolveResult& out) {
    const size_t nv = m.vars().size(), nc = m.cons().size();
    out.x.assign(nv, 0.0);
    for (size_t j = 0; j < nv; ++j)
      out.x[j] = L.col_of_var[j] >= 0 ? r.x(L.col_of_var[j]) : L.fixed_val[j];
    out.duals.assign(nc, 0.0);
    for (size_t i = 0; i < nc; ++i) {
      const auto& rm = L.row_of_con[i];
      if (rm.kind == 1) out.duals[i] = r.y(rm.index);
      else if (rm.kind == 2) out.duals[i] = r.z(rm.index);
      // GE rows were negated into LE form; the nonnegative multiplier of the
      // negated row is exactly the GE-orientation multiplier, no flip needed.
    }
    out.redcost_lo.assign(nv, 0.0);
    out.redcost_hi.assign(nv, 0.0);
    for (size_t j = 0; j < nv; ++j) {
      if (L.col_of_var[j] >= 0) {
        if (L.lo_row[j] >= 0) out.redcost_lo[j] = r.z(L.lo_row[j]);
        if (L.hi_row[j] >= 0) out.redcost_hi[j] = r.z(L.hi_row[j]);
      } else {
        // Substituted variable: recover its reduced cost from stationarity.
        double rc = m.obj_lin()[j] + 2.0 * m.obj_quad()[j] * out.x[j];
        for (size_t i = 0; i < nc; ++i) {
          const Constraint& c = m.con(i);
          for (const auto& t : c.terms)
            if (static_cast<size_t>(t.var) == j)
              rc += (c.sense == Sense::GE ? -1.0 : 1.0) * out.duals[i] * t.coef;
        }
        if (rc > 0) out.redcost_lo[j] = rc;
        else out.redcost_hi[j] = -rc;
      }
    }
    out.objective = m.eval_objective(out.x);
    out.primal_residual = m.feasibility_residual(out.x);
    out.dual_residual = r.dual_residual;
  }

  // The main loop failed to converge: decide between infeasible, unbounded,
  // and limit via an elastic feasibility phase and a ray search.
  SolveStatus classify_failure(const StdQp& qp) const {
    const int n = qp.n(), me = qp.me(), mi = qp.mi();
    {  // elastic phase: min 1'u with equality/inequality violations absorbed
      StdQp el;
      const int ncol = n + 2 * me + mi;
      el.quad = Eigen::VectorXd::Zero(ncol);
      el.cost = Eigen::VectorXd::Zero(ncol);
      el.cost.segment(n, 2 * me + mi).setOnes();
      el.eq_mat = Eigen::MatrixXd::Zero(me, ncol);
      el.eq_mat.leftCols(n) = qp.eq_mat;
      for (int i = 0; i < me; ++i) {
        el.eq_mat(i, n + 2 * i) = 1.0;
        el.eq_mat(i, n + 2 * i + 1) = -1.0;
      }
      el.eq_rhs = qp.eq_rhs;
      el.ineq_mat = Eigen::MatrixXd::Zero(mi + 2 * me + mi, ncol);
      el.ineq_mat.topLeftCorner(mi, n) = qp.ineq_mat;
      for (int i = 0; i < mi; ++i) el.ineq_mat(i, n + 2 * me + i) = -1.0;
      for (int k = 0; k < 2 * me + mi; ++k) el.ineq_mat(mi + k, n + k) = -1.0;
      el.ineq_rhs = Eigen::VectorXd::Zero(mi + 2 * me + mi);
      el.ineq_rhs.head(mi) = qp.ineq_rhs;
      IpmResult fr = InteriorPointSolver().solve(el);
      if (fr.status == IpmStatus::Converged) {
        double viol = el.cost.dot(fr.x);
        double scale = 1.0 + detail::inf_norm(qp.eq_rhs) + detail::inf_norm(qp.ineq_rhs);
        if (viol > 1e-7 * scale) return SolveStatus::Infeasible;
      }
    }
    {  // ray search: min c'd, Ae d = 0, Ai d <= 0, quad components pinned, |d| <= 1
      StdQp ray;
      ray.quad = Eigen::VectorXd::Zero(n);
      ray.cost = qp.cost;
      int pinned = 0;
      for (int j = 0; j < n; ++j)
        if (qp.quad(j) > 0) ++pinned;
      ray.eq_mat = Eigen::MatrixXd::Zero(me + pinned, n);
      ray.eq_mat.topRows(me) = qp.eq_mat;
      int k = me;
      for (int j = 0; j < n; ++j)
        if (qp.quad(j) > 0) ray.eq_mat(k++, j) = 1.0;
      ray.eq_rhs = Eigen::VectorXd::Zero(me + pinned);
      ray.ineq_mat = Eigen::MatrixXd::Zero(mi + 2 * n, n);
      ray.ineq_mat.topRows(mi) = qp.ineq_mat;
      ray.ineq_mat.block(mi, 0, n, n).setIdentity();
      ray.ineq_mat.block(mi + n, 0, n, n) = -Eigen::MatrixXd::Identity(n, n);
      ray.ineq_rhs = Eigen::VectorXd::Zero(mi + 2 * n);
      ray.ineq_rhs.segment(mi, 2 * n).setOnes();
      IpmResult rr = InteriorPointSolver().solve(ray);
      if (rr.status == IpmStatus::Converged) {
        double scale = 1.0 + detail::inf_norm(qp.cost);
        if (qp.cost.dot(rr.x) < -1e-7 * scale) return SolveStatus::Unbounded;
      }
    }
    return SolveStatus::Limit;
  }

  // Best-first branch and bound over binary variables with continuous
  // relaxations solved by the interior-point core. Deterministic: node ids
  // break bound ties, branching picks the most fractional binary.
  SolveResult branch_and_bound(const ModelInstance& m) const {
    auto t0 = std::chrono::steady_clock::now();
    std::vector<int> bins;
    for (size_t j = 0; j < m.vars().size(); ++j)
      if (m.var(j).kind == VarKind::Binary &&
          m.var(j).hi - m.var(j).lo >= 1e-12)
        bins.push_back(static_cast<int>(j));
    if (bins.empty()) {
      SolveResult r = solve_continuous(m, /*relax_binaries=*/true);
      r.nodes = 1;
      return r;
    }

    struct Node {
      double bound;
      long id;
      std::vector<std::pair<int, int>> fixes;  // (var, value)
      bool operator>(const Node& o) const {
        return bound != o.bound ? bound > o.bound : id > o.id;
      }
    };
    std::priority_queue<Node, std::vector<Node>, std::greater<Node>> open;
    open.push(Node{-kInf, 0, {}});
    long next_id = 1, nodes = 0;
    SolveResult incumbent;
    incumbent.status = SolveStatus::Infeasible;
    double best = kInf;
    bool limit_hit = false;

    while (!open.empty()) {
      Node node = open.top();
      open.pop();
      if (node.bound >= best - 1e-9) continue;
      if (nodes >= cfg_.max_nodes || elapsed(t0) > cfg_.time_limit_s) {
        limit_hit = true;
        break;
      }
      ++nodes;

      ModelInstance sub = m;
      for (auto [v, val] : node.fixes) sub.fix_var(v, val);
      SolveResult rel = solve_continuous(sub, /*relax_binaries=*/true);
      if (rel.status == SolveStatus::Unbounded) {
        rel.nodes = nodes;
        rel.wall_time_s = elapsed(t0);
        return rel;
      }
      if (rel.status == SolveStatus::Limit)
        throw solver_error("relaxation of a search node failed to converge in " +
                           m.name);
      if (rel.status != SolveStatus::Optimal) continue;
      if (rel.objective >= best - 1e-9) continue;

      int branch_var = -1;
      double worst_frac = cfg_.int_tol;
      for (int j : bins) {
        double frac = std::abs(rel.x[j] - std::round(rel.x[j]));
        if (frac > worst_frac) {
          worst_frac = frac;
          branch_var = j;
        }
      }
      if (branch_var < 0) {
        // Integral relaxation: clean the point by re-solving with all
        // binaries pinned at their rounded values.
        ModelInstance leaf = m;
        for (int j : bins) leaf.fix_var(j, std::round(rel.x[j]));
        SolveResult cand = solve_continuous(leaf, /*relax_binaries=*/true);
        if (cand.status == SolveStatus::Limit)
          throw solver_error("incumbent cleanup failed to converge in " + m.name);
        if (cand.status == SolveStatus::Optimal && cand.objective < best) {
          best = cand.objective;
          incumbent = cand;
        }
        continue;
      }
      for (int val : {0, 1}) {
        Node child{std::max(node.bound, rel.objective), next_id++, node.fixes};
        child.fixes.emplace_back(branch_var, val);
        if (child.bound < best - 1e-9) open.push(child);
      }
    }

    incumbent.nodes = nodes;
    incumbent.wall_time_s = elapsed(t0);
    if (limit_hit) incumbent.status = SolveStatus::Limit;
    incumbent.duals.clear();
    incumbent.redcost_lo.clear();
    incumbent.redcost_hi.clear();
    return incumbent;
  }
};

}  // namespace mclear
