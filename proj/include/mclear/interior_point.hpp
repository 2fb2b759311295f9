#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "mclear/common.hpp"

namespace mclear {

// Convex QP in the dense standard form consumed by the interior-point core:
//   minimize    0.5 x'Px + c'x          (P diagonal, nonnegative)
//   subject to  Ae x  = be
//               Ai x <= bi
// Variable bounds and senses are normalized away by the gateway layer.
struct StdQp {
  Eigen::VectorXd quad;  // diagonal of P
  Eigen::VectorXd cost;
  Eigen::MatrixXd eq_mat;
  Eigen::VectorXd eq_rhs;
  Eigen::MatrixXd ineq_mat;
  Eigen::VectorXd ineq_rhs;

  int n() const { return static_cast<int>(cost.size()); }
  int me() const { return static_cast<int>(eq_rhs.size()); }
  int mi() const { return static_cast<int>(ineq_rhs.size()); }

  double objective(const Eigen::VectorXd& x) const {
    return 0.5 * x.dot(quad.cwiseProduct(x)) + cost.dot(x);
  }
};

enum class IpmStatus { Converged, IterationLimit, Diverged };

struct IpmResult {
  IpmStatus status = IpmStatus::IterationLimit;
  Eigen::VectorXd x;
  Eigen::VectorXd y;  // equality duals, L = f + y'(Ae x - be)
  Eigen::VectorXd z;  // inequality duals >= 0, L = f + z'(Ai x - bi)
  double mu = kInf;
  double primal_residual = kInf;
  double dual_residual = kInf;
  int iterations = 0;
  bool polished = false;
};

// Ruiz-style equilibration: symmetric row/column scaling of the combined
// constraint matrix plus one objective scalar. The network susceptances sit
// three orders of magnitude above the reserve coefficients, and the scaled
// system is what keeps the Newton directions accurate.
struct Equilibration {
  Eigen::VectorXd col;      // x = col .* x_scaled
  Eigen::VectorXd row_eq;   // y = obj_scale * row_eq .* y_scaled
  Eigen::VectorXd row_ineq; // z = obj_scale * row_ineq .* z_scaled
  double obj_scale = 1.0;
};

inline Equilibration equilibrate(StdQp& qp, int passes = 4) {
  const int n = qp.n(), me = qp.me(), mi = qp.mi();
  Equilibration eq;
  eq.col = Eigen::VectorXd::Ones(n);
  eq.row_eq = Eigen::VectorXd::Ones(me);
  eq.row_ineq = Eigen::VectorXd::Ones(mi);
  for (int pass = 0; pass < passes; ++pass) {
    for (int i = 0; i < me; ++i) {
      double m = qp.eq_mat.row(i).cwiseAbs().maxCoeff();
      if (m > 0) {
        double s = 1.0 / std::sqrt(m);
        qp.eq_mat.row(i) *= s;
        qp.eq_rhs(i) *= s;
        eq.row_eq(i) *= s;
      }
    }
    for (int i = 0; i < mi; ++i) {
      double m = qp.ineq_mat.row(i).cwiseAbs().maxCoeff();
      if (m > 0) {
        double s = 1.0 / std::sqrt(m);
        qp.ineq_mat.row(i) *= s;
        qp.ineq_rhs(i) *= s;
        eq.row_ineq(i) *= s;
      }
    }
    for (int j = 0; j < n; ++j) {
      double m = 0.0;
      if (me) m = std::max(m, qp.eq_mat.col(j).cwiseAbs().maxCoeff());
      if (mi) m = std::max(m, qp.ineq_mat.col(j).cwiseAbs().maxCoeff());
      if (m > 0) {
        double s = 1.0 / std::sqrt(m);
        if (me) qp.eq_mat.col(j) *= s;
        if (mi) qp.ineq_mat.col(j) *= s;
        qp.cost(j) *= s;
        qp.quad(j) *= s * s;
        eq.col(j) *= s;
      }
    }
  }
  double cm = 0.0;
  for (int j = 0; j < n; ++j)
    cm = std::max(cm, std::max(std::abs(qp.cost(j)), std::abs(qp.quad(j))));
  if (cm > 0) {
    eq.obj_scale = cm;
    qp.cost /= cm;
    qp.quad /= cm;
  }
  return eq;
}

inline void unscale(const Equilibration& eq, IpmResult& r) {
  if (r.x.size() == eq.col.size()) r.x = eq.col.cwiseProduct(r.x);
  if (r.y.size() == eq.row_eq.size())
    r.y = eq.obj_scale * eq.row_eq.cwiseProduct(r.y);
  if (r.z.size() == eq.row_ineq.size())
    r.z = eq.obj_scale * eq.row_ineq.cwiseProduct(r.z);
}

namespace detail {

inline double inf_norm(const Eigen::VectorXd& v) {
  return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

// Equality-constrained KKT solve used by the polish step:
//   [P  Ae'  Aa'] [x ]   [-c]
//   [Ae  0    0 ] [y ] = [be]
//   [Aa  0    0 ] [za]   [ba]
// Rank deficiency is routine under degeneracy, so use a complete orthogonal
// decomposition and verify the residual afterwards.
struct KktSolution {
  bool consistent = false;
  Eigen::VectorXd x, y, za;
};

inline KktSolution solve_active_kkt(const StdQp& qp,
                                    const std::vector<int>& active,
                                    double scale) {
  const int n = qp.n(), me = qp.me(), ma = static_cast<int>(active.size());
  const int dim = n + me + ma;
  if (dim == 0) {
    KktSolution out;
    out.consistent = true;
    out.x.resize(0);
    out.y.resize(0);
    out.za.resize(0);
    return out;
  }
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::VectorXd rhs(dim);
  for (int j = 0; j < n; ++j) K(j, j) = qp.quad(j);
  if (me > 0) {
    K.block(n, 0, me, n) = qp.eq_mat;
    K.block(0, n, n, me) = qp.eq_mat.transpose();
  }
  for (int a = 0; a < ma; ++a) {
    K.row(n + me + a).head(n) = qp.ineq_mat.row(active[a]);
    K.col(n + me + a).head(n) = qp.ineq_mat.row(active[a]).transpose();
  }
  rhs.head(n) = -qp.cost;
  rhs.segment(n, me) = qp.eq_rhs;
  for (int a = 0; a < ma; ++a) rhs(n + me + a) = qp.ineq_rhs(active[a]);

  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(K);
  Eigen::VectorXd sol = cod.solve(rhs);
  KktSolution out;
  out.consistent =
      inf_norm(K * sol - rhs) <= 1e-8 * (scale + inf_norm(sol)) + 1e-10;
  out.x = sol.head(n);
  out.y = sol.segment(n, me);
  out.za = sol.tail(ma);
  return out;
}

}  // namespace detail

struct IpmOptions {
  int max_iterations = 200;
  double tol_primal = 1e-9;
  double tol_dual = 1e-9;
  double tol_mu = 1e-10;
  // Degenerate problems without strict complementarity reduce mu slowly;
  // once residuals are tight and mu is below this, the exact polish step is
  // attempted early and acts as the true optimality check.
  double tol_mu_polish = 1e-7;
  double regularization = 1e-9;
  bool polish = true;
};

// Mehrotra predictor-corrector for dense convex QP, followed by an
// active-set polish that re-solves the KKT system of the identified active
// set exactly. The polish is what pushes objective and dual accuracy to
// ~1e-12 relative, which the downstream 1e-6 absolute checks rely on.
class InteriorPointSolver {
 public:
  explicit InteriorPointSolver(IpmOptions opt = {}) : opt_(opt) {}

  IpmResult solve(const StdQp& qp) const {
    const int n = qp.n(), me = qp.me(), mi = qp.mi();
    IpmResult res;
    if (n == 0) {
      res.status = IpmStatus::Converged;
      res.x.resize(0);
      res.y = Eigen::VectorXd::Zero(me);
      res.z = Eigen::VectorXd::Zero(mi);
      res.mu = 0;
      res.primal_residual = std::max(detail::inf_norm(qp.eq_rhs),
                                     mi ? std::max(0.0, -qp.ineq_rhs.minCoeff()) : 0.0);
      res.dual_residual = 0;
      if (res.primal_residual > 1e-9) res.status = IpmStatus::Diverged;
      return res;
    }
    if (mi == 0) return solve_equality_only(qp);

    const double scale_b =
        1.0 + std::max(detail::inf_norm(qp.eq_rhs), detail::inf_norm(qp.ineq_rhs));
    const double scale_c = 1.0 + detail::inf_norm(qp.cost);

    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd y = Eigen::VectorXd::Zero(me);
    Eigen::VectorXd s(mi), z(mi);
    for (int i = 0; i < mi; ++i) s(i) = std::max(1.0, std::abs(qp.ineq_rhs(i)));
    z.setOnes();

    Eigen::MatrixXd M(n + me, n + me);
    Eigen::VectorXd rd(n), rp(me), rg(mi);

    for (int iter = 0; iter < opt_.max_iterations; ++iter) {
      rd = qp.quad.cwiseProduct(x) + qp.cost;
      if (me) rd += qp.eq_mat.transpose() * y;
      rd += qp.ineq_mat.transpose() * z;
      if (me) rp = qp.eq_mat * x - qp.eq_rhs;
      rg = qp.ineq_mat * x + s - qp.ineq_rhs;
      double mu = s.dot(z) / mi;

      res.iterations = iter;
      res.primal_residual = std::max(me ? detail::inf_norm(rp) : 0.0, detail::inf_norm(rg));
      res.dual_residual = detail::inf_norm(rd);
      res.mu = mu;
      const bool residuals_ok = res.primal_residual <= opt_.tol_primal * scale_b &&
                                res.dual_residual <= opt_.tol_dual * scale_c;
      if (residuals_ok && mu <= opt_.tol_mu * scale_c) {
        res.status = IpmStatus::Converged;
        break;
      }
      // The regularization floors the attainable dual residual when duals
      // are large, so the polish gate looks at mu and primal accuracy only;
      // polish re-derives the duals exactly.
      if (opt_.polish && mu <= opt_.tol_mu_polish * scale_c &&
          res.primal_residual <= 1e2 * opt_.tol_primal * scale_b) {
        res.x = x;
        res.y = y;
        res.z = z;
        if (polish(qp, res, scale_b + scale_c)) {
          res.status = IpmStatus::Converged;
          return res;
        }
      }
      if (!x.allFinite() || !s.allFinite() || !z.allFinite() ||
          detail::inf_norm(x) > 1e14) {
        res.status = IpmStatus::Diverged;
        break;
      }

      Eigen::VectorXd d = (z.array() / s.array()).cwiseMax(1e-14).cwiseMin(1e14).matrix();
      M.setZero();
      for (int j = 0; j < n; ++j) M(j, j) = qp.quad(j) + opt_.regularization;
      M.topLeftCorner(n, n).noalias() +=
          qp.ineq_mat.transpose() * d.asDiagonal() * qp.ineq_mat;
      if (me) {
        M.block(0, n, n, me) = qp.eq_mat.transpose();
        M.block(n, 0, me, n) = qp.eq_mat;
        M.block(n, n, me, me).diagonal().setConstant(-opt_.regularization);
      }
      Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);

      auto solve_step = [&](const Eigen::VectorXd& rc, Eigen::VectorXd& dx,
                            Eigen::VectorXd& dy, Eigen::VectorXd& dz,
                            Eigen::VectorXd& ds) {
        Eigen::VectorXd rhs(n + me);
        Eigen::VectorXd w = (rc + z.cwiseProduct(rg)).cwiseQuotient(s);
        rhs.head(n) = -rd - qp.ineq_mat.transpose() * w;
        if (me) rhs.tail(me) = -rp;
        Eigen::VectorXd sol = lu.solve(rhs);
        sol += lu.solve(rhs - M * sol);  // one round of iterative refinement
        dx = sol.head(n);
        dy = sol.tail(me);
        dz = w + d.cwiseProduct(qp.ineq_mat * dx);
        ds = -rg - qp.ineq_mat * dx;
      };

      Eigen::VectorXd dx_a, dy_a, dz_a, ds_a;
      solve_step(-s.cwiseProduct(z), dx_a, dy_a, dz_a, ds_a);
      double ap_aff = max_step(s, ds_a), ad_aff = max_step(z, dz_a);
      double mu_aff =
          (s + ap_aff * ds_a).dot(z + ad_aff * dz_a) / mi;
      double sigma = std::pow(mu_aff / std::max(mu, 1e-300), 3.0);
      sigma = std::min(1.0, std::max(0.0, sigma));

      Eigen::VectorXd rc = -s.cwiseProduct(z) - ds_a.cwiseProduct(dz_a);
      rc.array() += sigma * mu;
      Eigen::VectorXd dx, dy, dz, ds;
      solve_step(rc, dx, dy, dz, ds);

      double ap = 0.995 * max_step(s, ds);
      double ad = 0.995 * max_step(z, dz);
      ap = std::min(1.0, ap);
      ad = std::min(1.0, ad);
      x += ap * dx;
      s += ap * ds;
      y += ad * dy;
      z += ad * dz;
    }

    res.x = x;
    res.y = y;
    res.z = z;
    if (opt_.polish) {
      bool worth_trying = res.status == IpmStatus::Converged ||
                          (res.mu <= 1e-5 * scale_c &&
                           res.primal_residual <= 1e-5 * scale_b);
      if (worth_trying && polish(qp, res, scale_b + scale_c))
        res.status = IpmStatus::Converged;
    }
    return res;
  }

  // Re-solve the KKT system of the active set identified by the interior
  // point, then repair the set while duals come out negative or inactive
  // rows get violated. Returns true when a machine-accurate KKT point was
  // adopted. Public so the gateway can re-polish in unscaled space.
  bool polish(const StdQp& qp, IpmResult& res, double scale) const {
    const int mi = qp.mi();
    Eigen::VectorXd slack = qp.ineq_rhs - qp.ineq_mat * res.x;
    std::vector<int> active;
    for (int i = 0; i < mi; ++i)
      if (res.z(i) > slack(i)) active.push_back(i);

    const double dual_tol = 1e-7 * scale;
    const double feas_tol = 1e-8 * scale;
    for (int round = 0; round < 60; ++round) {
      auto sol = detail::solve_active_kkt(qp, active, scale);
      if (!sol.consistent) return false;  // keep the interior iterate

      int worst_dual = -1, worst_row = -1;
      double worst_dual_val = -dual_tol, worst_viol = feas_tol;
      for (size_t a = 0; a < active.size(); ++a)
        if (sol.za(a) < worst_dual_val) {
          worst_dual_val = sol.za(a);
          worst_dual = static_cast<int>(a);
        }
      Eigen::VectorXd act = qp.ineq_mat * sol.x - qp.ineq_rhs;
      for (int i = 0; i < mi; ++i) {
        if (std::find(active.begin(), active.end(), i) != active.end()) continue;
        if (act(i) > worst_viol) {
          worst_viol = act(i);
          worst_row = i;
        }
      }
      if (worst_dual >= 0) {
        active.erase(active.begin() + worst_dual);
        continue;
      }
      if (worst_row >= 0) {
        active.push_back(worst_row);
        std::sort(active.begin(), active.end());
        continue;
      }

      // Clean point: adopt it.
      res.x = sol.x;
      res.y = sol.y;
      res.z = Eigen::VectorXd::Zero(mi);
      for (size_t a = 0; a < active.size(); ++a)
        res.z(active[a]) = std::max(0.0, sol.za(a));
      Eigen::VectorXd rd = qp.quad.cwiseProduct(res.x) + qp.cost;
      if (qp.me()) rd += qp.eq_mat.transpose() * res.y;
      rd += qp.ineq_mat.transpose() * res.z;
      Eigen::VectorXd rg = qp.ineq_mat * res.x - qp.ineq_rhs;
      res.primal_residual =
          std::max(qp.me() ? detail::inf_norm(qp.eq_mat * res.x - qp.eq_rhs) : 0.0,
                   rg.size() ? std::max(0.0, rg.maxCoeff()) : 0.0);
      res.dual_residual = detail::inf_norm(rd);
      res.mu = 0.0;
      res.polished = true;
      return true;
    }
    return false;
  }

 private:
  IpmOptions opt_;

  static double max_step(const Eigen::VectorXd& v, const Eigen::VectorXd& dv) {
    double a = 1.0;
    for (int i = 0; i < v.size(); ++i)
      if (dv(i) < 0) a = std::min(a, -v(i) / dv(i));
    return a;
  }

  IpmResult solve_equality_only(const StdQp& qp) const {
    IpmResult res;
    auto sol = detail::solve_active_kkt(qp, {}, 1.0 + detail::inf_norm(qp.eq_rhs) +
                                                 detail::inf_norm(qp.cost));
    res.x = sol.x;
    res.y = sol.y;
    res.z.resize(0);
    res.mu = 0;
    if (!sol.consistent) {
      res.status = IpmStatus::Diverged;
      return res;
    }
    Eigen::VectorXd rd = qp.quad.cwiseProduct(res.x) + qp.cost;
    if (qp.me()) rd += qp.eq_mat.transpose() * res.y;
    res.primal_residual = qp.me() ? detail::inf_norm(qp.eq_mat * res.x - qp.eq_rhs) : 0.0;
    res.dual_residual = detail::inf_norm(rd);
    res.status = (res.primal_residual < 1e-7 && res.dual_residual < 1e-7)
                     ? IpmStatus::Converged
                     : IpmStatus::Diverged;
    res.polished = res.status == IpmStatus::Converged;
    return res;
  }

};

}  // namespace mclear
