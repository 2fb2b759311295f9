#include <catch2/catch_amalgamated.hpp>

#include "mclear/solver.hpp"

using namespace mclear;

namespace {

ModelInstance tiny_ge(double rhs) {
  ModelInstance m;
  m.name = "tiny";
  int x = m.add_var("x", VarKind::Continuous, -kInf, kInf);
  m.add_obj(x, 1.0);
  m.add_con("floor", {{x, 1.0}}, Sense::GE, rhs, "plumbing");
  return m;
}

}  // namespace

TEST_CASE("lp: single variable floor") {
  SolverGateway gw;
  auto r = gw.solve_lp_with_duals(tiny_ge(3.0));
  REQUIRE(r.status == SolveStatus::Optimal);
  CHECK(r.objective == Catch::Approx(3.0).margin(1e-9));
  CHECK(r.x[0] == Catch::Approx(3.0).margin(1e-9));
  // multiplier of the binding floor row
  CHECK(r.duals[0] == Catch::Approx(1.0).margin(1e-8));
  CHECK(std::abs(r.objective - SolverGateway::dual_objective(tiny_ge(3.0), r)) < 1e-6);
}

TEST_CASE("lp: infeasible box") {
  ModelInstance m;
  int x = m.add_var("x", VarKind::Continuous, 1.0, 0.0);
  m.add_obj(x, 1.0);
  SolverGateway gw;
  CHECK(gw.solve_lp_with_duals(m).status == SolveStatus::Infeasible);
}

TEST_CASE("lp: contradictory rows detected infeasible") {
  ModelInstance m;
  int x = m.add_var("x", VarKind::Continuous, 0.0, 10.0);
  m.add_obj(x, 1.0);
  m.add_con("hi", {{x, 1.0}}, Sense::LE, 2.0, "plumbing");
  m.add_con("lo", {{x, 1.0}}, Sense::GE, 5.0, "plumbing");
  SolverGateway gw;
  CHECK(gw.solve_lp_with_duals(m).status == SolveStatus::Infeasible);
}

TEST_CASE("lp: unbounded ray detected") {
  ModelInstance m;
  int x = m.add_var("x", VarKind::Continuous, -kInf, kInf);
  m.add_obj(x, 1.0);
  m.add_con("cap", {{x, 1.0}}, Sense::LE, 5.0, "plumbing");
  SolverGateway gw;
  CHECK(gw.solve_lp_with_duals(m).status == SolveStatus::Unbounded);
}

TEST_CASE("lp: vertex solutions are polished to machine accuracy") {
  ModelInstance m;
  int x = m.add_var("x", VarKind::Continuous, 0.0, kInf);
  int y = m.add_var("y", VarKind::Continuous, 0.0, kInf);
  m.add_obj(x, -1.0);
  m.add_obj(y, -1.0);
  m.add_con("c1", {{x, 1.0}, {y, 2.0}}, Sense::LE, 1.0, "plumbing");
  m.add_con("c2", {{x, 2.0}, {y, 1.0}}, Sense::LE, 1.0, "plumbing");
  SolverGateway gw;
  auto r = gw.solve_lp_with_duals(m);
  REQUIRE(r.status == SolveStatus::Optimal);
  CHECK(std::abs(r.objective + 2.0 / 3.0) < 1e-11);
  CHECK(std::abs(r.x[0] - 1.0 / 3.0) < 1e-11);
}

TEST_CASE("lp: transportation duals satisfy complementary slackness") {
  // two supplies (3, 2), two demands (2, 3), costs {{1,3},{4,1}}
  ModelInstance m;
  int x11 = m.add_var("x11", VarKind::Continuous, 0.0, kInf);
  int x12 = m.add_var("x12", VarKind::Continuous, 0.0, kInf);
  int x21 = m.add_var("x21", VarKind::Continuous, 0.0, kInf);
  int x22 = m.add_var("x22", VarKind::Continuous, 0.0, kInf);
  m.add_obj(x11, 1.0);
  m.add_obj(x12, 3.0);
  m.add_obj(x21, 4.0);
  m.add_obj(x22, 1.0);
  m.add_con("s1", {{x11, 1.0}, {x12, 1.0}}, Sense::LE, 3.0, "plumbing");
  m.add_con("s2", {{x21, 1.0}, {x22, 1.0}}, Sense::LE, 2.0, "plumbing");
  m.add_con("d1", {{x11, 1.0}, {x21, 1.0}}, Sense::GE, 2.0, "plumbing");
  m.add_con("d2", {{x12, 1.0}, {x22, 1.0}}, Sense::GE, 3.0, "plumbing");
  SolverGateway gw;
  auto r = gw.solve_lp_with_duals(m);
  REQUIRE(r.status == SolveStatus::Optimal);
  CHECK(r.objective == Catch::Approx(7.0).margin(1e-8));
  for (size_t i = 0; i < m.cons().size(); ++i) {
    const auto& c = m.con(i);
    double slack = m.row_activity(c, r.x) - c.rhs;
    if (c.sense == Sense::GE) slack = -slack;
    CHECK(std::abs(r.duals[i] * slack) < 1e-7);  // y_i * slack_i = 0
    CHECK(r.duals[i] >= -1e-9);
  }
  CHECK(std::abs(r.objective - SolverGateway::dual_objective(m, r)) < 1e-6);
}

TEST_CASE("lp: degenerate duplicate rows keep valid residuals") {
  ModelInstance m;
  int x = m.add_var("x", VarKind::Continuous, -kInf, kInf);
  m.add_obj(x, 1.0);
  m.add_con("floor_a", {{x, 1.0}}, Sense::GE, 3.0, "plumbing");
  m.add_con("floor_b", {{x, 1.0}}, Sense::GE, 3.0, "plumbing");
  SolverGateway gw;
  auto r = gw.solve_lp_with_duals(m);
  REQUIRE(r.status == SolveStatus::Optimal);
  CHECK(r.primal_residual < 1e-6);
  CHECK(std::abs(r.objective - 3.0) < 1e-8);
  CHECK(std::abs(r.objective - SolverGateway::dual_objective(m, r)) < 1e-6);
}

TEST_CASE("milp: toy knapsack matches brute force") {
  ModelInstance m;
  int a = m.add_var("a", VarKind::Binary, 0, 1);
  int b = m.add_var("b", VarKind::Binary, 0, 1);
  m.add_obj(a, -3.0);
  m.add_obj(b, -4.0);
  m.add_con("weight", {{a, 2.0}, {b, 3.0}}, Sense::LE, 4.0, "plumbing");
  SolverGateway gw;
  auto bb = gw.solve_milp(m);
  auto en = gw.enumerate_binaries(m, 16);
  REQUIRE(bb.status == SolveStatus::Optimal);
  REQUIRE(en.status == SolveStatus::Optimal);
  CHECK(bb.objective == Catch::Approx(-4.0).margin(1e-9));
  CHECK(std::abs(bb.objective - en.objective) < 1e-9);
}

TEST_CASE("milp: rejects quadratic models and unfixed binaries in lp path") {
  ModelInstance m;
  int q = m.add_var("q", VarKind::Continuous, 0.0, 10.0);
  m.add_obj_quad(q, 1.0);
  SolverGateway gw;
  CHECK_THROWS_AS(gw.solve_milp(m), Error);

  ModelInstance mb;
  mb.add_var("z", VarKind::Binary, 0, 1);
  CHECK_THROWS_AS(gw.solve_lp_with_duals(mb), Error);
  mb.fix_var(0, 1.0);
  CHECK(gw.solve_lp_with_duals(mb).status == SolveStatus::Optimal);
}

TEST_CASE("miqp: scalar quadratic with floor") {
  ModelInstance m;
  int q = m.add_var("q", VarKind::Continuous, -kInf, kInf);
  m.add_obj_quad(q, 1.0);
  m.add_con("floor", {{q, 1.0}}, Sense::GE, 3.0, "plumbing");
  SolverGateway gw;
  auto r = gw.solve_miqp(m);
  REQUIRE(r.status == SolveStatus::Optimal);
  CHECK(r.objective == Catch::Approx(9.0).margin(1e-8));
  auto rq = gw.solve_qp_with_duals(m);
  CHECK(rq.duals[0] == Catch::Approx(6.0).margin(1e-7));
}

TEST_CASE("miqp: quadratic-free model reduces to milp result") {
  ModelInstance m;
  int a = m.add_var("a", VarKind::Binary, 0, 1);
  m.add_obj(a, -1.0);
  SolverGateway gw;
  CHECK(gw.solve_miqp(m).objective == Catch::Approx(gw.solve_milp(m).objective));
}

TEST_CASE("miqp: native and enumeration agree on a toy model") {
  // one binary switching the floor of a quadratic variable
  ModelInstance m;
  int q = m.add_var("q", VarKind::Continuous, 0.0, 10.0);
  int z = m.add_var("z", VarKind::Binary, 0, 1);
  m.add_obj_quad(q, 1.0);
  m.add_obj(q, -4.0);
  m.add_obj(z, 1.5);
  m.add_con("switch", {{q, 1.0}, {z, -10.0}}, Sense::LE, 3.0, "plumbing");
  SolverGateway gw;
  auto bb = gw.solve_miqp(m);
  auto en = gw.enumerate_binaries(m, 8);
  REQUIRE(bb.status == SolveStatus::Optimal);
  CHECK(std::abs(bb.objective - en.objective) < 1e-8);

  SolverConfig pwl_cfg;
  pwl_cfg.use_pwl = true;
  pwl_cfg.pwl_segments = 64;
  SolverGateway gw_pwl(pwl_cfg);
  auto pw = gw_pwl.solve_miqp(m);
  REQUIRE(pw.status == SolveStatus::Optimal);
  CHECK(pw.pwl_bound > 0.0);
  CHECK(pw.objective >= en.objective - 1e-8);
  CHECK(pw.objective <= en.objective + pw.pwl_bound + 1e-8);
}

TEST_CASE("pwl: certified secant bounds") {
  auto ap = pwl_approximate(1.0, 0.0, 10.0, 10);
  CHECK(ap.bound == Catch::Approx(0.25).margin(1e-12));
  CHECK(ap.cuts.size() == 10);

  CHECK(pwl_approximate(0.0, 0.0, 1.0, 4).cuts.empty());
  CHECK(pwl_approximate(0.0, 0.0, 1.0, 4).bound == 0.0);

  auto one = pwl_approximate(1.0, 0.0, 2.0, 1);
  CHECK(one.bound == Catch::Approx(1.0).margin(1e-12));
  // single secant evaluated at the midpoint: 2 vs the true value 1
  CHECK(one.cuts[0].slope * 1.0 + one.cuts[0].intercept ==
        Catch::Approx(2.0).margin(1e-12));

  CHECK_THROWS_AS(pwl_approximate(-1.0, 0.0, 1.0, 2), Error);
  CHECK_THROWS_AS(pwl_approximate(1.0, 1.0, 1.0, 2), Error);
}

TEST_CASE("pwl: doubling segments never increases the certified bound") {
  double prev = kInf;
  for (int segs : {1, 2, 4, 8, 16, 32, 64}) {
    double b = pwl_approximate(2.5, -3.0, 7.0, segs).bound;
    CHECK(b <= prev + 1e-15);
    prev = b;
  }
}

TEST_CASE("enumerate: edge cases") {
  SolverGateway gw;
  {  // no binaries: one continuous solve
    auto r = gw.enumerate_binaries(tiny_ge(3.0), 1024);
    REQUIRE(r.status == SolveStatus::Optimal);
    CHECK(r.nodes == 1);
    CHECK(r.objective == Catch::Approx(3.0).margin(1e-9));
  }
  {  // all assignments infeasible
    ModelInstance m;
    int z1 = m.add_var("z1", VarKind::Binary, 0, 1);
    int z2 = m.add_var("z2", VarKind::Binary, 0, 1);
    int z3 = m.add_var("z3", VarKind::Binary, 0, 1);
    m.add_con("gap", {{z1, 1.0}, {z2, 1.0}, {z3, 1.0}}, Sense::GE, 3.5, "plumbing");
    CHECK(gw.enumerate_binaries(m, 16).status == SolveStatus::Infeasible);
  }
  {  // budget guard
    ModelInstance m;
    for (int k = 0; k < 5; ++k)
      m.add_var("z" + std::to_string(k), VarKind::Binary, 0, 1);
    CHECK_THROWS_AS(gw.enumerate_binaries(m, 16), Error);
  }
}

TEST_CASE("model: stats and empty model") {
  ModelInstance m;
  auto s = model_stats(m);
  CHECK(s.binaries == 0);
  CHECK(s.continuous == 0);
  CHECK(s.rows == 0);

  m.add_var("x", VarKind::Continuous, 0, 1);
  m.add_var("z", VarKind::Binary, 0, 1);
  m.add_con("r", {{0, 1.0}}, Sense::LE, 1.0, "plumbing");
  s = model_stats(m);
  CHECK(s.binaries == 1);
  CHECK(s.continuous == 1);
  CHECK(s.rows == 1);
  CHECK_THROWS_AS(m.add_var("x", VarKind::Continuous, 0, 1), Error);
}
