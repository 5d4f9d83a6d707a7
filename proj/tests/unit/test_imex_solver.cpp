#include "imexest/imex_solver.hpp"

#include <doctest.h>

#include <cmath>
#include <string>

using namespace imexest;

TEST_CASE("Midpoint step on a scalar split problem matches the hand-derived update") {
  const double lf = 0.8, lg = -3.0, y = 1.7, k = 0.1;
  const auto p = scalar_linear(lf, lg, y);
  const auto r = step(p, builtin("Midpoint(1,2,2)"), 0.0, k, p.y0);
  const double Y2 = y * (1.0 + k * lf / 2.0) / (1.0 - k * lg / 2.0);
  const double next = y + k * (lf + lg) * Y2;
  REQUIRE(r.stages.values.size() == 2);
  CHECK(r.stages.values[0](0) == doctest::Approx(y).epsilon(1e-15));
  CHECK(r.stages.values[1](0) == doctest::Approx(Y2).epsilon(1e-14));
  CHECK(r.next(0) == doctest::Approx(next).epsilon(1e-14));
  CHECK(r.stages.times[1] == doctest::Approx(0.05));
}

TEST_CASE("Newton work: none for explicit stages, one iteration per implicit linear stage") {
  const auto p = scalar_linear(1.0, -2.0);
  const auto mid = step(p, builtin("Midpoint(1,2,2)"), 0.0, 0.1, p.y0);
  CHECK(mid.newton_iterations == 1);
  const auto ssp = step(p, builtin("SSP3(3,3,2)"), 0.0, 0.1, p.y0);
  CHECK(ssp.newton_iterations == 3);
  const auto z = zero_rhs(2);
  const auto zr = step(z, builtin("SSP3(4,3,3)"), 0.0, 0.1, Vector::Ones(2));
  CHECK(zr.newton_iterations == 0);
}

TEST_CASE("zero right-hand side keeps the state fixed") {
  const auto z = zero_rhs(3);
  for (const auto& name : builtin_names()) {
    const auto sol = solve_forward(z, builtin(name), TimeGrid::uniform(1.0, 7));
    CHECK(sol.nodal.size() == 8);
    for (const auto& y : sol.nodal) CHECK((y - z.y0).norm() == 0.0);
  }
}

TEST_CASE("builtin schemes converge at their stated order on a stiff-free scalar problem") {
  const auto p = scalar_linear(1.0, -2.0);
  const double exact = std::exp(-1.0);
  for (const auto& name : builtin_names()) {
    const auto pair = builtin(name);
    const double e1 = std::abs(solve_forward(p, pair, TimeGrid::uniform(1.0, 20)).nodal.back()(0) - exact);
    const double e2 = std::abs(solve_forward(p, pair, TimeGrid::uniform(1.0, 40)).nodal.back()(0) - exact);
    CAPTURE(name);
    CHECK(std::log2(e1 / e2) == doctest::Approx(pair.order).epsilon(0.1));
  }
}

TEST_CASE("nonlinear implicit stages converge") {
  const auto p = logistic(0.5);
  const auto sol = solve_forward(p, builtin("SSP3(3,3,2)"), TimeGrid::uniform(2.0, 40));
  CHECK(sol.nodal.back()(0) == doctest::Approx(p.analytic(2.0)(0)).epsilon(1e-4));
  for (int it : sol.newton_iterations) CHECK(it >= 3);
}

TEST_CASE("TimeGrid validation") {
  CHECK_THROWS_AS(TimeGrid({0.0}), Error);
  CHECK_THROWS_AS(TimeGrid({0.0, 0.5, 0.5}), Error);
  CHECK_THROWS_AS(TimeGrid::uniform(1.0, 0), Error);
  CHECK_THROWS_AS(TimeGrid::uniform(-1.0, 4), Error);
  CHECK_THROWS_AS(TimeGrid::with_step(1.0, 0.3), Error);
  CHECK_THROWS_AS(TimeGrid::with_step(1.0, 0.0), Error);
  const auto g = TimeGrid::with_step(2.0, 1.0 / 40.0);
  CHECK(g.intervals() == 80);
  CHECK(g.final_time() == 2.0);
  CHECK(g.locate(0.0) == 0);
  CHECK(g.locate(2.0) == 79);
  CHECK(g.locate(0.025) == 1);
  CHECK_THROWS_AS(g.locate(2.1), Error);
  const auto t = g.tail(70);
  CHECK(t.intervals() == 10);
  CHECK(t.node(0) == g.node(70));
  CHECK_THROWS_AS(g.tail(80), Error);
}

TEST_CASE("Newton failures name the interval and stage") {
  const auto p = logistic(0.5);
  NewtonConfig cfg;
  cfg.max_iters = 1;
  cfg.abs_tol = 1e-15;
  cfg.rel_tol = 1e-16;
  try {
    solve_forward(p, builtin("Midpoint(1,2,2)"), TimeGrid::uniform(1.0, 4), cfg);
    FAIL("expected a NewtonError");
  } catch (const NewtonError& e) {
    CHECK(e.interval() == 0);
    CHECK(e.stage() == 1);
    CHECK(std::string(e.what()).find("interval 0, stage 1") != std::string::npos);
  }
  NewtonConfig bad;
  bad.max_iters = 0;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("step rejects bad input") {
  const auto p = scalar_linear(1.0, -1.0);
  CHECK_THROWS_AS(step(p, builtin("Midpoint(1,2,2)"), 0.0, 0.0, p.y0), Error);
  CHECK_THROWS_AS(step(p, builtin("Midpoint(1,2,2)"), 0.0, 0.1, Vector::Ones(2)), Error);
}
