#include "imexest/adjoint.hpp"

#include "pipeline.hpp"

#include <doctest.h>

#include <cmath>

using namespace imexest;

TEST_CASE("scalar adjoint matches the closed form at the nodes") {
  const double lambda = -1.0;
  for (const auto& name : builtin_names()) {
    CAPTURE(name);
    Pipeline run(scalar_linear(-0.4, lambda + 0.4), builtin(name), TimeGrid::with_step(1.0, 1.0 / 40.0),
                 QoiSpec::final_time(Vector::Constant(1, 2.0)));
    const auto& phi = run.adjoint->phi;
    CHECK(phi.right_value(39)(0) == 2.0);
    for (std::size_t n = 0; n < 40; ++n) {
      const double t = run.grid.node(n);
      const double exact = 2.0 * std::exp(lambda * (1.0 - t));
      CHECK(std::abs(phi.left_value(n)(0) - exact) / exact <= 1e-6);
    }
  }
}

TEST_CASE("vanishing operator gives a constant adjoint") {
  Vector psi(3);
  psi << 1.0, -2.0, 0.5;
  Pipeline run(zero_rhs(3), builtin("SSP3(3,3,2)"), TimeGrid::uniform(1.0, 5),
               QoiSpec::final_time(psi));
  for (double t : {0.0, 0.13, 0.5, 1.0}) CHECK((run.adjoint->phi.eval(t) - psi).norm() == 0.0);
}

TEST_CASE("time-integrated adjoint with zero source vanishes") {
  Pipeline run(logistic(0.3), builtin("Midpoint(1,2,2)"), TimeGrid::uniform(1.0, 8),
               QoiSpec::time_integrated(1, [](double) { return Vector::Zero(1); }));
  for (std::size_t n = 0; n < 8; ++n) {
    for (const auto& v : run.adjoint->phi.interval(n)) CHECK(v.norm() == 0.0);
  }
}

TEST_CASE("Galerkin residual vanishes for both QoI kinds") {
  Pipeline fin(burgers(0.05, 1.0 / 20.0), builtin("SSP3(4,3,3)"), TimeGrid::uniform(0.5, 10),
               qoi_mean_left_half(40));
  CHECK(adjoint_galerkin_residual(fin.problem, *fin.cg, *fin.adjoint, fin.qoi) < 1e-10);
  Pipeline integ(burgers(0.05, 1.0 / 20.0), builtin("Midpoint(1,2,2)"), TimeGrid::uniform(0.5, 10),
                 QoiSpec::time_integrated(40, [](double t) { return Vector::Constant(40, t); }));
  CHECK(adjoint_galerkin_residual(integ.problem, *integ.cg, *integ.adjoint, integ.qoi) < 1e-10);
  CHECK(integ.adjoint->phi.right_value(9).norm() == 0.0);
}

TEST_CASE("backward sweep on a truncated grid reproduces the tail") {
  Pipeline run(burgers(0.05, 1.0 / 20.0), builtin("SSP3(3,3,2)"), TimeGrid::uniform(1.0, 20),
               qoi_mean_left_half(40));
  for (std::size_t first : {5u, 19u}) {
    const auto tail = run.cg->tail(first);
    const auto sol = solve_adjoint(run.problem, tail, run.qoi);
    for (std::size_t n = 0; n < tail.grid().intervals(); ++n) {
      const auto& a = sol.phi.interval(n);
      const auto& b = run.adjoint->phi.interval(n + first);
      for (std::size_t j = 0; j < a.size(); ++j) {
        CHECK((a[j] - b[j]).lpNorm<Eigen::Infinity>() <= 1e-12 * (1.0 + b[j].lpNorm<Eigen::Infinity>()));
      }
    }
  }
}

TEST_CASE("linearized operator") {
  SUBCASE("linear problems give a constant matrix") {
    Pipeline run(linear_advection_diffusion(0.1, 0.1), builtin("Midpoint(1,2,2)"),
                 TimeGrid::uniform(1.0, 4), qoi_mean_left_half(10));
    const LinearizedOperator op(run.problem, *run.cg);
    const Matrix a = Matrix(operator_eval(op, 0.1));
    const Matrix b = Matrix(operator_eval(op, 0.9));
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-12);
    const Matrix sys = Matrix(run.problem.jac_f(0.0, run.problem.y0) + run.problem.jac_g(0.0, run.problem.y0));
    CHECK((a - sys).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("Burgers at rest is pure diffusion") {
    auto p = burgers(0.05, 0.1);
    p.y0.setZero();
    Pipeline run(p, builtin("Midpoint(1,2,2)"), TimeGrid::uniform(0.2, 2), qoi_mean_left_half(20));
    const LinearizedOperator op(run.problem, *run.cg);
    const Matrix H = Matrix(op.eval(0.1));
    const double s = 0.05 / (0.1 * 0.1);
    for (Eigen::Index i = 0; i < 20; ++i) {
      CHECK(H(i, i) == doctest::Approx(-2.0 * s));
      CHECK(H(i, (i + 1) % 20) == doctest::Approx(s));
      CHECK(H(i, (i + 19) % 20) == doctest::Approx(s));
    }
  }
}
