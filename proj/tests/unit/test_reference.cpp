#include "imexest/reference.hpp"

#include <doctest.h>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <string>

using namespace imexest;

TEST_CASE("numeric reference of a decaying scalar") {
  const auto p = scalar_linear(-0.25, -0.75);
  const auto r = true_qoi(p, TimeGrid::uniform(1.0, 10), QoiSpec::final_time(Vector::Ones(1)));
  CHECK(std::abs(r.value - std::exp(-1.0)) <= 1e-11);
  CHECK(r.halving_change <= 1e-11);
  CHECK(r.steps > 0);
}

TEST_CASE("numeric reference matches a matrix exponential") {
  Vector y0(2);
  y0 << 1.0, 0.5;
  const auto p = rotation_decay(0.3, 4.0, y0);
  Matrix A(2, 2);
  A << -0.3, 4.0, -4.0, -0.3;
  const std::vector<double> times{0.0, 0.5, 1.3, 2.0};
  const auto states = reference_states(p, times);
  REQUIRE(states.size() == times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    const Matrix At = A * times[i];
    CHECK((states[i] - At.exp() * y0).lpNorm<Eigen::Infinity>() <= 1e-10);
  }
}

TEST_CASE("analytic mode evaluates the closed form") {
  ReferenceConfig cfg;
  cfg.mode = ReferenceConfig::Mode::analytic;
  const auto p = mhd_alfven(AlfvenParams{}, 0.05);
  const auto psi = Vector::Unit(static_cast<Eigen::Index>(p.dim), 3);
  const auto r = true_qoi(p, TimeGrid::uniform(0.1, 10), QoiSpec::final_time(psi), cfg);
  CHECK(r.value == alfven_analytic(AlfvenParams{}, 4 * 0.05, 0.1).first);
  CHECK(r.halving_change == 0.0);
  CHECK_THROWS_AS(true_qoi(burgers(0.05, 0.1), TimeGrid::uniform(0.1, 1),
                           QoiSpec::final_time(Vector::Ones(20)), cfg),
                  Error);
}

TEST_CASE("time-integrated reference") {
  const auto p = scalar_linear(0.0, -1.0);
  const auto q = QoiSpec::time_integrated(1, [](double) { return Vector::Ones(1); });
  const auto r = true_qoi(p, TimeGrid::uniform(2.0, 4), q);
  CHECK(r.value == doctest::Approx(1.0 - std::exp(-2.0)).epsilon(1e-11));
  ReferenceConfig a;
  a.mode = ReferenceConfig::Mode::analytic;
  CHECK(true_qoi(p, TimeGrid::uniform(2.0, 4), q, a).value ==
        doctest::Approx(1.0 - std::exp(-2.0)).epsilon(1e-13));
}

TEST_CASE("stiff benchmark completes and the step cap errors out cleanly") {
  const auto p = linear_advection_diffusion(0.1, 1.0 / 40.0);
  const auto grid = TimeGrid::uniform(0.25, 10);
  const auto q = qoi_mean_left_half(40);
  CHECK_NOTHROW(true_qoi(p, grid, q));
  ReferenceConfig capped;
  capped.max_steps = 10;
  try {
    true_qoi(p, grid, q, capped);
    FAIL("expected the step cap to trigger");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("step cap") != std::string::npos);
  }
}

TEST_CASE("reference configuration validation") {
  ReferenceConfig c;
  c.rel_tol = 0.0;
  CHECK_THROWS_AS(c.validate(), Error);
  CHECK(reference_mode_from_string("analytic") == ReferenceConfig::Mode::analytic);
  CHECK(to_string(ReferenceConfig::Mode::numeric) == "numeric");
  CHECK_THROWS_AS(reference_mode_from_string("exact"), Error);
}
