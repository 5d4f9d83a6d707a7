#include "imexest/experiment.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <string>

using namespace imexest;
using nlohmann::json;

namespace {

json zero_config() {
  return json{{"scheme", "SSP3(3,3,2)"},
              {"problem", {{"name", "zero_rhs"}, {"params", {{"dim", 3}}}}},
              {"grid", {{"T", 1.0}, {"N", 4}}}};
}

}  // namespace

TEST_CASE("config parsing rejects bad input") {
  auto j = zero_config();
  j["colour"] = "blue";
  CHECK_THROWS_WITH_AS(RunConfig::from_json(j), doctest::Contains("unknown key 'colour'"), Error);
  j = zero_config();
  j["grid"] = {{"T", 1.0}, {"k", 0.3}};
  const auto cfg = RunConfig::from_json(j);
  CHECK_THROWS_WITH_AS(run(cfg), doctest::Contains("[config]"), StageError);
  j["grid"] = {{"T", 1.0}, {"k", 0.25}, {"N", 4}};
  CHECK_THROWS_AS(RunConfig::from_json(j), Error);
  j = zero_config();
  j["scheme"] = "Euler";
  CHECK_THROWS_WITH_AS(run(RunConfig::from_json(j)), doctest::Contains("[config]"), StageError);
  j = zero_config();
  j["problem"] = "heat";
  CHECK_THROWS_WITH_AS(RunConfig::from_json(j), doctest::Contains("unknown problem 'heat'"), Error);
}

TEST_CASE("config echo round-trips") {
  const auto cfg = RunConfig::from_json(zero_config());
  const auto echo = cfg.to_json();
  const auto again = RunConfig::from_json(echo);
  CHECK(again.to_json() == echo);
  CHECK(echo.at("problem").at("params").at("dim") == 3);
}

TEST_CASE("zero right-hand side run has no error and no effectivity") {
  const auto row = run(RunConfig::from_json(zero_config()));
  CHECK(row.e1 == 0.0);
  CHECK(row.e2 == 0.0);
  CHECK(row.e3 == 0.0);
  REQUIRE(row.true_error.has_value());
  CHECK(*row.true_error == 0.0);
  CHECK_FALSE(row.effectivity.has_value());
  CHECK(row.metadata.at("linearization") == "discrete-solution");
}

TEST_CASE("forward failures are labeled with their stage") {
  auto j = zero_config();
  j["problem"] = {{"name", "logistic"}, {"params", {{"y0", 0.5}}}};
  j["newton"] = {{"max_iters", 1}, {"abs_tol", 1e-16}, {"rel_tol", 1e-17}};
  CHECK_THROWS_WITH_AS(run(RunConfig::from_json(j)), doctest::Contains("[forward]"), StageError);
}

TEST_CASE("table runs are deterministic and ordered") {
  const auto a = reproduce_table(4, 1);
  const auto b = reproduce_table(4, 3);
  REQUIRE(a.size() == 3);
  CHECK(a[0].scheme == "Midpoint(1,2,2)");
  CHECK(a[1].scheme == "SSP3(3,3,2)");
  CHECK(a[2].scheme == "SSP3(4,3,3)");
  CHECK(render_csv(a) == render_csv(b));
  for (int id : table_ids()) CHECK(table_configs(id).size() == 3);
  CHECK_THROWS_AS(table_configs(3), Error);
}

TEST_CASE("CSV output") {
  const auto rows = reproduce_table(4, 1);
  const auto text = render_csv(rows);
  CHECK(text.find("scheme,computed_error,true_error,effectivity,E1,E2,E3") != std::string::npos);
  CHECK(format_number(-1.5e-6) == "-1.50000e-06");
  const auto dir = std::filesystem::temp_directory_path() / "imexest_unit";
  const auto path = (dir / "nested" / "t4.csv").string();
  write_text(path, text);
  CHECK(std::filesystem::file_size(path) == text.size());
  std::filesystem::remove_all(dir);
}

TEST_CASE("convergence study") {
  auto j = zero_config();
  j["problem"] = {{"name", "scalar_linear"}};
  j["scheme"] = "Midpoint(1,2,2)";
  j["grid"] = {{"T", 1.0}, {"N", 10}};
  const auto levels = convergence_study(RunConfig::from_json(j), 4);
  REQUIRE(levels.size() == 4);
  CHECK_FALSE(levels[0].order.has_value());
  CHECK(*levels[3].order == doctest::Approx(2.0).epsilon(0.05));
  CHECK(levels[1].k == doctest::Approx(0.05));

  const auto zero = convergence_study(RunConfig::from_json(zero_config()), 3);
  for (const auto& l : zero) {
    CHECK(l.error == 0.0);
    CHECK_FALSE(l.order.has_value());
  }
  CHECK_THROWS_AS(convergence_study(RunConfig::from_json(zero_config()), 2), Error);
}

TEST_CASE("thread count from the environment") {
  setenv("IMEXEST_THREADS", "3", 1);
  CHECK(thread_count_from_env() == 3);
  setenv("IMEXEST_THREADS", "0", 1);
  CHECK_THROWS_AS(thread_count_from_env(), Error);
  setenv("IMEXEST_THREADS", "two", 1);
  CHECK_THROWS_AS(thread_count_from_env(), Error);
  unsetenv("IMEXEST_THREADS");
  CHECK(thread_count_from_env() >= 1);
}
