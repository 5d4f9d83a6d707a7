#include "imexest/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

namespace imexest {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw Error(where + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) throw Error(where + ": unknown key '" + key + "'");
  }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

/// Default parameters per problem; user values override them key by key.
json problem_defaults(const std::string& name) {
  if (name == "linear_advection_diffusion") {
    return {{"gamma", 0.1}, {"h", 1.0 / 40.0}, {"swap_roles", false}};
  }
  if (name == "burgers") return {{"gamma", 0.05}, {"h", 1.0 / 40.0}};
  if (name == "mhd_alfven") {
    return {{"B0", 10.0}, {"rho", 1.0}, {"mu", 1.0}, {"eta", 1.0}, {"mu0", 1.0},
            {"U", 1.0},   {"h", 5e-3},  {"L", 1.0},  {"mode", "v_split"}};
  }
  if (name == "scalar_linear") return {{"lambda_f", 1.0}, {"lambda_g", -2.0}, {"y0", 1.0}};
  if (name == "logistic") return {{"y0", 0.5}};
  if (name == "rotation_decay") {
    return {{"decay", 1.0}, {"frequency", 2.0}, {"y0", std::vector<double>{1.0, 0.0}}};
  }
  if (name == "zero_rhs") return {{"dim", 2}};
  throw Error("unknown problem '" + name +
              "' (expected linear_advection_diffusion, burgers, mhd_alfven, scalar_linear, "
              "logistic, rotation_decay or zero_rhs)");
}

json merge_params(const std::string& name, const json& given) {
  json out = problem_defaults(name);
  std::set<std::string> allowed;
  for (const auto& [key, value] : out.items()) allowed.insert(key);
  reject_unknown(given, allowed, "problem." + name);
  for (const auto& [key, value] : given.items()) out[key] = value;
  return out;
}

Vector to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

RunConfig RunConfig::from_json(const json& j) {
  reject_unknown(j, {"scheme", "tableau_file", "reconstruction_degree", "problem", "grid", "qoi", "newton", "reference",
                     "output"},
                 "config");
  RunConfig c;
  c.scheme = get_or<std::string>(j, "scheme", c.scheme);
  c.tableau_file = get_or<std::string>(j, "tableau_file", "");
  if (j.contains("reconstruction_degree")) {
    c.reconstruction_degree = j.at("reconstruction_degree").get<int>();
  }

  if (j.contains("problem")) {
    const auto& p = j.at("problem");
    if (p.is_string()) {
      c.problem = p.get<std::string>();
    } else {
      reject_unknown(p, {"name", "params"}, "problem");
      if (!p.contains("name")) throw Error("problem: missing key 'name'");
      c.problem = p.at("name").get<std::string>();
      if (p.contains("params")) c.problem_params = p.at("params");
    }
  }
  c.problem_params = merge_params(c.problem, c.problem_params);

  if (!j.contains("grid")) throw Error("config: missing key 'grid'");
  const auto& g = j.at("grid");
  reject_unknown(g, {"T", "k", "N"}, "grid");
  if (!g.contains("T")) throw Error("grid: missing key 'T'");
  c.T = g.at("T").get<double>();
  if (g.contains("k")) c.k = g.at("k").get<double>();
  if (g.contains("N")) c.N = g.at("N").get<std::size_t>();
  if (c.k && c.N) throw Error("grid: give either k or N, not both");
  if (!c.k && !c.N) throw Error("grid: one of k or N is required");

  if (j.contains("qoi")) {
    c.qoi = j.at("qoi");
    reject_unknown(c.qoi, {"type", "psi", "scale"}, "qoi");
  }

  if (j.contains("newton")) {
    const auto& n = j.at("newton");
    reject_unknown(n, {"abs_tol", "rel_tol", "max_iters"}, "newton");
    c.newton.abs_tol = get_or(n, "abs_tol", c.newton.abs_tol);
    c.newton.rel_tol = get_or(n, "rel_tol", c.newton.rel_tol);
    c.newton.max_iters = get_or(n, "max_iters", c.newton.max_iters);
  }
  c.newton.validate();

  if (j.contains("reference")) {
    const auto& r = j.at("reference");
    reject_unknown(r, {"mode", "rel_tol", "abs_tol", "max_step", "max_steps"}, "reference");
    c.reference_mode = get_or<std::string>(r, "mode", c.reference_mode);
    c.reference.rel_tol = get_or(r, "rel_tol", c.reference.rel_tol);
    c.reference.abs_tol = get_or(r, "abs_tol", c.reference.abs_tol);
    c.reference.max_step = get_or(r, "max_step", c.reference.max_step);
    c.reference.max_steps = get_or(r, "max_steps", c.reference.max_steps);
  }
  if (c.reference_mode != "auto") reference_mode_from_string(c.reference_mode);
  c.reference.validate();

  if (j.contains("output")) {
    const auto& o = j.at("output");
    reject_unknown(o, {"csv", "series_dir", "components", "series_indices"}, "output");
    c.output.csv = get_or<std::string>(o, "csv", "");
    c.output.series_dir = get_or<std::string>(o, "series_dir", "");
    if (o.contains("components")) c.output.components = o.at("components").get<bool>();
    if (o.contains("series_indices")) {
      c.output.series_indices = o.at("series_indices").get<std::vector<std::size_t>>();
    }
  }
  return c;
}

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return from_json(j);
}

json RunConfig::to_json() const {
  json j;
  if (tableau_file.empty()) {
    j["scheme"] = scheme;
  } else {
    j["tableau_file"] = tableau_file;
  }
  if (reconstruction_degree) j["reconstruction_degree"] = *reconstruction_degree;
  j["problem"] = {{"name", problem}, {"params", problem_params}};
  j["grid"] = {{"T", T}};
  if (k) j["grid"]["k"] = *k;
  if (N) j["grid"]["N"] = *N;
  j["qoi"] = qoi;
  j["newton"] = {{"abs_tol", newton.abs_tol},
                 {"rel_tol", newton.rel_tol},
                 {"max_iters", newton.max_iters}};
  j["reference"] = {{"mode", reference_mode},
                    {"rel_tol", reference.rel_tol},
                    {"abs_tol", reference.abs_tol},
                    {"max_step", reference.max_step},
                    {"max_steps", reference.max_steps}};
  json o = json::object();
  if (!output.csv.empty()) o["csv"] = output.csv;
  if (!output.series_dir.empty()) o["series_dir"] = output.series_dir;
  if (output.components) o["components"] = *output.components;
  if (!output.series_indices.empty()) o["series_indices"] = output.series_indices;
  j["output"] = o;
  return j;
}

ImexPair resolve_scheme(const RunConfig& cfg) {
  ImexPair pair = cfg.tableau_file.empty() ? builtin(cfg.scheme) : load_pair_file(cfg.tableau_file);
  if (cfg.reconstruction_degree) {
    pair.reconstruction_degree = *cfg.reconstruction_degree;
    const auto report = validate(pair);
    if (!report.ok()) throw Error(report.violations.front());
  }
  return pair;
}

SplitOdeProblem resolve_problem(const RunConfig& cfg) {
  const auto& p = cfg.problem_params;
  if (cfg.problem == "linear_advection_diffusion") {
    return linear_advection_diffusion(p.at("gamma").get<double>(), p.at("h").get<double>(),
                                      p.at("swap_roles").get<bool>());
  }
  if (cfg.problem == "burgers") {
    return burgers(p.at("gamma").get<double>(), p.at("h").get<double>());
  }
  if (cfg.problem == "mhd_alfven") {
    AlfvenParams prm;
    prm.B0 = p.at("B0").get<double>();
    prm.rho = p.at("rho").get<double>();
    prm.mu = p.at("mu").get<double>();
    prm.eta = p.at("eta").get<double>();
    prm.mu0 = p.at("mu0").get<double>();
    prm.U = p.at("U").get<double>();
    const auto mode = p.at("mode").get<std::string>();
    AlfvenSplit split;
    if (mode == "v_split") {
      split = AlfvenSplit::v_split;
    } else if (mode == "v_implicit") {
      split = AlfvenSplit::v_implicit;
    } else {
      throw Error("problem.mhd_alfven: mode must be v_split or v_implicit, got '" + mode + "'");
    }
    auto problem = mhd_alfven(prm, p.at("h").get<double>(), p.at("L").get<double>());
    return split == AlfvenSplit::v_split ? problem : mhd_split(problem, split);
  }
  if (cfg.problem == "scalar_linear") {
    return scalar_linear(p.at("lambda_f").get<double>(), p.at("lambda_g").get<double>(),
                         p.at("y0").get<double>());
  }
  if (cfg.problem == "logistic") return logistic(p.at("y0").get<double>());
  if (cfg.problem == "rotation_decay") {
    return rotation_decay(p.at("decay").get<double>(), p.at("frequency").get<double>(),
                          to_vector(p.at("y0").get<std::vector<double>>()));
  }
  if (cfg.problem == "zero_rhs") return zero_rhs(p.at("dim").get<std::size_t>());
  problem_defaults(cfg.problem);  // throws with the list of names
  throw Error("unreachable");
}

TimeGrid resolve_grid(const RunConfig& cfg) {
  if (cfg.N) return TimeGrid::uniform(cfg.T, *cfg.N);
  return TimeGrid::with_step(cfg.T, *cfg.k);
}

QoiSpec resolve_qoi(const RunConfig& cfg, const SplitOdeProblem& problem) {
  std::string type = get_or<std::string>(cfg.qoi, "type", "default");
  const double scale = get_or(cfg.qoi, "scale", 1.0);
  if (type == "default") {
    if (problem.alfven) {
      type = "integral_v";
    } else if (cfg.problem == "linear_advection_diffusion" || cfg.problem == "burgers") {
      type = "left_half";
    } else {
      type = "ones";
    }
  }
  if (type != "psi" && type != "integrated" && cfg.qoi.contains("psi")) {
    throw Error("qoi: 'psi' is only used with type psi or integrated");
  }
  if (type == "left_half") return qoi_mean_left_half(problem.dim, scale);
  if (type == "integral_v") {
    if (!problem.alfven) throw Error("qoi: integral_v needs the mhd_alfven problem");
    auto q = qoi_integral_v(problem.dim / 2, problem.alfven->h);
    q.psi *= scale;
    return q;
  }
  if (type == "ones") {
    return QoiSpec::final_time(Vector::Constant(static_cast<Eigen::Index>(problem.dim), scale),
                               "ones");
  }
  Vector weight = Vector::Constant(static_cast<Eigen::Index>(problem.dim), 1.0);
  if (cfg.qoi.contains("psi")) {
    weight = to_vector(cfg.qoi.at("psi").get<std::vector<double>>());
    if (static_cast<std::size_t>(weight.size()) != problem.dim) {
      throw Error("qoi: psi has length " + std::to_string(weight.size()) + ", expected " +
                  std::to_string(problem.dim));
    }
  }
  weight *= scale;
  if (type == "psi") return QoiSpec::final_time(weight, "psi");
  if (type == "integrated") {
    return QoiSpec::time_integrated(problem.dim, [weight](double) { return weight; },
                                    "integrated");
  }
  throw Error("qoi: unknown type '" + type +
              "' (expected default, left_half, integral_v, ones, psi or integrated)");
}

ReferenceConfig resolve_reference(const RunConfig& cfg, const SplitOdeProblem& problem) {
  ReferenceConfig r = cfg.reference;
  if (cfg.reference_mode == "auto") {
    const bool exact_for_ode = problem.has_analytic() && !problem.alfven;
    r.mode = exact_for_ode ? ReferenceConfig::Mode::analytic : ReferenceConfig::Mode::numeric;
  } else {
    r.mode = reference_mode_from_string(cfg.reference_mode);
  }
  return r;
}

json ReportRow::to_json() const {
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  json comps = json::object();
  for (const auto& [name, t] : components) comps[name] = {{"E1", t.e1}, {"E2", t.e2}, {"E3", t.e3}};
  json terms = json::array();
  for (const auto& t : per_interval) terms.push_back({t.e1, t.e2, t.e3});
  return {{"scheme", scheme},
          {"computed_error", computed_error},
          {"true_error", opt(true_error)},
          {"effectivity", opt(effectivity)},
          {"E1", e1},
          {"E2", e2},
          {"E3", e3},
          {"components", comps},
          {"orthogonality_residual", orthogonality_residual},
          {"adjoint_max", adjoint_max},
          {"orthogonality_ok", orthogonality_ok},
          {"nodal_equivalence", nodal_equivalence},
          {"per_interval", terms},
          {"metadata", metadata}};
}

namespace {

template <typename Fn>
auto stage(const char* label, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(label, e.what());
  }
}

std::string run_label(const RunConfig& cfg, const ImexPair& pair) {
  return cfg.problem + " / " + pair.name;
}

void write_series(const std::string& dir, const std::string& label, const TimeGrid& grid,
                  const ForwardSolution& forward, const AdjointSolution& adjoint,
                  const ErrorBreakdown& eb, const std::vector<std::size_t>& indices_in,
                  const std::string& problem_name) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const std::size_t m = static_cast<std::size_t>(forward.nodal.front().size());
  std::vector<std::size_t> indices = indices_in;
  if (indices.empty()) indices = m > 2 ? std::vector<std::size_t>{0, m / 2, m - 1} : std::vector<std::size_t>{0};
  for (auto i : indices) {
    if (i >= m) throw Error("series index " + std::to_string(i) + " out of range");
  }
  const auto ii = [](std::size_t i) { return static_cast<Eigen::Index>(i); };
  for (auto i : indices) {
    std::ostringstream sol, adj;
    sol << "# " << label << ", solution component " << i << "\nt,value\n";
    adj << "# " << label << ", adjoint component " << i << "\nt,value\n";
    for (std::size_t n = 0; n <= grid.intervals(); ++n) {
      sol << format_number(grid.node(n)) << "," << format_number(forward.nodal[n][ii(i)]) << "\n";
      const Vector phi = n < grid.intervals() ? adjoint.phi.left_value(n)
                                              : adjoint.phi.right_value(n - 1);
      adj << format_number(grid.node(n)) << "," << format_number(phi[ii(i)]) << "\n";
    }
    write_text(dir + "/solution_" + std::to_string(i) + ".csv", sol.str());
    write_text(dir + "/adjoint_" + std::to_string(i) + ".csv", adj.str());
  }
  std::ostringstream terms;
  terms << "# " << label << ", error contributions per interval\nt,E1,E2,E3\n";
  for (std::size_t n = 0; n < eb.per_interval.size(); ++n) {
    const auto& r = eb.per_interval[n];
    terms << format_number(grid.node(n)) << "," << format_number(r.e1) << ","
          << format_number(r.e2) << "," << format_number(r.e3) << "\n";
  }
  write_text(dir + "/terms.csv", terms.str());

  std::ostringstream profile;
  profile << "# " << label << ", state at the final time\nindex,value\n";
  const Vector& yT = forward.nodal.back();
  for (std::size_t i = 0; i < m; ++i) profile << i << "," << format_number(yT[ii(i)]) << "\n";
  write_text(dir + "/final_state.csv", profile.str());

  std::ostringstream fig;
  fig << "Run: " << label << "\n\n"
      << "final_state.csv: the discrete state at the final time against its index. For the "
      << "Alfven problem the first half is v on the interior grid and the second half is B; "
      << "plotting the v half against zeta = (index + 1) h and overlaying the closed-form v "
      << "shows whether the scheme stays stable.\n\n"
      << "solution_<i>.csv, adjoint_<i>.csv: one state component and the matching adjoint "
      << "component at the time nodes.\n\n"
      << "terms.csv: the per-interval contributions E1, E2, E3 against the interval start time; "
      << "their running sum is the estimate.\n";
  if (problem_name == "mhd_alfven") {
    fig << "\nFor the v-profile figure, rerun with shorter final times to get intermediate "
        << "profiles.\n";
  }
  write_text(dir + "/figures.txt", fig.str());
}

}  // namespace

ReportRow run(const RunConfig& cfg) {
  const json echo = cfg.to_json();
  try {
    const ImexPair pair = stage("config", [&] { return resolve_scheme(cfg); });
    const SplitOdeProblem problem = stage("config", [&] { return resolve_problem(cfg); });
    const TimeGrid grid = stage("config", [&] { return resolve_grid(cfg); });
    const QoiSpec qoi = stage("config", [&] { return resolve_qoi(cfg, problem); });
    const ReferenceConfig ref = stage("config", [&] { return resolve_reference(cfg, problem); });

    const ForwardSolution forward =
        stage("forward", [&] { return solve_forward(problem, pair, grid, cfg.newton); });
    const PiecewisePolynomial cg = stage("reconstruct", [&] { return build_cg(problem, pair, forward, grid); });
    const AdjointSolution adjoint = stage("adjoint", [&] { return solve_adjoint(problem, cg, qoi); });

    const EstimateInputs in{problem, pair, forward, cg, adjoint};
    const bool want_components =
        cfg.output.components.value_or(problem.fields.size() > 1);
    ReportRow row;
    row.scheme = pair.name;
    ErrorBreakdown eb = stage("estimate", [&] {
      return qoi.kind == QoiSpec::Kind::final_time ? error_breakdown(in)
                                                   : error_breakdown_timedep(in);
    });
    stage("estimate", [&] {
      if (want_components) {
        ComponentMask mask{problem.fields};
        const auto split = component_split(in, mask);
        for (const auto& b : mask.blocks) row.components.emplace_back(b.name, split.at(b.name));
      }
      const auto orth = galerkin_orthogonality_check(in);
      row.orthogonality_residual = orth.max_residual;
      row.adjoint_max = orth.max_adjoint;
      row.orthogonality_ok = orth.passes();
      row.nodal_equivalence = nodal_equivalence_error(cg, forward);
      return 0;
    });

    const ReferenceResult truth = stage("reference", [&] { return true_qoi(problem, grid, qoi, ref); });
    const double true_error = truth.value - discrete_qoi(cg, qoi);
    eb.true_error = true_error;
    eb.effectivity = effectivity(eb.estimate_total, true_error);

    row.computed_error = eb.estimate_total;
    row.true_error = eb.true_error;
    row.effectivity = eb.effectivity;
    row.e1 = eb.e1;
    row.e2 = eb.e2;
    row.e3 = eb.e3;
    row.per_interval = eb.per_interval;
    row.metadata = {{"config", echo},
                    {"problem", problem.metadata},
                    {"linearization", "discrete-solution"},
                    {"reference_mode", to_string(ref.mode)},
                    {"reference_halving_change", truth.halving_change},
                    {"reference_steps", truth.steps},
                    {"qoi", qoi.label},
                    {"intervals", grid.intervals()},
                    {"newton_iterations", [&] {
                       long total = 0;
                       for (int it : forward.newton_iterations) total += it;
                       return total;
                     }()}};

    stage("output", [&] {
      if (!cfg.output.csv.empty()) write_text(cfg.output.csv, render_csv({row}));
      if (!cfg.output.series_dir.empty()) {
        write_series(cfg.output.series_dir, run_label(cfg, pair), grid, forward, adjoint, eb,
                     cfg.output.series_indices, cfg.problem);
      }
      return 0;
    });
    return row;
  } catch (const StageError& e) {
    throw StageError(e.stage(), std::string(e.what()).substr(e.stage().size() + 3) +
                                    "\nconfig: " + echo.dump());
  }
}

std::vector<int> table_ids() { return {4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16}; }

std::vector<RunConfig> table_configs(int id) {
  RunConfig base;
  base.reference_mode = "numeric";
  switch (id) {
    case 4:
    case 5:
    case 6:
    case 7:
    case 8:
    case 9: {
      const double gamma = (id == 4 || id == 6 || id == 7) ? 0.1 : 0.01;
      base.problem = "linear_advection_diffusion";
      base.problem_params = merge_params(base.problem, {{"gamma", gamma}, {"h", 1.0 / 40.0}});
      base.k = id <= 5 ? 1.0 / 40.0 : 1.0 / 10.0;
      base.T = (id == 6 || id == 8) ? 1.0 : 2.0;
      break;
    }
    case 10:
    case 11:
      base.problem = "burgers";
      base.problem_params = merge_params(base.problem, {{"gamma", 0.05}, {"h", 1.0 / 40.0}});
      base.k = 1.0 / 20.0;
      base.T = id == 10 ? 1.0 : 2.0;
      break;
    case 12:
      base.problem = "linear_advection_diffusion";
      base.problem_params = merge_params(
          base.problem, {{"gamma", 0.075}, {"h", 1.0 / 20.0}, {"swap_roles", true}});
      base.k = 1.0 / 40.0;
      base.T = 1.0;
      break;
    case 13:
    case 14:
    case 15:
    case 16:
      base.problem = "mhd_alfven";
      base.problem_params =
          merge_params(base.problem, {{"mode", id <= 14 ? "v_split" : "v_implicit"}});
      base.k = 1e-3;
      base.T = 0.1;
      base.output.components = true;
      break;
    default:
      throw Error("unknown table id " + std::to_string(id) + " (expected 4..16)");
  }
  std::vector<RunConfig> out;
  for (const auto& name : builtin_names()) {
    RunConfig c = base;
    c.scheme = name;
    out.push_back(c);
  }
  return out;
}

int thread_count_from_env() {
  const char* env = std::getenv("IMEXEST_THREADS");
  if (env && *env) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1 || v > 1024) {
      throw Error(std::string("IMEXEST_THREADS must be a positive integer, got '") + env + "'");
    }
    return static_cast<int>(v);
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

std::vector<ReportRow> reproduce_table(int id, int threads) {
  const auto configs = table_configs(id);
  if (threads <= 0) threads = thread_count_from_env();
  const std::size_t n = configs.size();
  std::vector<std::optional<ReportRow>> rows(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        rows[i] = run(configs[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<ReportRow> out;
  for (auto& r : rows) out.push_back(std::move(*r));
  return out;
}

std::vector<ConvergenceLevel> convergence_study(const RunConfig& cfg, int levels) {
  if (levels < 3) throw Error("convergence_study: levels must be at least 3");
  const ImexPair pair = stage("config", [&] { return resolve_scheme(cfg); });
  const SplitOdeProblem problem = stage("config", [&] { return resolve_problem(cfg); });
  const ReferenceConfig ref = stage("config", [&] { return resolve_reference(cfg, problem); });
  const TimeGrid base = stage("config", [&] { return resolve_grid(cfg); });
  std::vector<ConvergenceLevel> out;
  std::size_t N = base.intervals();
  for (int level = 0; level < levels; ++level, N *= 2) {
    const TimeGrid grid = TimeGrid::uniform(cfg.T, N);
    const auto forward =
        stage("forward", [&] { return solve_forward(problem, pair, grid, cfg.newton); });
    const auto exact = stage("reference", [&] { return reference_states(problem, grid.nodes(), ref); });
    double err = 0.0;
    for (std::size_t n = 0; n <= N; ++n) {
      err = std::max(err, (exact[n] - forward.nodal[n]).lpNorm<Eigen::Infinity>());
    }
    ConvergenceLevel lv{cfg.T / static_cast<double>(N), err, std::nullopt};
    if (!out.empty() && err > 0.0 && out.back().error > 0.0) {
      lv.order = std::log2(out.back().error / err);
    }
    out.push_back(lv);
  }
  return out;
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.5e", v);
  return buf;
}

namespace {

std::vector<std::string> block_names(const std::vector<ReportRow>& rows) {
  std::vector<std::string> names;
  for (const auto& r : rows) {
    for (const auto& [name, t] : r.components) {
      if (std::find(names.begin(), names.end(), name) == names.end()) names.push_back(name);
    }
  }
  return names;
}

}  // namespace

std::string csv_header(const std::vector<ReportRow>& rows) {
  std::string h = "scheme,computed_error,true_error,effectivity,E1,E2,E3";
  for (const auto& b : block_names(rows)) h += ",E1_" + b + ",E2_" + b + ",E3_" + b;
  h += ",orthogonality_residual,nodal_equivalence";
  return h;
}

std::string csv_line(const ReportRow& row, const std::vector<std::string>& blocks) {
  auto opt = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string(); };
  std::string s = row.scheme + "," + format_number(row.computed_error) + "," +
                  opt(row.true_error) + "," + opt(row.effectivity) + "," +
                  format_number(row.e1) + "," + format_number(row.e2) + "," +
                  format_number(row.e3);
  for (const auto& b : blocks) {
    const auto it = std::find_if(row.components.begin(), row.components.end(),
                                 [&](const auto& c) { return c.first == b; });
    if (it == row.components.end()) {
      s += ",,,";
    } else {
      s += "," + format_number(it->second.e1) + "," + format_number(it->second.e2) + "," +
           format_number(it->second.e3);
    }
  }
  s += "," + format_number(row.orthogonality_residual) + "," +
       format_number(row.nodal_equivalence);
  return s;
}

std::string render_csv(const std::vector<ReportRow>& rows) {
  std::string out;
  for (const auto& r : rows) {
    json echo = r.metadata.contains("config") ? r.metadata.at("config") : json::object();
    json meta = {{"scheme", r.scheme}, {"config", echo}};
    for (const char* key : {"linearization", "reference_mode"}) {
      if (r.metadata.contains(key)) meta[key] = r.metadata.at(key);
    }
    if (r.metadata.contains("problem")) meta["problem"] = r.metadata.at("problem");
    out += "# " + meta.dump() + "\n";
  }
  const auto blocks = block_names(rows);
  out += csv_header(rows) + "\n";
  for (const auto& r : rows) out += csv_line(r, blocks) + "\n";
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << text;
  if (!out) throw Error("write failed for '" + path + "'");
}

}  // namespace imexest
