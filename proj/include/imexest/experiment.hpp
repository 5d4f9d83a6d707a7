#pragma once

#include "imexest/estimate.hpp"
#include "imexest/imex_solver.hpp"
#include "imexest/reference.hpp"
#include "imexest/tableau.hpp"

#include <json.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace imexest {

/// An error raised while executing one stage of a run. what() starts with the
/// stage label in brackets.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& message)
      : Error("[" + stage + "] " + message), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

struct OutputConfig {
  std::string csv;
  std::string series_dir;
  std::optional<bool> components;  // default: on when the problem has several fields
  std::vector<std::size_t> series_indices;
};

/// One experiment. Parsed from JSON; unknown keys are rejected.
struct RunConfig {
  std::string scheme = "Midpoint(1,2,2)";
  std::string tableau_file;  // overrides scheme when set
  std::optional<int> reconstruction_degree;  // overrides the scheme's default
  std::string problem = "linear_advection_diffusion";
  nlohmann::json problem_params = nlohmann::json::object();
  double T = 1.0;
  std::optional<double> k;
  std::optional<std::size_t> N;
  nlohmann::json qoi = nlohmann::json::object();
  NewtonConfig newton;
  std::string reference_mode = "auto";  // auto | analytic | numeric
  ReferenceConfig reference;
  OutputConfig output;

  static RunConfig from_json(const nlohmann::json& j);
  static RunConfig from_file(const std::string& path);
  /// Fully resolved config, including every defaulted value.
  nlohmann::json to_json() const;
};

ImexPair resolve_scheme(const RunConfig& cfg);
SplitOdeProblem resolve_problem(const RunConfig& cfg);
TimeGrid resolve_grid(const RunConfig& cfg);
QoiSpec resolve_qoi(const RunConfig& cfg, const SplitOdeProblem& problem);
/// auto picks the analytic solution unless the problem is a spatial
/// discretization whose closed form solves the PDE rather than the ODE system.
ReferenceConfig resolve_reference(const RunConfig& cfg, const SplitOdeProblem& problem);

struct ReportRow {
  std::string scheme;
  double computed_error = 0.0;  // e1 + e2 + e3
  std::optional<double> true_error;
  std::optional<double> effectivity;
  double e1 = 0.0;
  double e2 = 0.0;
  double e3 = 0.0;
  std::vector<std::pair<std::string, IntervalTerms>> components;
  double orthogonality_residual = 0.0;
  double adjoint_max = 0.0;
  bool orthogonality_ok = false;
  double nodal_equivalence = 0.0;
  std::vector<IntervalTerms> per_interval;
  nlohmann::json metadata = nlohmann::json::object();

  nlohmann::json to_json() const;
};

/// forward -> reconstruct -> adjoint -> estimate -> reference -> effectivity,
/// then the optional CSV row and series files.
ReportRow run(const RunConfig& cfg);

/// Table ids with published settings.
std::vector<int> table_ids();
/// The three runs of a table, in scheme order.
std::vector<RunConfig> table_configs(int id);
/// Runs the rows concurrently; output order follows the scheme order.
std::vector<ReportRow> reproduce_table(int id, int threads = 0);

struct ConvergenceLevel {
  double k = 0.0;
  double error = 0.0;              // max_n |y(t_n) - Y_n|_inf
  std::optional<double> order;     // log2 of the ratio to the previous level
};

/// Halves the configured step `levels` times (levels >= 3).
std::vector<ConvergenceLevel> convergence_study(const RunConfig& cfg, int levels);

/// Thread count from IMEXEST_THREADS, else the hardware concurrency.
int thread_count_from_env();

std::string format_number(double v);
std::string csv_header(const std::vector<ReportRow>& rows);
std::string csv_line(const ReportRow& row, const std::vector<std::string>& blocks);
/// Comment lines with the resolved configs, a header and one line per row.
std::string render_csv(const std::vector<ReportRow>& rows);
void write_text(const std::string& path, const std::string& text);

}  // namespace imexest
