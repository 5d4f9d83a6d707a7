#include "imexest/experiment.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

using namespace imexest;

void print_rows(const std::vector<ReportRow>& rows) {
  std::cout << render_csv(rows);
}

int cmd_run(const std::string& config_path) {
  const RunConfig cfg = [&] {
    try {
      return RunConfig::from_file(config_path);
    } catch (const std::exception& e) {
      throw StageError("config", e.what());
    }
  }();
  print_rows({run(cfg)});
  return 0;
}

int cmd_table(int id, const std::string& out) {
  const auto rows = reproduce_table(id);
  const std::string text = render_csv(rows);
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    try {
      write_text(out, text);
    } catch (const std::exception& e) {
      throw StageError("output", e.what());
    }
    std::cout << "wrote " << rows.size() << " rows to " << out << "\n";
  }
  return 0;
}

int cmd_converge(const std::string& config_path, int levels) {
  RunConfig cfg;
  try {
    cfg = RunConfig::from_file(config_path);
  } catch (const std::exception& e) {
    throw StageError("config", e.what());
  }
  const auto table = convergence_study(cfg, levels);
  std::cout << "# " << cfg.to_json().dump() << "\n";
  std::cout << "k,max_nodal_error,observed_order\n";
  for (const auto& lv : table) {
    std::cout << format_number(lv.k) << "," << format_number(lv.error) << ","
              << (lv.order ? format_number(*lv.order) : std::string()) << "\n";
  }
  return 0;
}

int cmd_dump(const std::string& scheme) {
  ImexPair pair;
  try {
    pair = scheme.find(".json") != std::string::npos ? load_pair_file(scheme) : builtin(scheme);
  } catch (const std::exception& e) {
    throw StageError("tableau", e.what());
  }
  std::cout << pair_to_json(pair).dump(2) << "\n";
  const auto report = validate(pair);
  for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"IMEX Runge-Kutta integration with adjoint-based error estimates"};
  app.require_subcommand(1);

  std::string config;
  auto* run_cmd = app.add_subcommand("run", "Run one experiment from a JSON config");
  run_cmd->add_option("--config", config, "JSON config file")->required();

  int table_id = 0;
  std::string out;
  auto* table_cmd = app.add_subcommand("table", "Reproduce one results table");
  table_cmd->add_option("--id", table_id, "Table id")->required()->check(CLI::Range(4, 16));
  table_cmd->add_option("--out", out, "Output CSV path (stdout when omitted)");

  int levels = 4;
  auto* conv_cmd = app.add_subcommand("converge", "Step-halving convergence study");
  conv_cmd->add_option("--config", config, "JSON config file")->required();
  conv_cmd->add_option("--levels", levels, "Number of levels (>= 3)")->required();

  std::string scheme;
  auto* dump_cmd = app.add_subcommand("dump-tableau", "Print a tableau pair as JSON");
  dump_cmd->add_option("--scheme", scheme, "Builtin scheme name or tableau JSON file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) return cmd_run(config);
    if (table_cmd->parsed()) return cmd_table(table_id, out);
    if (conv_cmd->parsed()) return cmd_converge(config, levels);
    if (dump_cmd->parsed()) return cmd_dump(scheme);
  } catch (const StageError& e) {
    std::cerr << "error " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error [internal] " << e.what() << "\n";
    return 3;
  }
  return 1;
}
