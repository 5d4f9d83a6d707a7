#pragma once

#include "imexest/types.hpp"

#include <json.hpp>

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace imexest {

/// One Butcher tableau: abscissae, coefficient matrix and weights.
struct ButcherTableau {
  std::vector<double> abscissae;
  Matrix coeffs;
  std::vector<double> weights;

  std::size_t stages() const { return weights.size(); }
};

/// A paired explicit/implicit tableau defining an additive IMEX Runge-Kutta
/// scheme. The explicit tableau drives f, the (DIRK) implicit tableau drives g.
struct ImexPair {
  std::string name;
  int order = 0;
  /// Degree q of the nodally equivalent continuous Galerkin reconstruction;
  /// 0 means order - 1.
  int reconstruction_degree = 0;
  ButcherTableau explicit_tableau;
  ButcherTableau implicit_tableau;

  std::size_t stages() const { return implicit_tableau.stages(); }
  int cg_degree() const { return reconstruction_degree > 0 ? reconstruction_degree : order - 1; }
};

struct ValidationReport {
  std::vector<std::string> violations;
  std::vector<std::string> warnings;

  bool ok() const { return violations.empty(); }
};

ValidationReport validate(const ImexPair& pair);

/// Builtin schemes: "Midpoint(1,2,2)", "SSP3(3,3,2)", "SSP3(4,3,3)".
ImexPair builtin(std::string_view name);
std::vector<std::string> builtin_names();

/// Sum_i weights_i * abscissae_i^k.
double weight_moment(std::span<const double> weights,
                     std::span<const double> abscissae, int k);
double weight_moment(const ButcherTableau& t, int k);

bool approx_equal(const ButcherTableau& a, const ButcherTableau& b,
                  double tol = 1e-15);
bool approx_equal(const ImexPair& a, const ImexPair& b, double tol = 1e-15);

/// JSON form: {name, order, [reconstruction_degree], explicit:{c,A,w}, implicit:{d,B,w}}.
ImexPair pair_from_json(const nlohmann::json& j);
nlohmann::json pair_to_json(const ImexPair& pair);

/// Reads and validates a tableau file. Throws Error listing the violations.
ImexPair load_pair_file(const std::string& path);

}  // namespace imexest
