#include "imexest/tableau.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace imexest {

namespace {

constexpr double kConsistencyTol = 1e-14;

ButcherTableau make_tableau(std::vector<double> abscissae,
                            std::initializer_list<std::initializer_list<double>> rows,
                            std::vector<double> weights) {
  ButcherTableau t;
  t.abscissae = std::move(abscissae);
  t.weights = std::move(weights);
  const auto n = static_cast<Eigen::Index>(rows.size());
  t.coeffs = Matrix::Zero(n, n);
  Eigen::Index i = 0;
  for (const auto& row : rows) {
    Eigen::Index j = 0;
    for (double v : row) t.coeffs(i, j++) = v;
    ++i;
  }
  return t;
}

ImexPair midpoint_122() {
  ImexPair p;
  p.name = "Midpoint(1,2,2)";
  p.order = 2;
  p.explicit_tableau = make_tableau({0.0, 0.5}, {{0.0, 0.0}, {0.5, 0.0}}, {0.0, 1.0});
  p.implicit_tableau = make_tableau({0.0, 0.5}, {{0.0, 0.0}, {0.0, 0.5}}, {0.0, 1.0});
  return p;
}

ImexPair ssp3_332() {
  const double g = 1.0 - 1.0 / std::sqrt(2.0);
  ImexPair p;
  p.name = "SSP3(3,3,2)";
  p.order = 2;
  // The published SSP3(3,3,2) error splits use a quadratic reconstruction.
  p.reconstruction_degree = 2;
  p.explicit_tableau = make_tableau(
      {0.0, 1.0, 0.5},
      {{0.0, 0.0, 0.0}, {1.0, 0.0, 0.0}, {0.25, 0.25, 0.0}},
      {1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0});
  p.implicit_tableau = make_tableau(
      {g, 1.0 - g, 0.5},
      {{g, 0.0, 0.0}, {1.0 - 2.0 * g, g, 0.0}, {0.5 - g, 0.0, g}},
      {1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0});
  return p;
}

ImexPair ssp3_433() {
  const double alpha = 0.24169426078821;
  const double beta = 0.06042356519705;
  const double eta = 0.12915286960590;
  ImexPair p;
  p.name = "SSP3(4,3,3)";
  p.order = 3;
  p.explicit_tableau = make_tableau(
      {0.0, 0.0, 1.0, 0.5},
      {{0.0, 0.0, 0.0, 0.0},
       {0.0, 0.0, 0.0, 0.0},
       {0.0, 1.0, 0.0, 0.0},
       {0.0, 0.25, 0.25, 0.0}},
      {0.0, 1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0});
  p.implicit_tableau = make_tableau(
      {alpha, 0.0, 1.0, 0.5},
      {{alpha, 0.0, 0.0, 0.0},
       {-alpha, alpha, 0.0, 0.0},
       {0.0, 1.0 - alpha, alpha, 0.0},
       {beta, eta, 0.5 - beta - eta - alpha, alpha}},
      {0.0, 1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0});
  return p;
}

void check_shape(const ButcherTableau& t, const std::string& label,
                 std::vector<std::string>& out) {
  const auto n = t.weights.size();
  if (t.abscissae.size() != n) {
    out.push_back(label + ": abscissae length " + std::to_string(t.abscissae.size()) +
                  " != weight length " + std::to_string(n));
  }
  if (static_cast<std::size_t>(t.coeffs.rows()) != n ||
      static_cast<std::size_t>(t.coeffs.cols()) != n) {
    out.push_back(label + ": coefficient matrix is not " + std::to_string(n) + "x" +
                  std::to_string(n));
  }
}

bool well_shaped(const ButcherTableau& t) {
  const auto n = t.weights.size();
  return t.abscissae.size() == n && static_cast<std::size_t>(t.coeffs.rows()) == n &&
         static_cast<std::size_t>(t.coeffs.cols()) == n;
}

void check_consistency(const ButcherTableau& t, const std::string& label,
                       const std::string& abscissa_name,
                       std::vector<std::string>& out) {
  double wsum = 0.0;
  for (double w : t.weights) wsum += w;
  if (std::abs(wsum - 1.0) > kConsistencyTol) {
    std::ostringstream os;
    os << label << ": weights sum to " << wsum << ", not 1";
    out.push_back(os.str());
  }
  for (Eigen::Index i = 0; i < t.coeffs.rows(); ++i) {
    const double row = t.coeffs.row(i).sum();
    if (std::abs(row - t.abscissae[i]) > kConsistencyTol) {
      std::ostringstream os;
      os << label << ": " << abscissa_name << "[" << i << "] = " << t.abscissae[i]
         << " differs from row sum " << row;
      out.push_back(os.str());
    }
  }
}

std::vector<double> read_vector(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) throw Error(std::string("tableau: missing key '") + key + "'");
  return j.at(key).get<std::vector<double>>();
}

Matrix read_matrix(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) throw Error(std::string("tableau: missing key '") + key + "'");
  const auto rows = j.at(key).get<std::vector<std::vector<double>>>();
  const auto n = static_cast<Eigen::Index>(rows.size());
  Matrix m = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (static_cast<Eigen::Index>(rows[i].size()) != n) {
      throw Error(std::string("tableau: matrix '") + key + "' is not square");
    }
    for (Eigen::Index c = 0; c < n; ++c) m(i, c) = rows[i][c];
  }
  return m;
}

nlohmann::json matrix_json(const Matrix& m) {
  auto rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    auto row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

ValidationReport validate(const ImexPair& pair) {
  ValidationReport report;
  auto& out = report.violations;
  const auto& ex = pair.explicit_tableau;
  const auto& im = pair.implicit_tableau;

  check_shape(ex, "explicit", out);
  check_shape(im, "implicit", out);
  if (ex.stages() != im.stages()) {
    out.push_back("explicit and implicit tableaus have different stage counts (" +
                  std::to_string(ex.stages()) + " vs " + std::to_string(im.stages()) + ")");
  }
  if (pair.order < 1) out.push_back("order must be a positive integer");
  if (pair.reconstruction_degree < 0 || pair.cg_degree() > 3 || pair.cg_degree() < 1) {
    out.push_back("reconstruction degree must be 1, 2 or 3 (got " +
                  std::to_string(pair.cg_degree()) + ")");
  }
  if (im.stages() == 0) out.push_back("tableau has no stages");
  if (!out.empty()) return report;
  if (!well_shaped(ex) || !well_shaped(im)) return report;

  check_consistency(ex, "explicit", "c", out);
  check_consistency(im, "implicit", "d", out);

  for (Eigen::Index i = 0; i < ex.coeffs.rows(); ++i) {
    for (Eigen::Index j = i; j < ex.coeffs.cols(); ++j) {
      if (ex.coeffs(i, j) != 0.0) {
        out.push_back("A not strictly lower triangular: a(" + std::to_string(i) + "," +
                      std::to_string(j) + ") != 0");
      }
    }
  }
  for (Eigen::Index i = 0; i < im.coeffs.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < im.coeffs.cols(); ++j) {
      if (im.coeffs(i, j) != 0.0) {
        out.push_back("B not lower triangular: b(" + std::to_string(i) + "," +
                      std::to_string(j) + ") != 0");
      }
    }
  }
  for (std::size_t i = 0; i < im.abscissae.size(); ++i) {
    for (std::size_t j = i + 1; j < im.abscissae.size(); ++j) {
      if (im.abscissae[i] == im.abscissae[j]) {
        out.push_back("duplicate implicit abscissae: d[" + std::to_string(i) + "] == d[" +
                      std::to_string(j) + "]");
      }
    }
  }
  for (std::size_t i = 0; i < im.abscissae.size(); ++i) {
    if (im.abscissae[i] < 0.0 || im.abscissae[i] > 1.0) {
      report.warnings.push_back("implicit abscissa d[" + std::to_string(i) +
                                "] lies outside [0,1]; the stage interpolant extrapolates");
    }
  }
  return report;
}

ImexPair builtin(std::string_view name) {
  if (name == "Midpoint(1,2,2)") return midpoint_122();
  if (name == "SSP3(3,3,2)") return ssp3_332();
  if (name == "SSP3(4,3,3)") return ssp3_433();
  std::string msg = "unknown scheme '" + std::string(name) + "'; available:";
  for (const auto& n : builtin_names()) msg += " " + n;
  throw Error(msg);
}

std::vector<std::string> builtin_names() {
  return {"Midpoint(1,2,2)", "SSP3(3,3,2)", "SSP3(4,3,3)"};
}

double weight_moment(std::span<const double> weights, std::span<const double> abscissae,
                     int k) {
  if (k < 0) throw Error("weight_moment: k must be nonnegative");
  if (weights.size() != abscissae.size()) {
    throw Error("weight_moment: weights and abscissae differ in length");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    sum += weights[i] * std::pow(abscissae[i], k);
  }
  return sum;
}

double weight_moment(const ButcherTableau& t, int k) {
  return weight_moment(t.weights, t.abscissae, k);
}

bool approx_equal(const ButcherTableau& a, const ButcherTableau& b, double tol) {
  if (a.stages() != b.stages() || a.abscissae.size() != b.abscissae.size() ||
      a.coeffs.rows() != b.coeffs.rows() || a.coeffs.cols() != b.coeffs.cols()) {
    return false;
  }
  for (std::size_t i = 0; i < a.weights.size(); ++i) {
    if (std::abs(a.weights[i] - b.weights[i]) > tol) return false;
  }
  for (std::size_t i = 0; i < a.abscissae.size(); ++i) {
    if (std::abs(a.abscissae[i] - b.abscissae[i]) > tol) return false;
  }
  return ((a.coeffs - b.coeffs).cwiseAbs().maxCoeff() <= tol);
}

bool approx_equal(const ImexPair& a, const ImexPair& b, double tol) {
  return a.order == b.order && a.cg_degree() == b.cg_degree() &&
         approx_equal(a.explicit_tableau, b.explicit_tableau, tol) &&
         approx_equal(a.implicit_tableau, b.implicit_tableau, tol);
}

ImexPair pair_from_json(const nlohmann::json& j) {
  for (const auto& [key, _] : j.items()) {
    if (key != "name" && key != "order" && key != "reconstruction_degree" && key != "explicit" &&
        key != "implicit") {
      throw Error("tableau: unknown key '" + key + "'");
    }
  }
  if (!j.contains("explicit") || !j.contains("implicit")) {
    throw Error("tableau: both 'explicit' and 'implicit' sections are required");
  }
  ImexPair p;
  p.name = j.value("name", std::string("custom"));
  if (!j.contains("order")) throw Error("tableau: missing key 'order'");
  p.order = j.at("order").get<int>();
  p.reconstruction_degree = j.value("reconstruction_degree", 0);
  const auto& ex = j.at("explicit");
  const auto& im = j.at("implicit");
  p.explicit_tableau.abscissae = read_vector(ex, "c");
  p.explicit_tableau.coeffs = read_matrix(ex, "A");
  p.explicit_tableau.weights = read_vector(ex, "w");
  p.implicit_tableau.abscissae = read_vector(im, "d");
  p.implicit_tableau.coeffs = read_matrix(im, "B");
  p.implicit_tableau.weights = read_vector(im, "w");
  return p;
}

nlohmann::json pair_to_json(const ImexPair& pair) {
  nlohmann::json j;
  j["name"] = pair.name;
  j["order"] = pair.order;
  if (pair.reconstruction_degree > 0) j["reconstruction_degree"] = pair.reconstruction_degree;
  j["explicit"] = {{"c", pair.explicit_tableau.abscissae},
                   {"A", matrix_json(pair.explicit_tableau.coeffs)},
                   {"w", pair.explicit_tableau.weights}};
  j["implicit"] = {{"d", pair.implicit_tableau.abscissae},
                   {"B", matrix_json(pair.implicit_tableau.coeffs)},
                   {"w", pair.implicit_tableau.weights}};
  return j;
}

ImexPair load_pair_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open tableau file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error("tableau file '" + path + "': " + e.what());
  }
  ImexPair pair = pair_from_json(j);
  const auto report = validate(pair);
  if (!report.ok()) {
    std::string msg = "tableau file '" + path + "' is invalid:";
    for (const auto& v : report.violations) msg += "\n  " + v;
    throw Error(msg);
  }
  return pair;
}

}  // namespace imexest
