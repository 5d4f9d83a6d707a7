#pragma once

#include "imexest/types.hpp"

#include <json.hpp>

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace imexest {

using RhsFn = std::function<Vector(double t, const Vector& y)>;
using JacobianFn = std::function<SparseMatrix(double t, const Vector& y)>;
using TrajectoryFn = std::function<Vector(double t)>;

/// A named set of state indices, used to split error contributions by field.
struct IndexBlock {
  std::string name;
  std::vector<std::size_t> indices;
};

/// Parameters of the 1D viscous-resistive Alfven wave problem.
struct AlfvenParams {
  double B0 = 10.0;
  double rho = 1.0;
  double mu = 1.0;
  double eta = 1.0;
  double mu0 = 1.0;
  double U = 1.0;

  double diffusivity() const { return eta / mu0; }
  /// Alfven speed B0 / sqrt(mu0 rho).
  double alfven_speed() const;
};

enum class AlfvenSplit { v_split, v_implicit };

struct AlfvenSetup {
  AlfvenParams params;
  double h = 5e-3;
  double L = 1.0;
  AlfvenSplit split = AlfvenSplit::v_split;
};

/// The split system y' = f(t, y) + g(t, y). f is treated explicitly and g
/// implicitly. For autonomous problems the time argument is ignored; otherwise
/// it carries boundary forcing.
struct SplitOdeProblem {
  std::string name;
  std::size_t dim = 0;
  RhsFn eval_f;
  RhsFn eval_g;
  JacobianFn jac_f;
  JacobianFn jac_g;
  Vector y0;
  bool autonomous = true;
  TrajectoryFn analytic;             // empty when no closed form exists
  std::vector<IndexBlock> fields;    // natural field partition (one block if scalar)
  std::optional<AlfvenSetup> alfven; // set for the Alfven problem only
  nlohmann::json metadata = nlohmann::json::object();

  bool has_analytic() const { return static_cast<bool>(analytic); }
};

/// Final-time QoI (y(T), psi) or time-integrated QoI int_0^T (y, psi_tilde(t)) dt.
struct QoiSpec {
  enum class Kind { final_time, time_integrated };

  Kind kind = Kind::final_time;
  Vector psi;
  TrajectoryFn psi_tilde;
  std::string label;

  static QoiSpec final_time(Vector psi, std::string label = "final_time");
  static QoiSpec time_integrated(std::size_t dim, TrajectoryFn psi_tilde,
                                 std::string label = "time_integrated");

  /// Only meaningful for the final-time kind.
  double apply(const Vector& y) const { return y.dot(psi); }
};

// -- benchmarks -------------------------------------------------------------

/// u_t + sin(2 pi x) u_x = gamma u_xx on the periodic unit interval.
/// Default split: f = advection, g = diffusion; swap_roles exchanges them.
SplitOdeProblem linear_advection_diffusion(double gamma, double h, bool swap_roles = false);

/// u_t + u u_x = gamma u_xx on periodic [-1, 1], advective central differences.
SplitOdeProblem burgers(double gamma, double h);

/// 1D Alfven wave on the interior grid of [0, L], Dirichlet data from the
/// closed-form solution. State is [v_1..v_M, B_1..B_M]. Starts in v-split mode.
SplitOdeProblem mhd_alfven(const AlfvenParams& params, double h, double L = 1.0);

/// Re-splits an Alfven problem: v-split puts the Lorentz term in f_v, v-implicit
/// moves every v term into g_v. f_B and g_B are unchanged.
SplitOdeProblem mhd_split(const SplitOdeProblem& problem, AlfvenSplit mode);

/// Closed-form (v, B) at (zeta, t). Returns (0, 0) for t <= 0.
std::pair<double, double> alfven_analytic(const AlfvenParams& params, double zeta, double t);

/// Dirichlet data at (zeta, t): the closed form, so (0, 0) at t = 0 where the
/// initial state is at rest.
std::pair<double, double> alfven_boundary(const AlfvenParams& params, double zeta, double t);

// -- small systems used for verification ------------------------------------

/// y' = lambda_f y + lambda_g y.
SplitOdeProblem scalar_linear(double lambda_f, double lambda_g, double y0 = 1.0);

/// Logistic growth y' = y - y^2 split as f = y, g = -y^2.
SplitOdeProblem logistic(double y0 = 0.5);

/// 2x2 rotation-decay system: f = [[0, w], [-w, 0]] y, g = -a y.
SplitOdeProblem rotation_decay(double decay, double frequency, Vector y0);

/// General linear split system y' = Af y + Ag y (no closed form attached).
SplitOdeProblem linear_system(const Matrix& Af, const Matrix& Ag, Vector y0);

/// f = g = 0.
SplitOdeProblem zero_rhs(std::size_t dim);

// -- quantities of interest -------------------------------------------------

/// psi = scale on the first m/2+1 entries, 0 on the remaining m/2-1.
QoiSpec qoi_mean_left_half(std::size_t m, double scale = 1.0);

/// Rectangle-rule integral of v over [0, L]: psi = h on the v-block, 0 on the
/// B-block (total length 2 m_v).
QoiSpec qoi_integral_v(std::size_t m_v, double h);

// -- helpers ----------------------------------------------------------------

/// Central-difference Jacobian of an evaluator, used to check jac_f / jac_g.
Matrix finite_difference_jacobian(const RhsFn& fn, double t, const Vector& y,
                                  double rel_step = 1e-6);

/// Validates that 1/h (or span/h) is a positive integer and returns it.
std::size_t grid_count(double span, double h, const char* what);

}  // namespace imexest
