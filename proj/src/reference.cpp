#include "imexest/reference.hpp"

#include "imexest/numerics.hpp"

#include <boost/numeric/odeint.hpp>

#include <cmath>
#include <sstream>

namespace imexest {

namespace odeint = boost::numeric::odeint;

void ReferenceConfig::validate() const {
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw Error("reference: tolerances must be positive");
  if (max_step < 0.0) throw Error("reference: max_step must be non-negative");
  if (max_steps == 0) throw Error("reference: max_steps must be positive");
}

std::string to_string(ReferenceConfig::Mode mode) {
  return mode == ReferenceConfig::Mode::analytic ? "analytic" : "numeric";
}

ReferenceConfig::Mode reference_mode_from_string(const std::string& name) {
  if (name == "analytic") return ReferenceConfig::Mode::analytic;
  if (name == "numeric") return ReferenceConfig::Mode::numeric;
  throw Error("reference: unknown mode '" + name + "' (expected analytic or numeric)");
}

namespace {

using State = std::vector<double>;

/// y' = f + g, plus an optional accumulator z' = (y, psi_tilde(t)).
struct System {
  const SplitOdeProblem& problem;
  const TrajectoryFn* weight;

  void operator()(const State& x, State& dxdt, double t) const {
    const auto m = static_cast<Eigen::Index>(problem.dim);
    const Eigen::Map<const Vector> y(x.data(), m);
    const Vector yv = y;
    Eigen::Map<Vector> dy(dxdt.data(), m);
    // Forcing may jump at t = 0 (data switched on at the start); a single point
    // carries no weight in the exact solution, so sample its right limit.
    const double te = (!problem.autonomous && t <= 0.0) ? std::nextafter(0.0, 1.0) : t;
    dy = problem.eval_f(te, yv) + problem.eval_g(te, yv);
    if (weight) dxdt[static_cast<std::size_t>(m)] = yv.dot((*weight)(t));
  }
};

struct Integrator {
  const SplitOdeProblem& problem;
  const ReferenceConfig& cfg;
  const TrajectoryFn* weight = nullptr;
  std::size_t steps = 0;

  /// Advances x from t0 to t1.
  void advance(State& x, double t0, double t1, double& dt) {
    if (t1 <= t0) return;
    auto stepper = odeint::make_controlled(cfg.abs_tol, cfg.rel_tol,
                                           odeint::runge_kutta_fehlberg78<State>());
    const System sys{problem, weight};
    double t = t0;
    const double eps = 1e-14 * std::max(1.0, std::abs(t1));
    while (t1 - t > eps) {
      double h = std::min(dt, t1 - t);
      if (cfg.max_step > 0.0) h = std::min(h, cfg.max_step);
      const bool last = h >= t1 - t;
      const double before = h;
      const auto res = stepper.try_step(sys, x, t, h);
      if (res == odeint::success) {
        ++steps;
        // Do not let the clipped final step shrink the carried step size.
        dt = last ? std::max(dt, h) : h;
        if (last) t = t1;
      } else {
        dt = h;
        if (!(h > 0.0) || h >= before) throw Error("reference: step size underflow");
      }
      if (steps > cfg.max_steps) {
        std::ostringstream os;
        os << "reference: exceeded step cap " << cfg.max_steps << " at t = " << t;
        throw Error(os.str());
      }
      for (double v : x) {
        if (!std::isfinite(v)) throw Error("reference: solution became non-finite");
      }
    }
  }
};

State initial_state(const SplitOdeProblem& problem, bool augmented) {
  State x(problem.y0.data(), problem.y0.data() + problem.y0.size());
  if (augmented) x.push_back(0.0);
  return x;
}

struct Sample {
  double value = 0.0;
  double scale = 0.0;  // sum |psi_i y_i|
  std::size_t steps = 0;
};

Sample numeric_qoi(const SplitOdeProblem& problem, double T, const QoiSpec& qoi,
                            const ReferenceConfig& cfg) {
  const bool integrated = qoi.kind == QoiSpec::Kind::time_integrated;
  Integrator integ{problem, cfg, integrated ? &qoi.psi_tilde : nullptr};
  State x = initial_state(problem, integrated);
  double dt = std::min(1e-4, T);
  integ.advance(x, 0.0, T, dt);
  Sample r;
  r.steps = integ.steps;
  if (integrated) {
    r.value = x.back();
    r.scale = std::abs(r.value);
  } else {
    const Eigen::Map<const Vector> y(x.data(), static_cast<Eigen::Index>(problem.dim));
    r.value = y.dot(qoi.psi);
    r.scale = y.cwiseProduct(qoi.psi).lpNorm<1>();
  }
  return r;
}

double analytic_qoi(const SplitOdeProblem& problem, const TimeGrid& grid, const QoiSpec& qoi) {
  if (qoi.kind == QoiSpec::Kind::final_time) return qoi.apply(problem.analytic(grid.final_time()));
  static const GaussRule rule = gauss_rule(10);
  double total = 0.0;
  for (std::size_t n = 0; n < grid.intervals(); ++n) {
    const double k = grid.step(n);
    double acc = 0.0;
    for (std::size_t g = 0; g < rule.size(); ++g) {
      const double t = grid.node(n) + 0.5 * (rule.points[g] + 1.0) * k;
      acc += 0.5 * rule.weights[g] * problem.analytic(t).dot(qoi.psi_tilde(t));
    }
    total += k * acc;
  }
  return total;
}

}  // namespace

ReferenceResult true_qoi(const SplitOdeProblem& problem, const TimeGrid& grid,
                         const QoiSpec& qoi, const ReferenceConfig& cfg) {
  cfg.validate();
  if (cfg.mode == ReferenceConfig::Mode::analytic) {
    if (!problem.has_analytic()) {
      throw Error("reference: problem '" + problem.name + "' has no analytic solution");
    }
    return {analytic_qoi(problem, grid, qoi), 0.0, 0};
  }
  const double T = grid.final_time();
  const Sample coarse = numeric_qoi(problem, T, qoi, cfg);
  ReferenceConfig half = cfg;
  half.rel_tol *= 0.5;
  half.abs_tol *= 0.5;
  const Sample fine = numeric_qoi(problem, T, qoi, half);

  const double weight_norm = qoi.kind == QoiSpec::Kind::final_time
                                 ? qoi.psi.lpNorm<1>()
                                 : T * qoi.psi_tilde(T).lpNorm<1>();
  const double allowed = 10.0 * (cfg.abs_tol * weight_norm + cfg.rel_tol * fine.scale);
  const double change = std::abs(fine.value - coarse.value);
  if (!(change <= allowed)) {
    std::ostringstream os;
    os << "reference not converged: halving the tolerance changed the QoI by " << change
       << " (allowed " << allowed << ")";
    throw Error(os.str());
  }
  return {fine.value, change, fine.steps};
}

std::vector<Vector> reference_states(const SplitOdeProblem& problem,
                                     const std::vector<double>& times,
                                     const ReferenceConfig& cfg) {
  cfg.validate();
  std::vector<Vector> out;
  out.reserve(times.size());
  if (cfg.mode == ReferenceConfig::Mode::analytic) {
    if (!problem.has_analytic()) {
      throw Error("reference: problem '" + problem.name + "' has no analytic solution");
    }
    for (double t : times) out.push_back(problem.analytic(t));
    return out;
  }
  Integrator integ{problem, cfg};
  State x = initial_state(problem, false);
  double t = 0.0;
  double dt = 1e-4;
  for (double target : times) {
    if (target < t) throw Error("reference: times must be nondecreasing and non-negative");
    integ.advance(x, t, target, dt);
    t = target;
    out.push_back(Eigen::Map<const Vector>(x.data(), static_cast<Eigen::Index>(problem.dim)));
  }
  return out;
}

}  // namespace imexest
