#include "imexest/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace imexest {

void ComponentMask::validate(std::size_t m) const {
  if (blocks.empty()) throw Error("component mask: no blocks");
  std::vector<int> seen(m, 0);
  std::set<std::string> names;
  for (const auto& b : blocks) {
    if (!names.insert(b.name).second) throw Error("component mask: duplicate block name " + b.name);
    for (auto i : b.indices) {
      if (i >= m) throw Error("component mask: index out of range in block " + b.name);
      if (seen[i]++) throw Error("component mask: blocks overlap at index " + std::to_string(i));
    }
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (!seen[i]) throw Error("component mask: index " + std::to_string(i) + " not covered");
  }
}

ComponentMask ComponentMask::whole(std::size_t m) {
  IndexBlock b{"all", {}};
  b.indices.resize(m);
  for (std::size_t i = 0; i < m; ++i) b.indices[i] = i;
  return ComponentMask{{b}};
}

namespace {

struct UnitPoint {
  double s;
  double w;
};

std::vector<UnitPoint> unit_rule() {
  const auto& rule = interval_rule();
  std::vector<UnitPoint> pts;
  for (std::size_t g = 0; g < rule.size(); ++g) {
    pts.push_back({0.5 * (rule.points[g] + 1.0), 0.5 * rule.weights[g]});
  }
  return pts;
}

/// L2 projection of the adjoint onto P^{q-1} on interval n, as shifted-Legendre
/// coefficients.
std::vector<Vector> projection_coeffs(const PiecewisePolynomial& phi, std::size_t n, int degree,
                                      const std::vector<UnitPoint>& pts) {
  std::vector<Vector> c;
  for (int l = 0; l <= degree; ++l) {
    Vector acc = Vector::Zero(static_cast<Eigen::Index>(phi.dim()));
    for (const auto& p : pts) acc += p.w * shifted_legendre(l, p.s) * phi.eval_local(n, p.s);
    c.push_back((2.0 * l + 1.0) * acc);
  }
  return c;
}

Vector eval_projection(const std::vector<Vector>& c, double s) {
  Vector out = Vector::Zero(c.front().size());
  for (std::size_t l = 0; l < c.size(); ++l) out += shifted_legendre(static_cast<int>(l), s) * c[l];
  return out;
}

/// Componentwise (unsummed) contributions on one interval.
struct IntervalVectors {
  Vector e1, e2, e3;
  Vector orth;      // Galerkin orthogonality residual
  Vector residual;  // <f + g - Y', Phi>
};

IntervalVectors interval_vectors(const EstimateInputs& in, std::size_t n,
                                 const std::vector<UnitPoint>& pts) {
  const auto& grid = in.reconstruction.grid();
  const auto& Y = in.reconstruction;
  const auto& phi = in.adjoint.phi;
  const double k = grid.step(n);
  const double tn = grid.node(n);
  const int q = Y.degree();
  const auto m = static_cast<Eigen::Index>(in.problem.dim);
  const auto proj = projection_coeffs(phi, n, q - 1, pts);

  IntervalVectors out{Vector::Zero(m), Vector::Zero(m), Vector::Zero(m), Vector::Zero(m),
                      Vector::Zero(m)};
  for (const auto& p : pts) {
    const double t = tn + p.s * k;
    const Vector y = Y.eval_local(n, p.s);
    const Vector dy = Y.derivative_local(n, p.s);
    const Vector ph = phi.eval_local(n, p.s);
    const Vector pph = eval_projection(proj, p.s);
    const Vector fy = in.problem.eval_f(t, y);
    const Vector gy = in.problem.eval_g(t, y);
    const double kw = k * p.w;
    out.e1 -= kw * dy.cwiseProduct(ph - pph);
    out.e2 += kw * fy.cwiseProduct(ph);
    out.e3 += kw * gy.cwiseProduct(ph);
    out.orth += kw * dy.cwiseProduct(pph);
    out.residual += kw * (fy + gy - dy).cwiseProduct(ph);
  }

  const auto& rec = in.forward.stages.at(n);
  const auto& d = in.pair.implicit_tableau.abscissae;
  const auto& w = in.pair.explicit_tableau.weights;
  const auto& wt = in.pair.implicit_tableau.weights;
  for (std::size_t i = 0; i < rec.values.size(); ++i) {
    const Vector ph = phi.eval_local(n, d[i]);
    const Vector pph = eval_projection(proj, d[i]);
    const Vector qf = (k * w[i]) * rec.f_values[i];
    const Vector qg = (k * wt[i]) * rec.g_values[i];
    out.e1 += qf.cwiseProduct(ph - pph) + qg.cwiseProduct(ph - pph);
    out.e2 -= qf.cwiseProduct(ph);
    out.e3 -= qg.cwiseProduct(ph);
    out.orth -= qf.cwiseProduct(pph) + qg.cwiseProduct(pph);
  }
  return out;
}

void check_inputs(const EstimateInputs& in) {
  const auto& grid = in.reconstruction.grid();
  if (in.adjoint.phi.degree() != in.reconstruction.degree() + 1) {
    throw Error("estimate: adjoint degree " + std::to_string(in.adjoint.phi.degree()) +
                " does not match reconstruction degree " +
                std::to_string(in.reconstruction.degree()) + " + 1");
  }
  if (in.reconstruction.degree() != in.pair.cg_degree()) {
    throw Error("estimate: reconstruction degree does not match the scheme");
  }
  if (in.forward.stages.size() != grid.intervals() ||
      in.adjoint.phi.grid().intervals() != grid.intervals()) {
    throw Error("estimate: inputs come from different grids");
  }
}

ErrorBreakdown breakdown(const EstimateInputs& in) {
  check_inputs(in);
  const auto pts = unit_rule();
  ErrorBreakdown out;
  const std::size_t N = in.reconstruction.grid().intervals();
  out.per_interval.reserve(N);
  for (std::size_t n = 0; n < N; ++n) {
    const auto v = interval_vectors(in, n, pts);
    out.per_interval.push_back({v.e1.sum(), v.e2.sum(), v.e3.sum()});
  }
  for (const auto& r : out.per_interval) {
    out.e1 += r.e1;
    out.e2 += r.e2;
    out.e3 += r.e3;
  }
  out.estimate_total = out.e1 + out.e2 + out.e3;
  return out;
}

}  // namespace

ErrorBreakdown error_breakdown(const EstimateInputs& in) {
  if (in.adjoint.kind != QoiSpec::Kind::final_time) {
    throw Error("error_breakdown: adjoint was solved for a time-integrated QoI");
  }
  return breakdown(in);
}

ErrorBreakdown error_breakdown_timedep(const EstimateInputs& in) {
  if (in.adjoint.kind != QoiSpec::Kind::time_integrated) {
    throw Error("error_breakdown_timedep: adjoint was solved for a final-time QoI");
  }
  return breakdown(in);
}

std::map<std::string, IntervalTerms> component_split(const EstimateInputs& in,
                                                     const ComponentMask& mask) {
  check_inputs(in);
  mask.validate(in.problem.dim);
  const auto pts = unit_rule();
  std::map<std::string, IntervalTerms> out;
  for (const auto& b : mask.blocks) out[b.name] = {};
  const std::size_t N = in.reconstruction.grid().intervals();
  for (std::size_t n = 0; n < N; ++n) {
    const auto v = interval_vectors(in, n, pts);
    for (const auto& b : mask.blocks) {
      auto& acc = out[b.name];
      double s1 = 0.0, s2 = 0.0, s3 = 0.0;
      for (auto i : b.indices) {
        const auto ii = static_cast<Eigen::Index>(i);
        s1 += v.e1[ii];
        s2 += v.e2[ii];
        s3 += v.e3[ii];
      }
      acc.e1 += s1;
      acc.e2 += s2;
      acc.e3 += s3;
    }
  }
  return out;
}

std::optional<double> effectivity(double estimate_total, double true_error) {
  if (true_error == 0.0) return std::nullopt;
  return estimate_total / true_error;
}

bool OrthogonalityReport::passes(double tol) const {
  return max_residual < tol * (1.0 + max_adjoint);
}

OrthogonalityReport galerkin_orthogonality_check(const EstimateInputs& in) {
  check_inputs(in);
  const auto pts = unit_rule();
  OrthogonalityReport rep;
  const std::size_t N = in.reconstruction.grid().intervals();
  for (std::size_t n = 0; n < N; ++n) {
    const auto v = interval_vectors(in, n, pts);
    const double r = std::abs(v.orth.sum());
    rep.per_interval.push_back(r);
    rep.max_residual = std::max(rep.max_residual, r);
    for (const auto& val : in.adjoint.phi.interval(n)) {
      rep.max_adjoint = std::max(rep.max_adjoint, val.lpNorm<Eigen::Infinity>());
    }
  }
  return rep;
}

double residual_estimate(const EstimateInputs& in) {
  check_inputs(in);
  const auto pts = unit_rule();
  double total = 0.0;
  const std::size_t N = in.reconstruction.grid().intervals();
  for (std::size_t n = 0; n < N; ++n) total += interval_vectors(in, n, pts).residual.sum();
  return total;
}

double discrete_qoi(const PiecewisePolynomial& reconstruction, const QoiSpec& qoi) {
  const auto& grid = reconstruction.grid();
  if (qoi.kind == QoiSpec::Kind::final_time) {
    return qoi.apply(reconstruction.right_value(grid.intervals() - 1));
  }
  static const GaussRule rule = gauss_rule(10);
  double total = 0.0;
  for (std::size_t n = 0; n < grid.intervals(); ++n) {
    const double k = grid.step(n);
    double acc = 0.0;
    for (std::size_t g = 0; g < rule.size(); ++g) {
      const double s = 0.5 * (rule.points[g] + 1.0);
      const double t = grid.node(n) + s * k;
      acc += 0.5 * rule.weights[g] * reconstruction.eval_local(n, s).dot(qoi.psi_tilde(t));
    }
    total += k * acc;
  }
  return total;
}

}  // namespace imexest
