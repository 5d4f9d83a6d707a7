#include "imexest/problems.hpp"

#include <cmath>
#include <numbers>

namespace imexest {

namespace {

using Triplet = Eigen::Triplet<double>;

/// y -> K y + boundary(t). Boundary may be empty (pure linear term).
struct AffineTerm {
  SparseMatrix K;
  std::function<Vector(double)> boundary;
};

SparseMatrix sum_of(const std::vector<std::shared_ptr<const AffineTerm>>& terms,
                    Eigen::Index n) {
  SparseMatrix s(n, n);
  for (const auto& t : terms) s += t->K;
  s.makeCompressed();
  return s;
}

/// Builds (eval, jac) closures for a sum of affine terms.
std::pair<RhsFn, JacobianFn> affine_sum(std::vector<std::shared_ptr<const AffineTerm>> terms,
                                        Eigen::Index n) {
  auto K = std::make_shared<const SparseMatrix>(sum_of(terms, n));
  std::vector<std::function<Vector(double)>> boundaries;
  for (const auto& t : terms) {
    if (t->boundary) boundaries.push_back(t->boundary);
  }
  RhsFn eval = [K, boundaries](double t, const Vector& y) -> Vector {
    Vector out = (*K) * y;
    for (const auto& b : boundaries) out += b(t);
    return out;
  };
  JacobianFn jac = [K](double, const Vector&) { return *K; };
  return {std::move(eval), std::move(jac)};
}

SparseMatrix periodic_first_derivative(std::size_t m, double h,
                                       const std::function<double(std::size_t)>& coeff) {
  std::vector<Triplet> trips;
  const auto n = static_cast<long>(m);
  for (long i = 0; i < n; ++i) {
    const double c = coeff(static_cast<std::size_t>(i)) / (2.0 * h);
    trips.emplace_back(i, (i + 1) % n, c);
    trips.emplace_back(i, (i - 1 + n) % n, -c);
  }
  SparseMatrix D(n, n);
  D.setFromTriplets(trips.begin(), trips.end());
  D.prune(0.0);
  return D;
}

SparseMatrix periodic_second_derivative(std::size_t m, double h, double coeff) {
  std::vector<Triplet> trips;
  const auto n = static_cast<long>(m);
  const double c = coeff / (h * h);
  for (long i = 0; i < n; ++i) {
    trips.emplace_back(i, (i + 1) % n, c);
    trips.emplace_back(i, (i - 1 + n) % n, c);
    trips.emplace_back(i, i, -2.0 * c);
  }
  SparseMatrix D(n, n);
  D.setFromTriplets(trips.begin(), trips.end());
  return D;
}

SparseMatrix scalar_matrix(double v) {
  SparseMatrix s(1, 1);
  s.insert(0, 0) = v;
  return s;
}

SparseMatrix to_sparse(const Matrix& m) {
  SparseMatrix s = m.sparseView();
  s.makeCompressed();
  return s;
}

std::vector<std::size_t> iota_indices(std::size_t begin, std::size_t end) {
  std::vector<std::size_t> out;
  for (std::size_t i = begin; i < end; ++i) out.push_back(i);
  return out;
}

}  // namespace

std::size_t grid_count(double span, double h, const char* what) {
  if (!(h > 0.0)) throw Error(std::string(what) + ": grid spacing must be positive");
  const double ratio = span / h;
  const double rounded = std::round(ratio);
  if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) {
    throw Error(std::string(what) + ": domain length / h = " + std::to_string(ratio) +
                " is not a positive integer");
  }
  return static_cast<std::size_t>(rounded);
}

double AlfvenParams::alfven_speed() const { return B0 / std::sqrt(mu0 * rho); }

QoiSpec QoiSpec::final_time(Vector psi, std::string label) {
  QoiSpec q;
  q.kind = Kind::final_time;
  q.psi = std::move(psi);
  q.label = std::move(label);
  return q;
}

QoiSpec QoiSpec::time_integrated(std::size_t dim, TrajectoryFn psi_tilde, std::string label) {
  if (!psi_tilde) throw Error("time-integrated QoI needs a weight function");
  QoiSpec q;
  q.kind = Kind::time_integrated;
  q.psi = Vector::Zero(static_cast<Eigen::Index>(dim));
  q.psi_tilde = std::move(psi_tilde);
  q.label = std::move(label);
  return q;
}

SplitOdeProblem linear_advection_diffusion(double gamma, double h, bool swap_roles) {
  if (!(gamma > 0.0)) throw Error("linear_advection_diffusion: gamma must be positive");
  const std::size_t m = grid_count(1.0, h, "linear_advection_diffusion");
  const double two_pi = 2.0 * std::numbers::pi;

  auto advection = std::make_shared<AffineTerm>();
  advection->K = periodic_first_derivative(
      m, h, [&](std::size_t i) { return -std::sin(two_pi * static_cast<double>(i) * h); });
  auto diffusion = std::make_shared<AffineTerm>();
  diffusion->K = periodic_second_derivative(m, h, gamma);

  const auto n = static_cast<Eigen::Index>(m);
  auto [fa, ja] = affine_sum({advection}, n);
  auto [fd, jd] = affine_sum({diffusion}, n);

  SplitOdeProblem p;
  p.name = "linear_advection_diffusion";
  p.dim = m;
  if (swap_roles) {
    p.eval_f = fd;
    p.jac_f = jd;
    p.eval_g = fa;
    p.jac_g = ja;
  } else {
    p.eval_f = fa;
    p.jac_f = ja;
    p.eval_g = fd;
    p.jac_g = jd;
  }
  p.y0.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) p.y0(i) = std::sin(two_pi * static_cast<double>(i) * h);
  p.fields = {{"u", iota_indices(0, m)}};
  p.metadata = {{"problem", p.name}, {"gamma", gamma}, {"h", h}, {"m", m},
                {"swap_roles", swap_roles}};
  return p;
}

SplitOdeProblem burgers(double gamma, double h) {
  if (!(gamma > 0.0)) throw Error("burgers: gamma must be positive");
  const std::size_t m = grid_count(2.0, h, "burgers");
  if (m < 3) throw Error("burgers: need at least 3 grid points");
  const auto n = static_cast<Eigen::Index>(m);

  auto diffusion = std::make_shared<AffineTerm>();
  diffusion->K = periodic_second_derivative(m, h, gamma);
  auto [fd, jd] = affine_sum({diffusion}, n);

  SplitOdeProblem p;
  p.name = "burgers";
  p.dim = m;
  p.eval_f = [n, h](double, const Vector& u) -> Vector {
    Vector out(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double up = u((i + 1) % n);
      const double um = u((i - 1 + n) % n);
      out(i) = -u(i) * (up - um) / (2.0 * h);
    }
    return out;
  };
  p.jac_f = [n, h](double, const Vector& u) -> SparseMatrix {
    std::vector<Triplet> trips;
    trips.reserve(3 * static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
      const Eigen::Index ip = (i + 1) % n;
      const Eigen::Index im = (i - 1 + n) % n;
      trips.emplace_back(i, i, -(u(ip) - u(im)) / (2.0 * h));
      trips.emplace_back(i, ip, -u(i) / (2.0 * h));
      trips.emplace_back(i, im, u(i) / (2.0 * h));
    }
    SparseMatrix J(n, n);
    J.setFromTriplets(trips.begin(), trips.end());
    return J;
  };
  p.eval_g = fd;
  p.jac_g = jd;
  p.y0.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    p.y0(i) = std::sin(std::numbers::pi * (-1.0 + static_cast<double>(i) * h));
  }
  p.fields = {{"u", iota_indices(0, m)}};
  p.metadata = {{"problem", p.name}, {"gamma", gamma}, {"h", h}, {"m", m},
                {"discretization", "advective central differences"}};
  return p;
}

std::pair<double, double> alfven_analytic(const AlfvenParams& prm, double zeta, double t) {
  if (t <= 0.0) return {0.0, 0.0};
  const double A0 = prm.alfven_speed();
  const double d = prm.diffusivity();
  const double U = prm.U;
  const double root = 2.0 * std::sqrt(d * t);
  const double a1 = (zeta - A0 * t) / root;
  const double a2 = (zeta + A0 * t) / root;
  const double em = std::exp(-A0 * zeta / d);
  const double ep = std::exp(A0 * zeta / d);
  // 1 - erf(x) is evaluated as erfc(x).
  const double v = U / 4.0 * (em * std::erfc(a1) - std::erf(a1)) +
                   U / 4.0 * (ep * std::erfc(a2) - std::erf(a2) + 2.0);
  const double B = -0.25 * em * (-1.0 + ep) * U * std::sqrt(prm.mu * prm.rho) *
                   (std::erfc(a1) + ep * std::erfc(a2));
  return {v, B};
}

std::pair<double, double> alfven_boundary(const AlfvenParams& prm, double zeta, double t) {
  return alfven_analytic(prm, zeta, t);
}

namespace {

SplitOdeProblem build_alfven(const AlfvenSetup& setup) {
  const auto& prm = setup.params;
  if (!(prm.B0 > 0.0 && prm.rho > 0.0 && prm.mu > 0.0 && prm.eta > 0.0 && prm.mu0 > 0.0 &&
        prm.U > 0.0)) {
    throw Error("mhd_alfven: all physical parameters must be positive");
  }
  const std::size_t cells = grid_count(setup.L, setup.h, "mhd_alfven");
  if (cells < 2) throw Error("mhd_alfven: grid has no interior points");
  const std::size_t mv = cells - 1;
  const auto nv = static_cast<Eigen::Index>(mv);
  const auto n = 2 * nv;
  const double h = setup.h;
  const double L = setup.L;

  // Helpers producing operators that act on one field and write into another.
  auto first_derivative = [&](Eigen::Index from, Eigen::Index to, double c) {
    std::vector<Triplet> trips;
    for (Eigen::Index i = 0; i < nv; ++i) {
      if (i + 1 < nv) trips.emplace_back(to + i, from + i + 1, c / (2.0 * h));
      if (i > 0) trips.emplace_back(to + i, from + i - 1, -c / (2.0 * h));
    }
    SparseMatrix K(n, n);
    K.setFromTriplets(trips.begin(), trips.end());
    return K;
  };
  auto second_derivative = [&](Eigen::Index field, double c) {
    std::vector<Triplet> trips;
    const double s = c / (h * h);
    for (Eigen::Index i = 0; i < nv; ++i) {
      trips.emplace_back(field + i, field + i, -2.0 * s);
      if (i + 1 < nv) trips.emplace_back(field + i, field + i + 1, s);
      if (i > 0) trips.emplace_back(field + i, field + i - 1, s);
    }
    SparseMatrix K(n, n);
    K.setFromTriplets(trips.begin(), trips.end());
    return K;
  };
  // Boundary contribution of a stencil reading `use_v ? v : B` at the walls,
  // written into row block `to`. left/right are the stencil weights.
  auto boundary = [prm, n, nv, L](bool use_v, Eigen::Index to, double left, double right) {
    return [=](double t) -> Vector {
      Vector b = Vector::Zero(n);
      const auto [v0, B0v] = alfven_boundary(prm, 0.0, t);
      const auto [vL, BLv] = alfven_boundary(prm, L, t);
      b(to) += left * (use_v ? v0 : B0v);
      b(to + nv - 1) += right * (use_v ? vL : BLv);
      return b;
    };
  };

  const double lorentz = prm.B0 / prm.rho;
  const double viscous = prm.mu / prm.rho;
  const double induction = prm.B0;
  const double resist = prm.diffusivity();
  const Eigen::Index V = 0;
  const Eigen::Index Bf = nv;

  auto lorentz_term = std::make_shared<AffineTerm>();
  lorentz_term->K = first_derivative(Bf, V, lorentz);
  lorentz_term->boundary = boundary(false, V, -lorentz / (2.0 * h), lorentz / (2.0 * h));

  auto viscous_term = std::make_shared<AffineTerm>();
  viscous_term->K = second_derivative(V, viscous);
  viscous_term->boundary = boundary(true, V, viscous / (h * h), viscous / (h * h));

  auto induction_term = std::make_shared<AffineTerm>();
  induction_term->K = first_derivative(V, Bf, induction);
  induction_term->boundary =
      boundary(true, Bf, -induction / (2.0 * h), induction / (2.0 * h));

  auto resistive_term = std::make_shared<AffineTerm>();
  resistive_term->K = second_derivative(Bf, resist);
  resistive_term->boundary = boundary(false, Bf, resist / (h * h), resist / (h * h));

  std::vector<std::shared_ptr<const AffineTerm>> f_terms{induction_term};
  std::vector<std::shared_ptr<const AffineTerm>> g_terms{viscous_term, resistive_term};
  if (setup.split == AlfvenSplit::v_split) {
    f_terms.push_back(lorentz_term);
  } else {
    g_terms.push_back(lorentz_term);
  }
  auto [ef, jf] = affine_sum(f_terms, n);
  auto [eg, jg] = affine_sum(g_terms, n);

  SplitOdeProblem p;
  p.name = "mhd_alfven";
  p.dim = static_cast<std::size_t>(n);
  p.eval_f = ef;
  p.jac_f = jf;
  p.eval_g = eg;
  p.jac_g = jg;
  p.y0 = Vector::Zero(n);
  p.autonomous = false;
  p.analytic = [prm, nv, h](double t) -> Vector {
    Vector y(2 * nv);
    for (Eigen::Index i = 0; i < nv; ++i) {
      const auto [v, B] = alfven_analytic(prm, static_cast<double>(i + 1) * h, t);
      y(i) = v;
      y(nv + i) = B;
    }
    return y;
  };
  p.fields = {{"v", iota_indices(0, mv)}, {"B", iota_indices(mv, 2 * mv)}};
  p.alfven = setup;
  p.metadata = {{"problem", p.name},
                {"B0", prm.B0},
                {"rho", prm.rho},
                {"mu", prm.mu},
                {"eta", prm.eta},
                {"mu0", prm.mu0},
                {"U", prm.U},
                {"A0", prm.alfven_speed()},
                {"h", h},
                {"L", L},
                {"interior_points", mv},
                {"split", setup.split == AlfvenSplit::v_split ? "v-split" : "v-implicit"}};
  return p;
}

}  // namespace

SplitOdeProblem mhd_alfven(const AlfvenParams& params, double h, double L) {
  AlfvenSetup setup;
  setup.params = params;
  setup.h = h;
  setup.L = L;
  setup.split = AlfvenSplit::v_split;
  return build_alfven(setup);
}

SplitOdeProblem mhd_split(const SplitOdeProblem& problem, AlfvenSplit mode) {
  if (!problem.alfven) throw Error("mhd_split: problem was not produced by mhd_alfven");
  AlfvenSetup setup = *problem.alfven;
  setup.split = mode;
  return build_alfven(setup);
}

SplitOdeProblem scalar_linear(double lambda_f, double lambda_g, double y0) {
  SplitOdeProblem p;
  p.name = "scalar_linear";
  p.dim = 1;
  p.eval_f = [lambda_f](double, const Vector& y) -> Vector { return lambda_f * y; };
  p.eval_g = [lambda_g](double, const Vector& y) -> Vector { return lambda_g * y; };
  p.jac_f = [lambda_f](double, const Vector&) { return scalar_matrix(lambda_f); };
  p.jac_g = [lambda_g](double, const Vector&) { return scalar_matrix(lambda_g); };
  p.y0 = Vector::Constant(1, y0);
  const double lambda = lambda_f + lambda_g;
  p.analytic = [lambda, y0](double t) -> Vector {
    return Vector::Constant(1, y0 * std::exp(lambda * t));
  };
  p.fields = {{"y", {0}}};
  p.metadata = {{"problem", p.name}, {"lambda_f", lambda_f}, {"lambda_g", lambda_g},
                {"y0", y0}};
  return p;
}

SplitOdeProblem logistic(double y0) {
  if (!(y0 > 0.0)) throw Error("logistic: y0 must be positive");
  SplitOdeProblem p;
  p.name = "logistic";
  p.dim = 1;
  p.eval_f = [](double, const Vector& y) -> Vector { return y; };
  p.eval_g = [](double, const Vector& y) -> Vector { return -y.cwiseProduct(y); };
  p.jac_f = [](double, const Vector&) { return scalar_matrix(1.0); };
  p.jac_g = [](double, const Vector& y) { return scalar_matrix(-2.0 * y(0)); };
  p.y0 = Vector::Constant(1, y0);
  p.analytic = [y0](double t) -> Vector {
    return Vector::Constant(1, 1.0 / (1.0 + (1.0 / y0 - 1.0) * std::exp(-t)));
  };
  p.fields = {{"y", {0}}};
  p.metadata = {{"problem", p.name}, {"y0", y0}};
  return p;
}

SplitOdeProblem rotation_decay(double decay, double frequency, Vector y0) {
  if (y0.size() != 2) throw Error("rotation_decay: y0 must have 2 entries");
  Matrix Af(2, 2);
  Af << 0.0, frequency, -frequency, 0.0;
  Matrix Ag = -decay * Matrix::Identity(2, 2);
  SplitOdeProblem p = linear_system(Af, Ag, y0);
  p.name = "rotation_decay";
  p.analytic = [decay, frequency, y0](double t) -> Vector {
    const double c = std::cos(frequency * t);
    const double s = std::sin(frequency * t);
    Vector y(2);
    y << c * y0(0) + s * y0(1), -s * y0(0) + c * y0(1);
    return std::exp(-decay * t) * y;
  };
  p.metadata = {{"problem", p.name}, {"decay", decay}, {"frequency", frequency},
                {"y0", std::vector<double>(y0.data(), y0.data() + 2)}};
  return p;
}

SplitOdeProblem linear_system(const Matrix& Af, const Matrix& Ag, Vector y0) {
  const auto n = y0.size();
  if (Af.rows() != n || Af.cols() != n || Ag.rows() != n || Ag.cols() != n) {
    throw Error("linear_system: matrix shapes do not match y0");
  }
  auto sf = std::make_shared<const SparseMatrix>(to_sparse(Af));
  auto sg = std::make_shared<const SparseMatrix>(to_sparse(Ag));
  SplitOdeProblem p;
  p.name = "linear_system";
  p.dim = static_cast<std::size_t>(n);
  p.eval_f = [sf](double, const Vector& y) -> Vector { return (*sf) * y; };
  p.eval_g = [sg](double, const Vector& y) -> Vector { return (*sg) * y; };
  p.jac_f = [sf](double, const Vector&) { return *sf; };
  p.jac_g = [sg](double, const Vector&) { return *sg; };
  p.y0 = std::move(y0);
  p.fields = {{"y", iota_indices(0, p.dim)}};
  p.metadata = {{"problem", p.name}, {"dim", p.dim}};
  return p;
}

SplitOdeProblem zero_rhs(std::size_t dim) {
  if (dim == 0) throw Error("zero_rhs: dimension must be positive");
  const auto n = static_cast<Eigen::Index>(dim);
  SplitOdeProblem p;
  p.name = "zero_rhs";
  p.dim = dim;
  p.eval_f = [n](double, const Vector&) -> Vector { return Vector::Zero(n); };
  p.eval_g = p.eval_f;
  p.jac_f = [n](double, const Vector&) { return SparseMatrix(n, n); };
  p.jac_g = p.jac_f;
  p.y0 = Vector::LinSpaced(n, 1.0, static_cast<double>(n));
  const Vector y0 = p.y0;
  p.analytic = [y0](double) { return y0; };
  p.fields = {{"y", iota_indices(0, dim)}};
  p.metadata = {{"problem", p.name}, {"dim", dim}};
  return p;
}

QoiSpec qoi_mean_left_half(std::size_t m, double scale) {
  if (m == 0 || m % 2 != 0) throw Error("qoi_mean_left_half: m must be even and positive");
  Vector psi = Vector::Zero(static_cast<Eigen::Index>(m));
  psi.head(static_cast<Eigen::Index>(m / 2 + 1)).setConstant(scale);
  return QoiSpec::final_time(std::move(psi), "mean_left_half");
}

QoiSpec qoi_integral_v(std::size_t m_v, double h) {
  if (m_v == 0) throw Error("qoi_integral_v: empty v-block");
  Vector psi = Vector::Zero(static_cast<Eigen::Index>(2 * m_v));
  psi.head(static_cast<Eigen::Index>(m_v)).setConstant(h);
  return QoiSpec::final_time(std::move(psi), "integral_v");
}

Matrix finite_difference_jacobian(const RhsFn& fn, double t, const Vector& y,
                                  double rel_step) {
  const auto n = y.size();
  Matrix J(n, n);
  Vector yp = y;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double step = rel_step * std::max(1.0, std::abs(y(j)));
    yp(j) = y(j) + step;
    const Vector fp = fn(t, yp);
    yp(j) = y(j) - step;
    const Vector fm = fn(t, yp);
    yp(j) = y(j);
    J.col(j) = (fp - fm) / (2.0 * step);
  }
  return J;
}

}  // namespace imexest
