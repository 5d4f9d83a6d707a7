#include "imexest/adjoint.hpp"

#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>

namespace imexest {

SparseMatrix LinearizedOperator::eval(double t) const {
  const auto& grid = reconstruction_.grid();
  const std::size_t n = grid.locate(t);
  return eval_local(n, (t - grid.node(n)) / grid.step(n));
}

SparseMatrix LinearizedOperator::eval_local(std::size_t n, double s) const {
  const auto& grid = reconstruction_.grid();
  const double t = grid.node(n) + s * grid.step(n);
  const Vector y = reconstruction_.eval_local(n, s);
  SparseMatrix H = problem_.jac_f(t, y) + problem_.jac_g(t, y);
  H.makeCompressed();
  return H;
}

SparseMatrix operator_eval(const LinearizedOperator& op, double t) { return op.eval(t); }

namespace {

struct GaussPoint {
  double s;
  double w;  // weight on [0, 1]
};

std::vector<GaussPoint> unit_gauss() {
  const auto& rule = interval_rule();
  std::vector<GaussPoint> pts;
  for (std::size_t g = 0; g < rule.size(); ++g) {
    pts.push_back({0.5 * (rule.points[g] + 1.0), 0.5 * rule.weights[g]});
  }
  return pts;
}

}  // namespace

AdjointSolution solve_adjoint(const SplitOdeProblem& problem,
                              const PiecewisePolynomial& reconstruction, const QoiSpec& qoi) {
  const auto& grid = reconstruction.grid();
  const int q = reconstruction.degree();
  const int r = q + 1;
  const auto m = static_cast<Eigen::Index>(problem.dim);
  if (qoi.psi.size() != m) throw Error("solve_adjoint: QoI weight has wrong length");
  const bool integrated = qoi.kind == QoiSpec::Kind::time_integrated;
  if (integrated && !qoi.psi_tilde) throw Error("solve_adjoint: missing psi_tilde");

  AdjointSolution sol{PiecewisePolynomial(grid, r, problem.dim), qoi.kind};
  const LinearizedOperator op(problem, reconstruction);
  const auto& basis = sol.phi.reference_basis();
  const auto gauss = unit_gauss();

  // D(l, j) = int_0^1 l_j'(s) P_l(s) ds; V(g, l) = P_l(s_g); Lg(g, j) = l_j(s_g).
  Matrix D = Matrix::Zero(r, r + 1);
  Matrix V(static_cast<Eigen::Index>(gauss.size()), r);
  Matrix Lg(static_cast<Eigen::Index>(gauss.size()), r + 1);
  for (std::size_t g = 0; g < gauss.size(); ++g) {
    const auto gi = static_cast<Eigen::Index>(g);
    for (int l = 0; l < r; ++l) V(gi, l) = shifted_legendre(l, gauss[g].s);
    for (int j = 0; j <= r; ++j) Lg(gi, j) = basis.eval(static_cast<std::size_t>(j), gauss[g].s);
  }
  for (int l = 0; l < r; ++l) {
    for (int j = 0; j <= r; ++j) {
      double acc = 0.0;
      for (std::size_t g = 0; g < gauss.size(); ++g) {
        acc += gauss[g].w * basis.derivative(static_cast<std::size_t>(j), gauss[g].s) *
               V(static_cast<Eigen::Index>(g), l);
      }
      D(l, j) = acc;
    }
  }

  Vector right = integrated ? Vector::Zero(m) : qoi.psi;
  const Eigen::Index size = m * r;
  std::vector<Eigen::Triplet<double>> trips;

  for (std::size_t step = grid.intervals(); step-- > 0;) {
    const std::size_t n = step;
    const double k = grid.step(n);
    std::vector<SparseMatrix> Ht;
    Ht.reserve(gauss.size());
    for (const auto& gp : gauss) Ht.push_back(SparseMatrix(op.eval_local(n, gp.s).transpose()));

    // Block (l, j) = -D(l, j) I - k sum_g w_g l_j(s_g) P_l(s_g) H_g^T.
    trips.clear();
    for (int l = 0; l < r; ++l) {
      for (int j = 0; j < r; ++j) {
        const Eigen::Index row0 = l * m;
        const Eigen::Index col0 = j * m;
        if (D(l, j) != 0.0) {
          for (Eigen::Index i = 0; i < m; ++i) trips.emplace_back(row0 + i, col0 + i, -D(l, j));
        }
        for (std::size_t g = 0; g < gauss.size(); ++g) {
          const auto gi = static_cast<Eigen::Index>(g);
          const double c = -k * gauss[g].w * Lg(gi, j) * V(gi, l);
          if (c == 0.0) continue;
          const auto& H = Ht[g];
          for (Eigen::Index col = 0; col < H.outerSize(); ++col) {
            for (SparseMatrix::InnerIterator it(H, col); it; ++it) {
              trips.emplace_back(row0 + it.row(), col0 + it.col(), c * it.value());
            }
          }
        }
      }
    }
    SparseMatrix K(size, size);
    K.setFromTriplets(trips.begin(), trips.end());
    K.makeCompressed();

    // Unknowns are the increments Phi_j - right; the l_j sum to one and the
    // l_j' to zero, so the right value enters only through H^T right.
    Vector rhs = Vector::Zero(size);
    for (int l = 0; l < r; ++l) {
      Vector block = Vector::Zero(m);
      for (std::size_t g = 0; g < gauss.size(); ++g) {
        const auto gi = static_cast<Eigen::Index>(g);
        block += k * gauss[g].w * V(gi, l) * (Ht[g] * right);
        if (integrated) {
          const double t = grid.node(n) + gauss[g].s * k;
          block += k * gauss[g].w * V(gi, l) * qoi.psi_tilde(t);
        }
      }
      rhs.segment(l * m, m) = block;
    }

    Eigen::SparseLU<SparseMatrix> lu;
    lu.compute(K);
    if (lu.info() != Eigen::Success) {
      throw Error("solve_adjoint: singular local system on interval " + std::to_string(n));
    }
    const Vector x = lu.solve(rhs);
    auto& vals = sol.phi.interval(n);
    for (int j = 0; j < r; ++j) vals[static_cast<std::size_t>(j)] = right + x.segment(j * m, m);
    vals[static_cast<std::size_t>(r)] = right;
    right = vals.front();
  }
  return sol;
}

double adjoint_galerkin_residual(const SplitOdeProblem& problem,
                                 const PiecewisePolynomial& reconstruction,
                                 const AdjointSolution& adjoint, const QoiSpec& qoi) {
  const auto& grid = reconstruction.grid();
  const int q = reconstruction.degree();
  const LinearizedOperator op(problem, reconstruction);
  const auto gauss = unit_gauss();
  const bool integrated = adjoint.kind == QoiSpec::Kind::time_integrated;
  double worst = 0.0;
  for (std::size_t n = 0; n < grid.intervals(); ++n) {
    const double k = grid.step(n);
    for (int l = 0; l <= q; ++l) {
      Vector acc = Vector::Zero(static_cast<Eigen::Index>(problem.dim));
      for (const auto& gp : gauss) {
        const double t = grid.node(n) + gp.s * k;
        const Vector phi = adjoint.phi.eval_local(n, gp.s);
        Vector res = -adjoint.phi.derivative_local(n, gp.s) -
                     op.eval_local(n, gp.s).transpose() * phi;
        if (integrated) res -= qoi.psi_tilde(t);
        acc += k * gp.w * shifted_legendre(l, gp.s) * res;
      }
      worst = std::max(worst, acc.lpNorm<Eigen::Infinity>());
    }
  }
  return worst;
}

}  // namespace imexest
