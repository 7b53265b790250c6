#include "gelgrip/force/hhd.hpp"

#include <vector>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "gelgrip/core/error.hpp"

namespace gelgrip::force {

namespace {

using Sparse = Eigen::SparseMatrix<double>;

// 1-D derivative stencil of length n and spacing h.
double stencil(int n, int i, int j, double h) {
  if (i == 0 || i == n - 1) {
    const int inner = i == 0 ? 1 : n - 2;
    if (j == inner) return i == 0 ? 0.5 / h : -0.5 / h;
    if (j == i) return i == 0 ? -0.5 / h : 0.5 / h;
    return 0.0;
  }
  if (j == i + 1) return 0.5 / h;
  if (j == i - 1) return -0.5 / h;
  return 0.0;
}

Sparse derivative_1d(int n, double h) {
  std::vector<Eigen::Triplet<double>> t;
  for (int i = 0; i < n; ++i) {
    for (int j = std::max(0, i - 1); j <= std::min(n - 1, i + 1); ++j) {
      const double a = stencil(n, i, j, h);
      if (a != 0.0) t.emplace_back(i, j, a);
    }
  }
  Sparse a(n, n);
  a.setFromTriplets(t.begin(), t.end());
  return a;
}

// Node (r, c) -> r * cols + c.
Sparse kron(const Sparse& a, const Sparse& b) {
  std::vector<Eigen::Triplet<double>> t;
  for (int ka = 0; ka < a.outerSize(); ++ka) {
    for (Sparse::InnerIterator ia(a, ka); ia; ++ia) {
      for (int kb = 0; kb < b.outerSize(); ++kb) {
        for (Sparse::InnerIterator ib(b, kb); ib; ++ib) {
          t.emplace_back(static_cast<int>(ia.row() * b.rows() + ib.row()),
                         static_cast<int>(ia.col() * b.cols() + ib.col()),
                         ia.value() * ib.value());
        }
      }
    }
  }
  Sparse k(a.rows() * b.rows(), a.cols() * b.cols());
  k.setFromTriplets(t.begin(), t.end());
  return k;
}

Sparse identity(int n) {
  Sparse i(n, n);
  i.setIdentity();
  return i;
}

Eigen::VectorXd flatten(const Grid& g) {
  Eigen::VectorXd v(g.size());
  for (Eigen::Index r = 0; r < g.rows(); ++r) {
    for (Eigen::Index c = 0; c < g.cols(); ++c) v(r * g.cols() + c) = g(r, c);
  }
  return v;
}

Grid unflatten(const Eigen::VectorXd& v, int rows, int cols) {
  Grid g(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) g(r, c) = v(static_cast<Eigen::Index>(r) * cols + c);
  }
  return g;
}

void check_shape(const Grid& f, const GridGeometry& g) {
  if (f.rows() != g.rows || f.cols() != g.cols) throw Error("field does not match its grid");
  if (g.rows < 2 || g.cols < 2) throw Error("derivatives need at least 2 nodes per axis");
}

}  // namespace

Grid ddx(const Grid& f, const GridGeometry& g) {
  check_shape(f, g);
  Grid out(g.rows, g.cols);
  for (int r = 0; r < g.rows; ++r) {
    for (int c = 0; c < g.cols; ++c) {
      double acc = 0.0;
      for (int j = std::max(0, c - 1); j <= std::min(g.cols - 1, c + 1); ++j) {
        acc += stencil(g.cols, c, j, g.spacing_x) * f(r, j);
      }
      out(r, c) = acc;
    }
  }
  return out;
}

Grid ddy(const Grid& f, const GridGeometry& g) {
  check_shape(f, g);
  Grid out(g.rows, g.cols);
  for (int r = 0; r < g.rows; ++r) {
    for (int c = 0; c < g.cols; ++c) {
      double acc = 0.0;
      for (int j = std::max(0, r - 1); j <= std::min(g.rows - 1, r + 1); ++j) {
        acc += stencil(g.rows, r, j, g.spacing_y) * f(j, c);
      }
      out(r, c) = acc;
    }
  }
  return out;
}

Grid divergence(const DisplacementField& f) { return ddx(f.u, f.grid) + ddy(f.v, f.grid); }

Grid curl(const DisplacementField& f) { return ddx(f.v, f.grid) - ddy(f.u, f.grid); }

struct HhdSolver::Impl {
  Sparse dx, dy, embed;  // embed: interior unknowns -> all nodes
  Eigen::SimplicialLDLT<Sparse> solver;
};

HhdSolver::HhdSolver(const GridGeometry& grid) : grid_(grid), impl_(std::make_unique<Impl>()) {
  if (grid.rows < 8 || grid.cols < 8) throw Error("HHD needs a grid of at least 8x8");
  if (!(grid.spacing_x > 0.0) || !(grid.spacing_y > 0.0)) throw Error("grid spacing must be positive");
  const int rows = grid.rows, cols = grid.cols;
  impl_->dx = kron(identity(rows), derivative_1d(cols, grid.spacing_x));
  impl_->dy = kron(derivative_1d(rows, grid.spacing_y), identity(cols));

  std::vector<Eigen::Triplet<double>> t;
  int k = 0;
  for (int r = 1; r < rows - 1; ++r) {
    for (int c = 1; c < cols - 1; ++c) t.emplace_back(r * cols + c, k++, 1.0);
  }
  impl_->embed.resize(rows * cols, k);
  impl_->embed.setFromTriplets(t.begin(), t.end());

  const Sparse gx = impl_->dx * impl_->embed;
  const Sparse gy = impl_->dy * impl_->embed;
  const Sparse normal = Sparse(gx.transpose() * gx) + Sparse(gy.transpose() * gy);
  impl_->solver.compute(normal);
  if (impl_->solver.info() != Eigen::Success) throw Error("HHD normal equations are singular");
}

HhdSolver::~HhdSolver() = default;
HhdSolver::HhdSolver(HhdSolver&&) noexcept = default;
HhdSolver& HhdSolver::operator=(HhdSolver&&) noexcept = default;

HHDResult HhdSolver::decompose(const DisplacementField& v) const {
  if (v.grid.rows != grid_.rows || v.grid.cols != grid_.cols || v.u.rows() != grid_.rows ||
      v.u.cols() != grid_.cols || v.v.rows() != grid_.rows || v.v.cols() != grid_.cols) {
    throw Error("field does not match the HHD grid");
  }
  const Impl& m = *impl_;
  const Eigen::VectorXd u = flatten(v.u), w = flatten(v.v);
  const Eigen::VectorXd rhs_phi = m.embed.transpose() * (m.dx.transpose() * u + m.dy.transpose() * w);
  const Eigen::VectorXd rhs_psi = m.embed.transpose() * (m.dy.transpose() * u - m.dx.transpose() * w);
  const Eigen::VectorXd phi_i = m.solver.solve(rhs_phi);
  const Eigen::VectorXd psi_i = m.solver.solve(rhs_psi);
  if (m.solver.info() != Eigen::Success) throw Error("HHD solve failed");
  const Eigen::VectorXd phi = m.embed * phi_i;
  const Eigen::VectorXd psi = m.embed * psi_i;

  const int rows = grid_.rows, cols = grid_.cols;
  HHDResult r{DisplacementField{grid_, unflatten(m.dx * phi, rows, cols), unflatten(m.dy * phi, rows, cols)},
              DisplacementField{grid_, unflatten(m.dy * psi, rows, cols), unflatten(-(m.dx * psi), rows, cols)},
              DisplacementField::zeros(grid_),
              ScalarField{grid_, unflatten(phi, rows, cols)},
              ScalarField{grid_, unflatten(psi, rows, cols)}};
  r.h.u = v.u - r.p.u - r.s.u;
  r.h.v = v.v - r.p.v - r.s.v;
  return r;
}

HHDResult hhd_decompose(const DisplacementField& v) { return HhdSolver(v.grid).decompose(v); }

}  // namespace gelgrip::force
