#include "gelgrip/geometry/integrate.hpp"

#include <vector>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "gelgrip/core/error.hpp"

namespace gelgrip::geometry {

struct HeightIntegrator::Impl {
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
};

HeightIntegrator::HeightIntegrator(int width, int height)
    : width_(width), height_(height), impl_(std::make_unique<Impl>()) {
  if (width < 3 || height < 3) throw Error("height integration needs at least 3x3 pixels");
  const int iw = width - 2, ih = height - 2;
  auto idx = [iw](int y, int x) { return (y - 1) * iw + (x - 1); };
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(static_cast<std::size_t>(iw) * ih * 5);
  for (int y = 1; y <= ih; ++y) {
    for (int x = 1; x <= iw; ++x) {
      const int i = idx(y, x);
      t.emplace_back(i, i, 4.0);
      if (x > 1) t.emplace_back(i, idx(y, x - 1), -1.0);
      if (x < iw) t.emplace_back(i, idx(y, x + 1), -1.0);
      if (y > 1) t.emplace_back(i, idx(y - 1, x), -1.0);
      if (y < ih) t.emplace_back(i, idx(y + 1, x), -1.0);
    }
  }
  Eigen::SparseMatrix<double> a(iw * ih, iw * ih);
  a.setFromTriplets(t.begin(), t.end());
  impl_->solver.compute(a);
  if (impl_->solver.info() != Eigen::Success) throw Error("Poisson factorisation failed (singular)");
}

HeightIntegrator::~HeightIntegrator() = default;
HeightIntegrator::HeightIntegrator(HeightIntegrator&&) noexcept = default;
HeightIntegrator& HeightIntegrator::operator=(HeightIntegrator&&) noexcept = default;

Grid HeightIntegrator::solve(const Grid& gx, const Grid& gy) const {
  if (gx.rows() != height_ || gx.cols() != width_ || gy.rows() != height_ ||
      gy.cols() != width_) {
    throw Error("gradient field does not match the integrator size");
  }
  const int iw = width_ - 2, ih = height_ - 2;
  Eigen::VectorXd b(iw * ih);
  for (int y = 1; y <= ih; ++y) {
    for (int x = 1; x <= iw; ++x) {
      const double div =
          0.5 * (gx(y, x + 1) - gx(y, x - 1)) + 0.5 * (gy(y + 1, x) - gy(y - 1, x));
      b((y - 1) * iw + (x - 1)) = -div;
    }
  }
  const Eigen::VectorXd h = impl_->solver.solve(b);
  if (impl_->solver.info() != Eigen::Success) throw Error("Poisson solve failed");
  Grid out = Grid::Zero(height_, width_);
  for (int y = 1; y <= ih; ++y) {
    for (int x = 1; x <= iw; ++x) out(y, x) = h((y - 1) * iw + (x - 1));
  }
  return out;
}

HeightMap HeightIntegrator::integrate(const NormalMap& n, double px_per_mm) const {
  if (!(px_per_mm > 0.0)) throw Error("px_per_mm must be positive");
  if ((n.nz().array() <= 0.0).any()) throw Error("normals must have nz > 0");
  // slope in mm of height per pixel step
  const Grid gx = (-n.nx().array() / n.nz().array() / px_per_mm).matrix();
  const Grid gy = (-n.ny().array() / n.nz().array() / px_per_mm).matrix();
  return HeightMap(solve(gx, gy), px_per_mm).gauge_fixed();
}

HeightMap integrate_normals(const NormalMap& n, double px_per_mm) {
  return HeightIntegrator(n.width(), n.height()).integrate(n, px_per_mm);
}

}  // namespace gelgrip::geometry
