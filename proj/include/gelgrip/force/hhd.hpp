#pragma once

#include <memory>

#include "gelgrip/core/types.hpp"

namespace gelgrip::force {

/// V = P + S + H with P curl-free, S divergence-free and H the remainder.
struct HHDResult {
  DisplacementField p;
  DisplacementField s;
  DisplacementField h;
  ScalarField phi;  // P = grad phi
  ScalarField psi;  // S = (d psi/dy, -d psi/dx)
};

/// Discrete derivatives shared by the decomposition and its checks. Both axes
/// use the same 1-D stencil: central differences inside, and
/// (f[1] - f[0]) / 2h, (f[n-1] - f[n-2]) / 2h on the two end nodes.
Grid ddx(const Grid& f, const GridGeometry& g);
Grid ddy(const Grid& f, const GridGeometry& g);
Grid divergence(const DisplacementField& f);
/// z-component of the curl, dv/dx - du/dy.
Grid curl(const DisplacementField& f);

/// Orthogonal decomposition on a fixed grid. P is the least-squares
/// projection of V onto gradients of potentials that vanish on the border,
/// S the projection onto rotated gradients of such potentials. The two
/// subspaces are orthogonal under the stencil above, so the projections are
/// independent, curl(P) and div(S) vanish identically, and constant fields
/// fall entirely into H. Normal equations are factorised once per grid.
class HhdSolver {
 public:
  explicit HhdSolver(const GridGeometry& grid);
  ~HhdSolver();
  HhdSolver(HhdSolver&&) noexcept;
  HhdSolver& operator=(HhdSolver&&) noexcept;

  const GridGeometry& grid() const { return grid_; }
  HHDResult decompose(const DisplacementField& v) const;

 private:
  struct Impl;
  GridGeometry grid_;
  std::unique_ptr<Impl> impl_;
};

/// One-shot decomposition. Grid must be at least 8x8.
HHDResult hhd_decompose(const DisplacementField& v);

}  // namespace gelgrip::force
