#pragma once

#include <memory>

#include "gelgrip/core/types.hpp"

namespace gelgrip::geometry {

/// Poisson height recovery on a fixed frame size. The sparse 5-point
/// Laplacian with zero height on the frame edge is factorised once, so
/// repeated solves cost one back-substitution each.
class HeightIntegrator {
 public:
  HeightIntegrator(int width, int height);
  ~HeightIntegrator();
  HeightIntegrator(HeightIntegrator&&) noexcept;
  HeightIntegrator& operator=(HeightIntegrator&&) noexcept;

  int width() const { return width_; }
  int height() const { return height_; }

  /// Raw Poisson solution for a gradient field in height units per pixel.
  /// Linear in (gx, gy); edge pixels are exactly zero.
  Grid solve(const Grid& gx, const Grid& gy) const;

  /// Normals -> slopes (-nx/nz, -ny/nz) -> heights in mm, gauge fixed to min 0.
  HeightMap integrate(const NormalMap& n, double px_per_mm) const;

 private:
  struct Impl;
  int width_;
  int height_;
  std::unique_ptr<Impl> impl_;
};

/// One-shot convenience wrapper around HeightIntegrator.
HeightMap integrate_normals(const NormalMap& n, double px_per_mm);

}  // namespace gelgrip::geometry
