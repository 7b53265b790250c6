#include <algorithm>
#include <cmath>

#include "gelgrip/sim/tactile.hpp"

namespace gelgrip::sim {

namespace {

// Derivative along one axis in mm/mm: central inside, one-sided on the rim.
double slope(const Grid& h, int y, int x, bool along_x, double px_per_mm) {
  const int n = along_x ? static_cast<int>(h.cols()) : static_cast<int>(h.rows());
  const int i = along_x ? x : y;
  auto at = [&](int j) { return along_x ? h(y, j) : h(j, x); };
  if (n < 2) return 0.0;
  if (i == 0) return (at(1) - at(0)) * px_per_mm;
  if (i == n - 1) return (at(n - 1) - at(n - 2)) * px_per_mm;
  return 0.5 * (at(i + 1) - at(i - 1)) * px_per_mm;
}

}  // namespace

NormalMap heightmap_normals(const HeightMap& h) {
  const int rows = h.height(), cols = h.width();
  Grid nx(rows, cols), ny(rows, cols), nz(rows, cols);
  for (int y = 0; y < rows; ++y) {
    for (int x = 0; x < cols; ++x) {
      const double gx = slope(h.values(), y, x, true, h.px_per_mm());
      const double gy = slope(h.values(), y, x, false, h.px_per_mm());
      const double inv = 1.0 / std::sqrt(1.0 + gx * gx + gy * gy);
      nx(y, x) = -gx * inv;
      ny(y, x) = -gy * inv;
      nz(y, x) = inv;
    }
  }
  return NormalMap(std::move(nx), std::move(ny), std::move(nz));
}

TactileFrame render_tactile(const HeightMap& h, const LightRig& rig, const GelModel& gel,
                            double timestamp) {
  rig.validate();
  const NormalMap n = heightmap_normals(h);
  RgbImage img(h.width(), h.height(), gel.background);
  for (int y = 0; y < h.height(); ++y) {
    for (int x = 0; x < h.width(); ++x) {
      const Eigen::Vector3d nv = n.at(y, x);
      for (const Light& l : rig.lights) {
        const double shade = std::max(0.0, nv.dot(l.direction));
        for (int c = 0; c < 3; ++c) img.at(y, x, c) += l.rgb[c] * shade;
      }
      for (int c = 0; c < 3; ++c) img.at(y, x, c) = std::clamp(img.at(y, x, c), 0.0, 1.0);
    }
  }
  return TactileFrame(std::move(img), h.px_per_mm(), timestamp);
}

TactileFrame render_background(const LightRig& rig, const GelModel& gel) {
  return render_tactile(HeightMap::zeros(gel.frame_px, gel.frame_px, gel.px_per_mm()), rig, gel);
}

TactileFrame add_pixel_noise(const TactileFrame& frame, double sigma, Rng& rng) {
  if (sigma <= 0.0) return frame;
  RgbImage img = frame.pixels();
  for (int c = 0; c < 3; ++c) {
    for (int y = 0; y < img.height(); ++y) {
      for (int x = 0; x < img.width(); ++x) {
        img.at(y, x, c) = std::clamp(img.at(y, x, c) + normal(rng, 0.0, sigma), 0.0, 1.0);
      }
    }
  }
  return TactileFrame(std::move(img), frame.px_per_mm(), frame.timestamp());
}

}  // namespace gelgrip::sim
