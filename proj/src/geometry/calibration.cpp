#include "gelgrip/geometry/calibration.hpp"

#include <cmath>

#include "gelgrip/core/error.hpp"

namespace gelgrip::geometry {

PixelInput pixel_input(const DiffFrame& diff, int y, int x) {
  const double sx = diff.width() > 1 ? 2.0 * x / (diff.width() - 1) - 1.0 : 0.0;
  const double sy = diff.height() > 1 ? 2.0 * y / (diff.height() - 1) - 1.0 : 0.0;
  return {diff.at(y, x, 0), diff.at(y, x, 1), diff.at(y, x, 2), sx, sy};
}

Eigen::Vector3d sphere_normal(Vec2 q_mm, double radius_mm) {
  const double rho2 = q_mm.dot(q_mm);
  if (rho2 >= radius_mm * radius_mm) return {0.0, 0.0, 1.0};
  return Eigen::Vector3d(q_mm.x, q_mm.y, std::sqrt(radius_mm * radius_mm - rho2)) / radius_mm;
}

CalibrationDataset build_calibration_dataset(const std::vector<CalibrationPress>& presses,
                                             int flat_stride) {
  if (presses.empty()) throw Error("calibration needs at least one press");
  if (flat_stride < 1) throw Error("flat_stride must be >= 1");
  CalibrationDataset data;
  data.sphere_radius_mm = presses.front().sphere_radius_mm;
  for (const CalibrationPress& p : presses) {
    const DiffFrame& d = p.diff;
    const double s = d.px_per_mm();
    if (p.center_px.x < 0.0 || p.center_px.y < 0.0 || p.center_px.x > d.width() - 1 ||
        p.center_px.y > d.height() - 1) {
      throw Error("calibration press centre lies outside the frame");
    }
    if (!(p.sphere_radius_mm > 0.0)) throw Error("sphere radius must be positive");
    if (p.contact_radius_px < 0.0 || p.contact_radius_px >= p.sphere_radius_mm * s) {
      throw Error("contact radius must be smaller than the sphere radius");
    }
    const double r2 = p.contact_radius_px * p.contact_radius_px;
    for (int y = 0; y < d.height(); ++y) {
      for (int x = 0; x < d.width(); ++x) {
        const Vec2 q{x - p.center_px.x, y - p.center_px.y};
        if (q.dot(q) <= r2) {
          data.samples.push_back({pixel_input(d, y, x), sphere_normal(q / s, p.sphere_radius_mm)});
        } else if (y % flat_stride == 0 && x % flat_stride == 0) {
          data.samples.push_back({pixel_input(d, y, x), Eigen::Vector3d(0.0, 0.0, 1.0)});
        }
      }
    }
  }
  return data;
}

}  // namespace gelgrip::geometry
