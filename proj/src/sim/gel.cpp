#include <cmath>
#include <numbers>

#include "gelgrip/core/error.hpp"
#include "gelgrip/sim/gel.hpp"

namespace gelgrip::sim {

void GelModel::validate() const {
  if (!(gel_size_mm > 0.0)) throw Error("gel size must be positive");
  if (frame_px < 8) throw Error("frame must be at least 8 px");
  if (!(membrane_sigma_mm > 0.0)) throw Error("membrane_sigma_mm must be positive");
  if (!(shear_falloff_mm > 0.0)) throw Error("shear_falloff_mm must be positive");
  if (marker_rows < 2 || marker_cols < 2) throw Error("marker grid needs at least 2x2 markers");
  for (double b : background) {
    if (b < 0.0 || b > 1.0) throw Error("background colour outside [0,1]");
  }
}

MarkerSet GelModel::rest_markers() const {
  validate();
  const double s = px_per_mm();
  const double pitch_x = gel_size_mm / marker_cols;
  const double pitch_y = gel_size_mm / marker_rows;
  std::vector<Marker> m;
  m.reserve(static_cast<std::size_t>(marker_rows) * marker_cols);
  for (int r = 0; r < marker_rows; ++r) {
    for (int c = 0; c < marker_cols; ++c) {
      m.push_back({r * marker_cols + c, (c + 0.5) * pitch_x * s, (r + 0.5) * pitch_y * s});
    }
  }
  return MarkerSet(std::move(m), marker_rows, marker_cols);
}

GelModel GelModel::with_frame_px(int px) const {
  GelModel g = *this;
  g.frame_px = px;
  return g;
}

LightRig LightRig::standard(double elevation_deg, double azimuth0_deg, double intensity) {
  constexpr double kDeg = std::numbers::pi / 180.0;
  LightRig rig;
  for (int i = 0; i < 3; ++i) {
    const double az = (azimuth0_deg + 120.0 * i) * kDeg;
    const double el = elevation_deg * kDeg;
    rig.lights[i].direction =
        Eigen::Vector3d(std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el));
    rig.lights[i].rgb = {0.0, 0.0, 0.0};
    rig.lights[i].rgb[i] = intensity;
  }
  return rig;
}

LightRig LightRig::rotated(double angle_rad) const {
  LightRig out = *this;
  const double c = std::cos(angle_rad), s = std::sin(angle_rad);
  for (Light& l : out.lights) {
    const Eigen::Vector3d d = l.direction;
    l.direction = Eigen::Vector3d(c * d.x() - s * d.y(), s * d.x() + c * d.y(), d.z());
  }
  return out;
}

void LightRig::validate() const {
  for (const Light& l : lights) {
    if (std::abs(l.direction.norm() - 1.0) > 1e-9) throw Error("light direction must be unit");
    if (!(l.direction.z() > 0.0)) throw Error("light must face the gel (positive z)");
  }
}

double max_depth(const IndenterShape& shape) {
  struct {
    double operator()(const Sphere& s) const { return s.radius_mm; }
    double operator()(const HexPyramid& p) const { return p.height_mm; }
    double operator()(const FruitSurface& f) const { return f.radius_mm; }
  } visitor;
  return std::visit(visitor, shape);
}

}  // namespace gelgrip::sim
