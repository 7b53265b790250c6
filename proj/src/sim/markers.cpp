#include <cmath>
#include <numbers>

#include "gelgrip/core/error.hpp"
#include "gelgrip/sim/tactile.hpp"

namespace gelgrip::sim {

ContactDisc equivalent_disc(const ContactMask& mask) {
  const auto c = mask.centroid();
  if (!c) return {};
  return {*c, std::sqrt(static_cast<double>(mask.count()) / std::numbers::pi)};
}

Vec2 shear_displacement_px(Vec2 p, Vec2 center_px, double radius_px, Vec2 shear_mm,
                           ShearMode mode, const GelModel& gel) {
  if (radius_px <= 0.0) return {};
  const double s = gel.px_per_mm();
  const double sigma = gel.shear_falloff_mm * s;
  const Vec2 q = p - center_px;
  const double r = q.norm();
  double f = 1.0, df = 0.0;
  if (r > radius_px) {
    const double d = r - radius_px;
    f = std::exp(-0.5 * d * d / (sigma * sigma));
    df = -d / (sigma * sigma) * f;
  }
  if (mode == ShearMode::kTranslation) {
    const Vec2 t = shear_mm * s;
    Vec2 out = t * f;
    if (r > 0.0) out += q * (t.dot(q) * df / r);
    return out;
  }
  const double theta = shear_mm.x * s / radius_px;
  return Vec2{-q.y, q.x} * (theta * f);
}

MarkerSet deform_markers(const MarkerSet& rest, const ContactMask& contact, Vec2 shear_mm,
                         ShearMode mode, const GelModel& gel) {
  if (shear_mm.norm() >= 0.25 * gel.gel_size_mm) {
    throw Error("shear magnitude must stay below a quarter of the gel size");
  }
  const ContactDisc disc = equivalent_disc(contact);
  std::vector<Marker> moved = rest.markers();
  if (disc.radius <= 0.0) return MarkerSet(std::move(moved), rest.grid_rows(), rest.grid_cols());
  for (Marker& m : moved) {
    const Vec2 d = shear_displacement_px({m.x, m.y}, disc.center, disc.radius, shear_mm, mode, gel);
    m.x += d.x;
    m.y += d.y;
  }
  return MarkerSet(std::move(moved), rest.grid_rows(), rest.grid_cols());
}

}  // namespace gelgrip::sim
