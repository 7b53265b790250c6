#pragma once

#include "gelgrip/core/random.hpp"
#include "gelgrip/core/types.hpp"
#include "gelgrip/sim/gel.hpp"

namespace gelgrip::sim {

/// Penetration of `shape` into the flat pad when its lowest point sits
/// `depth_mm` below the surface at `center_mm` (pad coordinates, mm).
/// Throws when depth exceeds max_depth(shape) or the centre is off the pad.
HeightMap indent_heightmap(const IndenterShape& shape, Vec2 center_mm, double depth_mm,
                           const GelModel& gel);

/// Membrane smoothing: separable Gaussian of membrane_sigma_mm, zero outside
/// the pad. Never increases the peak of a non-negative map.
HeightMap press(const HeightMap& raw, const GelModel& gel);

/// Shades the pad: background + sum over lights of rgb * max(0, n.l), clamped.
TactileFrame render_tactile(const HeightMap& h, const LightRig& rig, const GelModel& gel,
                            double timestamp = 0.0);

/// Flat-pad frame.
TactileFrame render_background(const LightRig& rig, const GelModel& gel);

/// Adds iid Gaussian read noise and clamps to [0,1].
TactileFrame add_pixel_noise(const TactileFrame& frame, double sigma, Rng& rng);

/// Surface normals the renderer shades with (central differences of h).
NormalMap heightmap_normals(const HeightMap& h);

enum class ShearMode { kTranslation, kRotation };

/// Gel-surface marker motion under a tangential load on the contact.
///
/// The contact is modelled as the disc with the mask's centroid and area.
/// Translation mode moves markers inside that disc by exactly `shear_mm`; the
/// field is the gradient of (shear . q) F(|q|), so it is curl-free. Rotation
/// mode turns the disc about its centre so that the rim moves `shear_mm.x`
/// millimetres (positive turns +x toward +y, clockwise on screen) and F tapers it,
/// giving a divergence-free field. F is 1 inside the disc and decays as a
/// Gaussian of gel.shear_falloff_mm outside it.
MarkerSet deform_markers(const MarkerSet& rest, const ContactMask& contact, Vec2 shear_mm,
                         ShearMode mode, const GelModel& gel);

/// Dense version of the same field evaluated at a pixel position.
Vec2 shear_displacement_px(Vec2 p, Vec2 center_px, double radius_px, Vec2 shear_mm,
                           ShearMode mode, const GelModel& gel);

/// Disc (centre px, radius px) equivalent to a mask: same centroid and area.
struct ContactDisc {
  Vec2 center;
  double radius = 0.0;
};
ContactDisc equivalent_disc(const ContactMask& mask);

}  // namespace gelgrip::sim
