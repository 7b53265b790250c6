#pragma once

#include <array>
#include <cstdint>
#include <variant>

#include <Eigen/Core>

#include "gelgrip/core/types.hpp"

namespace gelgrip::sim {

/// Elastomer pad, camera sampling and marker layout of one finger.
struct GelModel {
  double gel_size_mm = 30.0;      // square pad side
  int frame_px = 128;             // rectified frame side
  double membrane_sigma_mm = 0.25;
  // Decay length of marker displacement outside the contact. Kept separate
  // from the membrane smoothing so the marker lattice resolves it.
  double shear_falloff_mm = 3.0;
  int marker_rows = 16;
  int marker_cols = 16;
  std::array<double, 3> background = {0.25, 0.25, 0.25};

  double px_per_mm() const { return frame_px / gel_size_mm; }
  void validate() const;

  /// Undeformed marker lattice, inset by half a pitch from the pad border.
  MarkerSet rest_markers() const;
  /// Same pad imaged at a different frame resolution.
  GelModel with_frame_px(int px) const;
};

struct Light {
  Eigen::Vector3d direction;  // unit, pointing from the surface toward the light
  std::array<double, 3> rgb;
};

/// Three directional lights, one per colour channel by default.
struct LightRig {
  std::array<Light, 3> lights;

  /// Azimuths 120 degrees apart (starting at `azimuth0_deg`), common elevation.
  static LightRig standard(double elevation_deg = 60.0, double azimuth0_deg = 0.0,
                           double intensity = 0.5);
  /// Rig rotated in-plane by `angle_rad` about the surface normal.
  LightRig rotated(double angle_rad) const;
  void validate() const;
};

struct Sphere {
  double radius_mm = 5.0;
};

struct HexPyramid {
  double base_diameter_mm = 10.0;  // vertex-to-vertex
  double height_mm = 2.0;
};

/// Spherical fruit cap carrying a procedural bump texture. Negative amplitude
/// gives dimples instead of bumps.
struct FruitSurface {
  double radius_mm = 14.0;
  double bump_density_per_mm2 = 0.0;
  double bump_amplitude_mm = 0.0;
  double bump_radius_mm = 0.4;
  std::uint64_t texture_seed = 1;
};

using IndenterShape = std::variant<Sphere, HexPyramid, FruitSurface>;

/// Largest penetration depth the shape supports.
double max_depth(const IndenterShape& shape);

enum class GraspPose { kTop, kSide };

}  // namespace gelgrip::sim
