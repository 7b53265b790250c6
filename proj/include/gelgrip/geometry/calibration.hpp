#pragma once

#include <array>
#include <vector>

#include <Eigen/Core>

#include "gelgrip/core/types.hpp"

namespace gelgrip::geometry {

/// Network input for one pixel: RGB difference plus pixel position scaled to [-1, 1].
using PixelInput = std::array<double, 5>;

PixelInput pixel_input(const DiffFrame& diff, int y, int x);

/// One ball press used for calibration.
struct CalibrationPress {
  DiffFrame diff;
  Vec2 center_px;
  double contact_radius_px;
  double sphere_radius_mm = 5.0;
};

struct CalibrationSample {
  PixelInput input;
  Eigen::Vector3d normal;
};

struct CalibrationDataset {
  std::vector<CalibrationSample> samples;
  double sphere_radius_mm = 5.0;
};

/// Analytic normal of a ball of radius `radius_mm` at in-plane offset `q_mm`
/// from its centre; (0,0,1) outside the ball footprint.
Eigen::Vector3d sphere_normal(Vec2 q_mm, double radius_mm);

/// Every in-contact pixel gets its analytic ball normal. Out-of-contact pixels
/// on a `flat_stride` lattice are labelled flat (0,0,1).
CalibrationDataset build_calibration_dataset(const std::vector<CalibrationPress>& presses,
                                             int flat_stride = 8);

}  // namespace gelgrip::geometry
