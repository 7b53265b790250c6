#pragma once

#include <array>
#include <iosfwd>
#include <vector>

#include "gelgrip/core/types.hpp"
#include "gelgrip/force/hhd.hpp"

namespace gelgrip::force {

/// [vx, vy, px, px^2, py, py^2, sx, sx^2, sy, sy^2] where each letter is the
/// mean of that component over the contact nodes.
using ShearFeature = std::array<double, 10>;

/// `mask` must be sampled on the field's grid. Throws on an empty mask.
ShearFeature shear_features(const DisplacementField& v, const HHDResult& hhd,
                            const ContactMask& mask);

struct ShearModel {
  std::array<double, 10> wx{};
  std::array<double, 10> wy{};
  double bx = 0.0;
  double by = 0.0;
};

/// Per-axis ordinary least squares with an intercept. Needs at least 11
/// samples; throws "rank deficient" for a singular design.
ShearModel fit_shear_model(const std::vector<ShearFeature>& features,
                           const std::vector<Vec2>& labels_n);

Vec2 predict_shear(const ShearFeature& x, const ShearModel& m);

void save_shear_model(std::ostream& os, const ShearModel& m);
ShearModel load_shear_model(std::istream& is);

}  // namespace gelgrip::force
