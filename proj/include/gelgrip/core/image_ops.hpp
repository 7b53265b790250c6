#pragma once

#include <array>

#include <Eigen/Core>

#include "gelgrip/core/types.hpp"

namespace gelgrip {

/// Corners of the sensing-surface quadrilateral in the raw image, ordered
/// top-left, top-right, bottom-right, bottom-left (pixel-centre coordinates).
using Quad = std::array<Vec2, 4>;

/// 3×3 projective map taking `from[i]` to `to[i]`. Throws "degenerate
/// homography" when three of either point set are collinear.
Eigen::Matrix3d homography_from_points(const Quad& from, const Quad& to);

Vec2 apply_homography(const Eigen::Matrix3d& h, const Vec2& p);

/// Bilinear sample with coordinates clamped to the image border.
double sample_bilinear(const Grid& channel, double x, double y);

/// Unwarps the quadrilateral `corners` of `raw` onto a full out_width×out_height
/// rectangle. The output corner pixels map exactly onto the given corners.
TactileFrame rectify_frame(const RgbImage& raw, const Quad& corners, int out_width,
                           int out_height, double px_per_mm, double timestamp = 0.0);

/// Pixelwise contact - background.
DiffFrame diff_image(const TactileFrame& contact, const TactileFrame& background);

}  // namespace gelgrip
