#include <algorithm>
#include <cmath>

#include <Eigen/LU>

#include "gelgrip/core/error.hpp"
#include "gelgrip/core/image_ops.hpp"

namespace gelgrip {

namespace {

double cross(const Vec2& o, const Vec2& a, const Vec2& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

bool has_collinear_triple(const Quad& q) {
  double scale = 0.0;
  for (const Vec2& p : q) scale = std::max({scale, std::abs(p.x), std::abs(p.y)});
  const double eps = 1e-9 * std::max(1.0, scale * scale);
  for (int i = 0; i < 4; ++i) {
    if (std::abs(cross(q[i], q[(i + 1) % 4], q[(i + 2) % 4])) <= eps) return true;
  }
  return false;
}

bool is_convex(const Quad& q) {
  int sign = 0;
  for (int i = 0; i < 4; ++i) {
    const double c = cross(q[i], q[(i + 1) % 4], q[(i + 2) % 4]);
    const int s = c > 0 ? 1 : -1;
    if (sign == 0) sign = s;
    if (s != sign) return false;
  }
  return true;
}

// Coordinates within this distance of a pixel centre snap onto it so that
// identity and integer-scaling maps reproduce pixels exactly.
constexpr double kSnap = 1e-9;

double snap(double v) {
  const double r = std::round(v);
  return std::abs(v - r) < kSnap ? r : v;
}

}  // namespace

Eigen::Matrix3d homography_from_points(const Quad& from, const Quad& to) {
  if (has_collinear_triple(from) || has_collinear_triple(to)) {
    throw Error("degenerate homography");
  }
  Eigen::Matrix<double, 8, 8> a;
  Eigen::Matrix<double, 8, 1> b;
  for (int i = 0; i < 4; ++i) {
    const double x = from[i].x, y = from[i].y, u = to[i].x, v = to[i].y;
    a.row(2 * i) << x, y, 1, 0, 0, 0, -u * x, -u * y;
    a.row(2 * i + 1) << 0, 0, 0, x, y, 1, -v * x, -v * y;
    b(2 * i) = u;
    b(2 * i + 1) = v;
  }
  Eigen::FullPivLU<Eigen::Matrix<double, 8, 8>> lu(a);
  if (lu.rank() < 8) throw Error("degenerate homography");
  const Eigen::Matrix<double, 8, 1> h = lu.solve(b);
  Eigen::Matrix3d m;
  m << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), 1.0;
  return m;
}

Vec2 apply_homography(const Eigen::Matrix3d& h, const Vec2& p) {
  const Eigen::Vector3d q = h * Eigen::Vector3d(p.x, p.y, 1.0);
  return {q(0) / q(2), q(1) / q(2)};
}

double sample_bilinear(const Grid& channel, double x, double y) {
  const int w = static_cast<int>(channel.cols());
  const int h = static_cast<int>(channel.rows());
  x = std::clamp(snap(x), 0.0, double(w - 1));
  y = std::clamp(snap(y), 0.0, double(h - 1));
  const int x0 = std::min(static_cast<int>(std::floor(x)), w - 1);
  const int y0 = std::min(static_cast<int>(std::floor(y)), h - 1);
  const double fx = x - x0;
  const double fy = y - y0;
  if (fx == 0.0 && fy == 0.0) return channel(y0, x0);
  const int x1 = std::min(x0 + 1, w - 1);
  const int y1 = std::min(y0 + 1, h - 1);
  const double top = (1.0 - fx) * channel(y0, x0) + fx * channel(y0, x1);
  const double bottom = (1.0 - fx) * channel(y1, x0) + fx * channel(y1, x1);
  return (1.0 - fy) * top + fy * bottom;
}

TactileFrame rectify_frame(const RgbImage& raw, const Quad& corners, int out_width,
                           int out_height, double px_per_mm, double timestamp) {
  for (const Vec2& p : corners) {
    if (p.x < 0.0 || p.y < 0.0 || p.x > raw.width() - 1 || p.y > raw.height() - 1) {
      throw Error("rectification corners lie outside the raw image");
    }
  }
  if (has_collinear_triple(corners)) throw Error("degenerate homography");
  if (!is_convex(corners)) throw Error("rectification corners must form a convex quadrilateral");

  const Quad target = {Vec2{0.0, 0.0}, Vec2{double(out_width - 1), 0.0},
                       Vec2{double(out_width - 1), double(out_height - 1)},
                       Vec2{0.0, double(out_height - 1)}};
  const Eigen::Matrix3d h = homography_from_points(target, corners);

  RgbImage out(out_width, out_height);
  for (int y = 0; y < out_height; ++y) {
    for (int x = 0; x < out_width; ++x) {
      const Vec2 src = apply_homography(h, Vec2{double(x), double(y)});
      for (int c = 0; c < 3; ++c) {
        out.at(y, x, c) = std::clamp(sample_bilinear(raw.channel(c), src.x, src.y), 0.0, 1.0);
      }
    }
  }
  return TactileFrame(std::move(out), px_per_mm, timestamp);
}

DiffFrame diff_image(const TactileFrame& contact, const TactileFrame& background) {
  if (!contact.pixels().same_shape(background.pixels())) {
    throw Error("contact and background frames differ in shape");
  }
  RgbImage d(contact.width(), contact.height());
  for (int c = 0; c < 3; ++c) {
    d.channel(c) = contact.pixels().channel(c) - background.pixels().channel(c);
  }
  return DiffFrame(std::move(d), contact.px_per_mm());
}

}  // namespace gelgrip
