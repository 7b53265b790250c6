#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "gelgrip/core/error.hpp"
#include "gelgrip/core/random.hpp"
#include "gelgrip/sim/tactile.hpp"

namespace gelgrip::sim {

namespace {

double sphere_penetration(double radius, double depth, double rho2) {
  if (rho2 >= radius * radius) return 0.0;
  return depth - (radius - std::sqrt(radius * radius - rho2));
}

// Hexagonal gauge: equals the circumradius on the hexagon outline.
double hex_gauge(double qx, double qy) {
  static const double kCos30 = std::cos(std::numbers::pi / 6.0);
  double best = -1e300;
  for (int k = 0; k < 6; ++k) {
    const double a = std::numbers::pi / 6.0 + k * std::numbers::pi / 3.0;
    best = std::max(best, qx * std::cos(a) + qy * std::sin(a));
  }
  return best / kCos30;
}

struct Bump {
  double x, y;
};

std::vector<Bump> texture_bumps(const FruitSurface& f) {
  const double region = 0.6 * f.radius_mm;
  const int n = static_cast<int>(
      std::lround(f.bump_density_per_mm2 * std::numbers::pi * region * region));
  Rng rng(f.texture_seed);
  std::vector<Bump> bumps;
  bumps.reserve(static_cast<std::size_t>(std::max(n, 0)));
  while (static_cast<int>(bumps.size()) < n) {
    const double x = uniform(rng, -region, region);
    const double y = uniform(rng, -region, region);
    if (x * x + y * y <= region * region) bumps.push_back({x, y});
  }
  return bumps;
}

std::vector<double> gaussian_kernel(double sigma_px) {
  const int r = static_cast<int>(std::ceil(4.0 * sigma_px));
  std::vector<double> k(static_cast<std::size_t>(2 * r + 1));
  double sum = 0.0;
  for (int i = -r; i <= r; ++i) {
    k[static_cast<std::size_t>(i + r)] = std::exp(-0.5 * i * i / (sigma_px * sigma_px));
    sum += k[static_cast<std::size_t>(i + r)];
  }
  for (double& v : k) v /= sum;
  return k;
}

}  // namespace

HeightMap indent_heightmap(const IndenterShape& shape, Vec2 center_mm, double depth_mm,
                           const GelModel& gel) {
  gel.validate();
  if (depth_mm < 0.0) throw Error("indentation depth must be non-negative");
  if (depth_mm > max_depth(shape)) throw Error("indentation depth exceeds indenter height");
  if (center_mm.x < 0.0 || center_mm.y < 0.0 || center_mm.x > gel.gel_size_mm ||
      center_mm.y > gel.gel_size_mm) {
    throw Error("indenter centre lies outside the gel");
  }
  const int n = gel.frame_px;
  const double s = gel.px_per_mm();
  Grid h = Grid::Zero(n, n);
  if (depth_mm == 0.0) return HeightMap(std::move(h), s);

  if (const auto* sp = std::get_if<Sphere>(&shape)) {
    for (int y = 0; y < n; ++y) {
      for (int x = 0; x < n; ++x) {
        const double qx = x / s - center_mm.x, qy = y / s - center_mm.y;
        h(y, x) = std::max(0.0, sphere_penetration(sp->radius_mm, depth_mm, qx * qx + qy * qy));
      }
    }
  } else if (const auto* hp = std::get_if<HexPyramid>(&shape)) {
    const double rc = 0.5 * hp->base_diameter_mm;
    for (int y = 0; y < n; ++y) {
      for (int x = 0; x < n; ++x) {
        const double g = hex_gauge(x / s - center_mm.x, y / s - center_mm.y);
        h(y, x) = std::max(0.0, depth_mm - hp->height_mm * g / rc);
      }
    }
  } else {
    const auto& f = std::get<FruitSurface>(shape);
    const auto bumps = texture_bumps(f);
    const double br2 = f.bump_radius_mm * f.bump_radius_mm;
    const double reach = 3.0 * f.bump_radius_mm;
    Grid texture = Grid::Zero(n, n);
    for (const Bump& b : bumps) {
      const double bx = center_mm.x + b.x, by = center_mm.y + b.y;
      const int x0 = std::max(0, static_cast<int>(std::floor((bx - reach) * s)));
      const int x1 = std::min(n - 1, static_cast<int>(std::ceil((bx + reach) * s)));
      const int y0 = std::max(0, static_cast<int>(std::floor((by - reach) * s)));
      const int y1 = std::min(n - 1, static_cast<int>(std::ceil((by + reach) * s)));
      for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
          const double dx = x / s - bx, dy = y / s - by;
          texture(y, x) += f.bump_amplitude_mm * std::exp(-0.5 * (dx * dx + dy * dy) / br2);
        }
      }
    }
    for (int y = 0; y < n; ++y) {
      for (int x = 0; x < n; ++x) {
        const double qx = x / s - center_mm.x, qy = y / s - center_mm.y;
        const double rho2 = qx * qx + qy * qy;
        if (rho2 >= f.radius_mm * f.radius_mm) continue;
        const double cap = sphere_penetration(f.radius_mm, depth_mm, rho2);
        h(y, x) = std::clamp(cap + texture(y, x), 0.0, depth_mm + std::abs(f.bump_amplitude_mm));
      }
    }
  }
  return HeightMap(std::move(h), s);
}

HeightMap press(const HeightMap& raw, const GelModel& gel) {
  const double sigma_px = gel.membrane_sigma_mm * raw.px_per_mm();
  if (sigma_px < 1e-3) return raw;
  const auto k = gaussian_kernel(sigma_px);
  const int r = static_cast<int>(k.size() / 2);
  const Grid& in = raw.values();
  const int rows = static_cast<int>(in.rows()), cols = static_cast<int>(in.cols());

  Grid tmp = Grid::Zero(rows, cols);
  for (int y = 0; y < rows; ++y) {
    for (int x = 0; x < cols; ++x) {
      double acc = 0.0;
      for (int i = std::max(-r, -x); i <= std::min(r, cols - 1 - x); ++i) {
        acc += k[static_cast<std::size_t>(i + r)] * in(y, x + i);
      }
      tmp(y, x) = acc;
    }
  }
  Grid out = Grid::Zero(rows, cols);
  for (int x = 0; x < cols; ++x) {
    for (int y = 0; y < rows; ++y) {
      double acc = 0.0;
      for (int i = std::max(-r, -y); i <= std::min(r, rows - 1 - y); ++i) {
        acc += k[static_cast<std::size_t>(i + r)] * tmp(y + i, x);
      }
      out(y, x) = acc;
    }
  }
  return HeightMap(std::move(out), raw.px_per_mm());
}

}  // namespace gelgrip::sim
