#include "gelgrip/core/types.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_set>

#include "gelgrip/core/error.hpp"

namespace gelgrip {

namespace {

constexpr int kMinFrameSide = 8;

void check_frame_shape(int width, int height) {
  if (width < kMinFrameSide || height < kMinFrameSide) {
    throw Error("frame must be at least 8x8, got " + std::to_string(width) + "x" +
                std::to_string(height));
  }
}

void check_scale(double px_per_mm) {
  if (!(px_per_mm > 0.0) || !std::isfinite(px_per_mm)) {
    throw Error("px_per_mm must be positive");
  }
}

}  // namespace

RgbImage::RgbImage(int width, int height, std::array<double, 3> fill)
    : width_(width), height_(height) {
  if (width < 0 || height < 0) throw Error("negative image size");
  for (int c = 0; c < 3; ++c) channels_[c] = Grid::Constant(height, width, fill[c]);
}

TactileFrame::TactileFrame(RgbImage pixels, double px_per_mm, double timestamp)
    : pixels_(std::move(pixels)), px_per_mm_(px_per_mm), timestamp_(timestamp) {
  check_frame_shape(pixels_.width(), pixels_.height());
  check_scale(px_per_mm_);
  for (int c = 0; c < 3; ++c) {
    const Grid& ch = pixels_.channel(c);
    if (!ch.allFinite() || ch.minCoeff() < 0.0 || ch.maxCoeff() > 1.0) {
      throw Error("tactile frame intensities must lie in [0,1]");
    }
  }
}

DiffFrame::DiffFrame(RgbImage values, double px_per_mm)
    : values_(std::move(values)), px_per_mm_(px_per_mm) {
  check_frame_shape(values_.width(), values_.height());
  check_scale(px_per_mm_);
  for (int c = 0; c < 3; ++c) {
    const Grid& ch = values_.channel(c);
    if (!ch.allFinite() || ch.minCoeff() < -1.0 || ch.maxCoeff() > 1.0) {
      throw Error("difference values must lie in [-1,1]");
    }
  }
}

NormalMap::NormalMap(Grid nx, Grid ny, Grid nz)
    : nx_(std::move(nx)), ny_(std::move(ny)), nz_(std::move(nz)) {
  if (nx_.rows() != ny_.rows() || nx_.rows() != nz_.rows() || nx_.cols() != ny_.cols() ||
      nx_.cols() != nz_.cols()) {
    throw Error("normal map components differ in shape");
  }
  for (Eigen::Index y = 0; y < nx_.rows(); ++y) {
    for (Eigen::Index x = 0; x < nx_.cols(); ++x) {
      const double n2 = nx_(y, x) * nx_(y, x) + ny_(y, x) * ny_(y, x) + nz_(y, x) * nz_(y, x);
      if (!(nz_(y, x) > 0.0) || std::abs(std::sqrt(n2) - 1.0) > 1e-6) {
        throw Error("normal map entries must be unit vectors with nz > 0");
      }
    }
  }
}

NormalMap NormalMap::flat(int width, int height) {
  return NormalMap(Grid::Zero(height, width), Grid::Zero(height, width),
                   Grid::Ones(height, width));
}

HeightMap::HeightMap(Grid mm, double px_per_mm) : mm_(std::move(mm)), px_per_mm_(px_per_mm) {
  check_scale(px_per_mm_);
  if (mm_.size() == 0) throw Error("empty heightmap");
  if (!mm_.allFinite()) throw Error("heightmap contains non-finite values");
}

HeightMap HeightMap::gauge_fixed() const {
  return HeightMap(mm_.array() - mm_.minCoeff(), px_per_mm_);
}

HeightMap HeightMap::zeros(int width, int height, double px_per_mm) {
  return HeightMap(Grid::Zero(height, width), px_per_mm);
}

MarkerSet::MarkerSet(std::vector<Marker> markers, int grid_rows, int grid_cols)
    : markers_(std::move(markers)), grid_rows_(grid_rows), grid_cols_(grid_cols) {
  std::unordered_set<int> seen;
  for (const Marker& m : markers_) {
    if (!seen.insert(m.id).second) throw Error("duplicate marker id " + std::to_string(m.id));
    if (!std::isfinite(m.x) || !std::isfinite(m.y)) throw Error("non-finite marker position");
  }
}

const Marker* MarkerSet::find(int id) const {
  auto it = std::find_if(markers_.begin(), markers_.end(),
                         [id](const Marker& m) { return m.id == id; });
  return it == markers_.end() ? nullptr : &*it;
}

bool MarkerSet::inside(int width, int height) const {
  return std::all_of(markers_.begin(), markers_.end(), [&](const Marker& m) {
    return m.x >= 0.0 && m.y >= 0.0 && m.x <= width - 1 && m.y <= height - 1;
  });
}

GridGeometry GridGeometry::covering(int frame_width, int frame_height, int rows, int cols) {
  if (rows < 2 || cols < 2) throw Error("grid needs at least 2x2 nodes");
  return {rows, cols, double(frame_width - 1) / (cols - 1), double(frame_height - 1) / (rows - 1)};
}

DisplacementField DisplacementField::zeros(const GridGeometry& g) {
  return {g, Grid::Zero(g.rows, g.cols), Grid::Zero(g.rows, g.cols)};
}

double DisplacementField::rms() const {
  if (u.size() == 0) return 0.0;
  return std::sqrt((u.squaredNorm() + v.squaredNorm()) / static_cast<double>(u.size()));
}

DisplacementField DisplacementField::operator+(const DisplacementField& o) const {
  return {grid, u + o.u, v + o.v};
}

DisplacementField DisplacementField::operator-(const DisplacementField& o) const {
  return {grid, u - o.u, v - o.v};
}

DisplacementField DisplacementField::operator*(double s) const { return {grid, u * s, v * s}; }

ContactMask::ContactMask(BoolGrid mask, double threshold_mm)
    : mask_(std::move(mask)), threshold_mm_(threshold_mm) {}

std::optional<Vec2> ContactMask::centroid() const {
  double sx = 0.0, sy = 0.0;
  std::size_t n = 0;
  for (Eigen::Index y = 0; y < mask_.rows(); ++y) {
    for (Eigen::Index x = 0; x < mask_.cols(); ++x) {
      if (mask_(y, x)) {
        sx += static_cast<double>(x);
        sy += static_cast<double>(y);
        ++n;
      }
    }
  }
  if (n == 0) return std::nullopt;
  return Vec2{sx / n, sy / n};
}

ContactMask ContactMask::sampled_on(const GridGeometry& g) const {
  BoolGrid out(g.rows, g.cols);
  for (int r = 0; r < g.rows; ++r) {
    for (int c = 0; c < g.cols; ++c) {
      const Vec2 p = g.node(r, c);
      const int x = std::clamp(static_cast<int>(std::lround(p.x)), 0, width() - 1);
      const int y = std::clamp(static_cast<int>(std::lround(p.y)), 0, height() - 1);
      out(r, c) = mask_(y, x);
    }
  }
  return ContactMask(std::move(out), threshold_mm_);
}

}  // namespace gelgrip
