#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Core>

namespace gelgrip {

using Grid = Eigen::MatrixXd;                         // rows = y, cols = x
using BoolGrid = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2 operator/(double s) const { return {x / s, y / s}; }
  Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
  Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double norm() const { return std::hypot(x, y); }
  bool operator==(const Vec2&) const = default;
};

/// Planar H×W×3 raster of doubles. Mutable scratch type used to build frames.
class RgbImage {
 public:
  RgbImage() = default;
  RgbImage(int width, int height, std::array<double, 3> fill = {0.0, 0.0, 0.0});

  int width() const { return width_; }
  int height() const { return height_; }

  double& at(int y, int x, int c) { return channels_[c](y, x); }
  double at(int y, int x, int c) const { return channels_[c](y, x); }

  Grid& channel(int c) { return channels_[c]; }
  const Grid& channel(int c) const { return channels_[c]; }

  bool same_shape(const RgbImage& o) const {
    return width_ == o.width_ && height_ == o.height_;
  }

 private:
  int width_ = 0;
  int height_ = 0;
  std::array<Grid, 3> channels_;
};

/// Rectified per-finger camera image, intensities in [0,1].
class TactileFrame {
 public:
  TactileFrame(RgbImage pixels, double px_per_mm, double timestamp = 0.0);

  int width() const { return pixels_.width(); }
  int height() const { return pixels_.height(); }
  double px_per_mm() const { return px_per_mm_; }
  double timestamp() const { return timestamp_; }
  const RgbImage& pixels() const { return pixels_; }
  double at(int y, int x, int c) const { return pixels_.at(y, x, c); }

 private:
  RgbImage pixels_;
  double px_per_mm_;
  double timestamp_;
};

/// Contact frame minus background frame, values in [-1,1].
class DiffFrame {
 public:
  DiffFrame(RgbImage values, double px_per_mm);

  int width() const { return values_.width(); }
  int height() const { return values_.height(); }
  double px_per_mm() const { return px_per_mm_; }
  const RgbImage& values() const { return values_; }
  double at(int y, int x, int c) const { return values_.at(y, x, c); }

 private:
  RgbImage values_;
  double px_per_mm_;
};

/// Per-pixel unit surface normals with nz > 0.
class NormalMap {
 public:
  NormalMap(Grid nx, Grid ny, Grid nz);

  int width() const { return static_cast<int>(nx_.cols()); }
  int height() const { return static_cast<int>(nx_.rows()); }
  const Grid& nx() const { return nx_; }
  const Grid& ny() const { return ny_; }
  const Grid& nz() const { return nz_; }
  Eigen::Vector3d at(int y, int x) const { return {nx_(y, x), ny_(y, x), nz_(y, x)}; }

  /// All-flat map (0, 0, 1).
  static NormalMap flat(int width, int height);

 private:
  Grid nx_, ny_, nz_;
};

/// Contact geometry in millimetres on the frame's pixel grid.
class HeightMap {
 public:
  HeightMap(Grid mm, double px_per_mm);

  int width() const { return static_cast<int>(mm_.cols()); }
  int height() const { return static_cast<int>(mm_.rows()); }
  double px_per_mm() const { return px_per_mm_; }
  const Grid& values() const { return mm_; }
  double at(int y, int x) const { return mm_(y, x); }
  double max() const { return mm_.maxCoeff(); }
  double min() const { return mm_.minCoeff(); }

  /// Copy shifted so that its minimum is exactly zero.
  HeightMap gauge_fixed() const;

  static HeightMap zeros(int width, int height, double px_per_mm);

 private:
  Grid mm_;
  double px_per_mm_;
};

struct Marker {
  int id = 0;
  double x = 0.0;  // pixels
  double y = 0.0;
};

/// Tracked gel-surface markers of one frame. Ids are unique.
class MarkerSet {
 public:
  MarkerSet() = default;
  MarkerSet(std::vector<Marker> markers, int grid_rows = 0, int grid_cols = 0);

  const std::vector<Marker>& markers() const { return markers_; }
  std::size_t size() const { return markers_.size(); }
  bool empty() const { return markers_.empty(); }
  int grid_rows() const { return grid_rows_; }
  int grid_cols() const { return grid_cols_; }

  const Marker* find(int id) const;
  bool inside(int width, int height) const;

 private:
  std::vector<Marker> markers_;
  int grid_rows_ = 0;
  int grid_cols_ = 0;
};

/// Regular node lattice laid over a frame. Node (r, c) sits at pixel
/// (c * spacing_x, r * spacing_y); corner nodes coincide with corner pixels.
struct GridGeometry {
  int rows = 0;
  int cols = 0;
  double spacing_x = 1.0;  // px between nodes
  double spacing_y = 1.0;

  static GridGeometry covering(int frame_width, int frame_height, int rows, int cols);
  Vec2 node(int r, int c) const { return {c * spacing_x, r * spacing_y}; }
};

/// Scalar potential sampled on a GridGeometry.
struct ScalarField {
  GridGeometry grid;
  Grid values;
};

/// Dense 2-D vector field (pixels) sampled on a GridGeometry.
struct DisplacementField {
  GridGeometry grid;
  Grid u;  // x component
  Grid v;  // y component

  static DisplacementField zeros(const GridGeometry& g);
  double rms() const;
  DisplacementField operator+(const DisplacementField& o) const;
  DisplacementField operator-(const DisplacementField& o) const;
  DisplacementField operator*(double s) const;
};

/// Boolean contact region on a pixel or node grid.
class ContactMask {
 public:
  ContactMask(BoolGrid mask, double threshold_mm);

  int width() const { return static_cast<int>(mask_.cols()); }
  int height() const { return static_cast<int>(mask_.rows()); }
  double threshold_mm() const { return threshold_mm_; }
  bool at(int y, int x) const { return mask_(y, x); }
  const BoolGrid& values() const { return mask_; }
  std::size_t count() const { return static_cast<std::size_t>(mask_.count()); }
  bool empty() const { return count() == 0; }

  /// Mean pixel position of the region; nullopt when empty.
  std::optional<Vec2> centroid() const;
  /// Nearest-pixel lookup of the mask at every node of `g`, where the node
  /// lattice spans this mask's pixel extent.
  ContactMask sampled_on(const GridGeometry& g) const;

 private:
  BoolGrid mask_;
  double threshold_mm_;
};

}  // namespace gelgrip
