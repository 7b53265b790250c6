#include "gelgrip/force/interpolate.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <vector>

#include "gelgrip/core/error.hpp"

namespace gelgrip::force {

namespace {

struct Sample {
  Vec2 pos;
  Vec2 disp;
};

}  // namespace

DisplacementField interpolate_markers(const MarkerSet& before, const MarkerSet& after,
                                      const GridGeometry& grid) {
  if (grid.rows < 1 || grid.cols < 1) throw Error("interpolation grid is empty");
  std::vector<Sample> pts;
  pts.reserve(before.size());
  for (const Marker& b : before.markers()) {
    if (const Marker* a = after.find(b.id)) pts.push_back({{b.x, b.y}, {a->x - b.x, a->y - b.y}});
  }
  if (pts.size() < 3) throw Error("need at least 3 matched markers to interpolate");

  constexpr int kNeighbours = 4;
  const int k = std::min<int>(kNeighbours, static_cast<int>(pts.size()));
  DisplacementField f = DisplacementField::zeros(grid);
  std::array<std::pair<double, int>, kNeighbours> best{};
  for (int r = 0; r < grid.rows; ++r) {
    for (int c = 0; c < grid.cols; ++c) {
      const Vec2 node = grid.node(r, c);
      best.fill({std::numeric_limits<double>::infinity(), -1});
      for (int i = 0; i < static_cast<int>(pts.size()); ++i) {
        const Vec2 d = pts[static_cast<std::size_t>(i)].pos - node;
        const double d2 = d.dot(d);
        if (d2 < best[static_cast<std::size_t>(k - 1)].first) {
          int j = k - 1;
          while (j > 0 && best[static_cast<std::size_t>(j - 1)].first > d2) {
            best[static_cast<std::size_t>(j)] = best[static_cast<std::size_t>(j - 1)];
            --j;
          }
          best[static_cast<std::size_t>(j)] = {d2, i};
        }
      }
      Vec2 acc;
      double wsum = 0.0;
      bool exact = false;
      for (int j = 0; j < k && !exact; ++j) {
        const auto [d2, i] = best[static_cast<std::size_t>(j)];
        const Vec2& disp = pts[static_cast<std::size_t>(i)].disp;
        if (d2 < 1e-24) {
          acc = disp;
          wsum = 1.0;
          exact = true;
        } else {
          const double w = 1.0 / d2;  // power 2 on distance
          acc += disp * w;
          wsum += w;
        }
      }
      f.u(r, c) = acc.x / wsum;
      f.v(r, c) = acc.y / wsum;
    }
  }
  return f;
}

}  // namespace gelgrip::force
