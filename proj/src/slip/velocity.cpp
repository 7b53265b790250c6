#include <algorithm>
#include <cmath>

#include "gelgrip/core/error.hpp"
#include "gelgrip/slip/slip.hpp"

namespace gelgrip::slip {

std::vector<Vec2> smooth_velocities(const std::vector<Vec2>& raw) {
  const int n = static_cast<int>(raw.size());
  std::vector<Vec2> out(raw.size());
  for (int i = 0; i < n; ++i) {
    Vec2 acc;
    int k = 0;
    for (int j = std::max(0, i - 1); j <= std::min(n - 1, i + 1); ++j, ++k) acc += raw[static_cast<std::size_t>(j)];
    out[static_cast<std::size_t>(i)] = acc / k;
  }
  return out;
}

std::vector<Vec2> object_velocity(const std::vector<ContactMask>& masks, bool smooth) {
  if (masks.size() < 2) throw Error("object velocity needs at least 2 frames");
  std::vector<Vec2> c;
  c.reserve(masks.size());
  for (const ContactMask& m : masks) {
    const auto p = m.centroid();
    if (!p) throw Error("object velocity needs a non-empty contact mask in every frame");
    c.push_back(*p);
  }
  std::vector<Vec2> v;
  v.reserve(c.size() - 1);
  for (std::size_t i = 0; i + 1 < c.size(); ++i) v.push_back(c[i + 1] - c[i]);
  return smooth ? smooth_velocities(v) : v;
}

Vec2 marker_displacement(const MarkerSet& from, const MarkerSet& to, const ContactMask& mask) {
  Vec2 acc;
  int n = 0;
  for (const Marker& a : from.markers()) {
    const int x = static_cast<int>(std::lround(a.x));
    const int y = static_cast<int>(std::lround(a.y));
    if (x < 0 || y < 0 || x >= mask.width() || y >= mask.height() || !mask.at(y, x)) continue;
    const Marker* b = to.find(a.id);
    if (b == nullptr) continue;
    acc += Vec2{b->x - a.x, b->y - a.y};
    ++n;
  }
  return n == 0 ? Vec2{} : acc / n;
}

std::vector<Vec2> marker_velocity(const std::vector<MarkerSet>& tracks,
                                  const std::vector<ContactMask>& masks, bool smooth) {
  if (tracks.size() != masks.size()) throw Error("marker tracks and masks differ in length");
  if (tracks.size() < 2) throw Error("marker velocity needs at least 2 frames");
  std::vector<Vec2> v;
  v.reserve(tracks.size() - 1);
  for (std::size_t i = 0; i + 1 < tracks.size(); ++i) {
    v.push_back(marker_displacement(tracks[i], tracks[i + 1], masks[i]));
  }
  return smooth ? smooth_velocities(v) : v;
}

}  // namespace gelgrip::slip
