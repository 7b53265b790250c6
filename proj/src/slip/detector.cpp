#include "gelgrip/core/error.hpp"
#include "gelgrip/slip/slip.hpp"

namespace gelgrip::slip {

bool detect_slip(Vec2 obj_v, Vec2 marker_v, double threshold_px) {
  return (obj_v - marker_v).norm() > threshold_px;
}

std::vector<SlipFrame> detect_sequence(const std::vector<ContactMask>& masks,
                                       const std::vector<MarkerSet>& tracks, double threshold_px,
                                       bool smooth) {
  const auto ov = object_velocity(masks, smooth);
  const auto mv = marker_velocity(tracks, masks, smooth);
  std::vector<SlipFrame> out;
  out.reserve(ov.size());
  for (std::size_t i = 0; i < ov.size(); ++i) {
    out.push_back({ov[i], mv[i], (ov[i] - mv[i]).norm(), detect_slip(ov[i], mv[i], threshold_px)});
  }
  return out;
}

SlipMonitor::SlipMonitor(double threshold_px, bool smooth)
    : threshold_(threshold_px), smooth_(smooth) {}

void SlipMonitor::reset() {
  last_centroid_.reset();
  last_markers_.reset();
  last_mask_.reset();
  window_.clear();
}

std::optional<SlipFrame> SlipMonitor::push(const ContactMask& mask, const MarkerSet& markers) {
  const auto c = mask.centroid();
  if (!c) {
    reset();
    return std::nullopt;
  }
  std::optional<SlipFrame> out;
  if (last_centroid_) {
    window_.push_back({*c - *last_centroid_, marker_displacement(*last_markers_, markers, *last_mask_)});
    if (!smooth_) {
      const Transition& t = window_.back();
      out = SlipFrame{t.object, t.marker, (t.object - t.marker).norm(),
                      detect_slip(t.object, t.marker, threshold_)};
      window_.clear();
    } else {
      if (window_.size() > 3) window_.pop_front();
      // window_ holds transitions k-3.., centre is the second-to-last one
      if (window_.size() >= 2) {
        Vec2 o, m;
        for (const Transition& t : window_) {
          o += t.object;
          m += t.marker;
        }
        o = o / static_cast<double>(window_.size());
        m = m / static_cast<double>(window_.size());
        out = SlipFrame{o, m, (o - m).norm(), detect_slip(o, m, threshold_)};
      }
    }
  }
  last_centroid_ = *c;
  last_markers_ = markers;
  last_mask_ = mask;
  return out;
}

}  // namespace gelgrip::slip
