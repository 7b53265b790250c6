#pragma once

#include <deque>
#include <optional>
#include <vector>

#include "gelgrip/core/types.hpp"

namespace gelgrip::slip {

/// Pixels whose height exceeds `threshold_mm` (strictly). Throws on threshold <= 0.
ContactMask segment_contact(const HeightMap& h, double threshold_mm);

/// Per-transition velocities (px/frame) from n frames: n - 1 entries, entry i
/// describing frame i -> i + 1. With `smooth`, each entry is the mean of the
/// raw transitions i - 1, i, i + 1 that exist; this equals a 3-frame moving
/// average of positions before differencing and is exact for constant motion.
std::vector<Vec2> smooth_velocities(const std::vector<Vec2>& raw);

/// Contact-centroid motion. Every mask must be non-empty.
std::vector<Vec2> object_velocity(const std::vector<ContactMask>& masks, bool smooth = true);

/// Mean motion of the markers that sit inside the frame's contact mask at the
/// start of each transition; zero when none does. Markers are matched by id.
std::vector<Vec2> marker_velocity(const std::vector<MarkerSet>& tracks,
                                  const std::vector<ContactMask>& masks, bool smooth = true);

/// Raw (unsmoothed) displacement of in-mask markers between two frames.
Vec2 marker_displacement(const MarkerSet& from, const MarkerSet& to, const ContactMask& mask);

inline constexpr double kDefaultSlipThresholdPx = 10.0;

/// True when |obj_v - marker_v| exceeds the threshold (strictly).
bool detect_slip(Vec2 obj_v, Vec2 marker_v, double threshold_px = kDefaultSlipThresholdPx);

struct SlipFrame {
  Vec2 object_v;
  Vec2 marker_v;
  double speed_difference = 0.0;
  bool slip = false;
};

/// Per-transition report for one sequence.
std::vector<SlipFrame> detect_sequence(const std::vector<ContactMask>& masks,
                                       const std::vector<MarkerSet>& tracks,
                                       double threshold_px = kDefaultSlipThresholdPx,
                                       bool smooth = true);

struct SlipSummary {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  /// Mean of (true onset time - first predicted slip time) over trials that
  /// contain at least one correctly flagged transition; nullopt if none does.
  std::optional<double> mean_lead_time_s;
  int true_positives = 0;
  int false_positives = 0;
  int false_negatives = 0;
};

/// Pools transitions of all trials. Precision (recall) is 1 when nothing is
/// predicted (nothing is true).
SlipSummary evaluate_slip_detector(const std::vector<std::vector<bool>>& predictions,
                                   const std::vector<std::vector<bool>>& truth, double fps);

/// Streaming form of detect_sequence for the control loop. Decisions lag one
/// frame because the smoothing window is centred: after frame k is pushed the
/// monitor reports transition k - 2 -> k - 1. Frames without contact reset it.
class SlipMonitor {
 public:
  explicit SlipMonitor(double threshold_px = kDefaultSlipThresholdPx, bool smooth = true);

  std::optional<SlipFrame> push(const ContactMask& mask, const MarkerSet& markers);
  void reset();

 private:
  struct Transition {
    Vec2 object;
    Vec2 marker;
  };
  double threshold_;
  bool smooth_;
  std::optional<Vec2> last_centroid_;
  std::optional<MarkerSet> last_markers_;
  std::optional<ContactMask> last_mask_;
  std::deque<Transition> window_;
};

}  // namespace gelgrip::slip
