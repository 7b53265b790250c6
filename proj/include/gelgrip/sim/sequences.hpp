#pragma once

#include <vector>

#include "gelgrip/core/random.hpp"
#include "gelgrip/core/types.hpp"
#include "gelgrip/sim/fruit.hpp"
#include "gelgrip/sim/gel.hpp"
#include "gelgrip/sim/tactile.hpp"

namespace gelgrip::sim {

/// One finger holding a fruit under an external load.
struct GraspScene {
  FruitModel fruit;
  double opening_mm = 26.3;
  GraspPose pose = GraspPose::kTop;
  double load_g = 0.0;
  double friction = 0.6;

  /// Opening must lie in [0, 40] mm and the fruit must be squeezed.
  void validate() const;
  /// Gel penetration of the fruit surface for this opening.
  double indent_depth_mm() const;
};

enum class SlipPhase { kStatic, kIncipient, kFullSlip, kArrested };

struct SlipDynamics {
  double static_fraction = 0.3;         // share of frames before loading (+-20%)
  double stretch_max_mm = 1.0;          // stretch at which the grip lets go (+-15%)
  double stretch_rate_mm_per_g = 1.5e-3;  // per frame and gram of load
  double slip_speed_base_mm = 3.6;      // sliding speed per frame at zero load
  double slip_speed_per_g_mm = 0.03;
  double kinetic_stretch_ratio = 0.6;   // residual stretch while sliding
  double travel_mm = 16.0;              // distance to the end stop
  double pixel_noise = 0.004;
  double marker_noise_px = 0.15;
  double start_offset_mm = 7.0;         // contact start, measured from the pad edge
  double slip_threshold_px = 10.0;      // used only for ground-truth labels
};

struct SlipSequence {
  TactileFrame background;
  std::vector<TactileFrame> frames{};
  std::vector<HeightMap> heights{};       // noiseless pressed geometry
  std::vector<MarkerSet> markers{};       // tracked positions (with noise)
  std::vector<Vec2> object_px{};          // true contact centre per frame
  std::vector<Vec2> stretch_px{};         // true gel stretch under the contact
  std::vector<SlipPhase> phase{};
  /// One entry per consecutive frame pair: true relative speed (px/frame).
  std::vector<double> relative_speed{};
  /// relative_speed > threshold while in contact.
  std::vector<bool> slip_truth{};
  int incipient_onset = -1;  // first incipient frame, -1 if never
  int slip_onset = -1;       // first full-slip frame, -1 if never
  double fps = 30.0;
};

/// Stable, then markers follow the object, then the object outruns the gel.
/// Phase durations follow the load: heavier loads stretch faster and slide
/// faster. A zero load never leaves the static phase.
SlipSequence synth_slip_sequence(const GraspScene& scene, int n_frames, const GelModel& gel,
                                 const LightRig& rig, const SlipDynamics& dyn, Rng& rng);

struct CompressionParams {
  double gel_stiffness_n_per_mm = 1.0;
  double closing_mm = 3.0;        // finger travel over the clip
  double current_per_n = 0.12;    // A per N
  double current_offset = 0.05;   // A
  double current_noise = 0.01;    // A
  double pixel_noise = 0.004;
  double max_offset_mm = 2.0;     // random contact placement around the pad centre
};

struct CompressionSim {
  TactileFrame background;
  std::vector<TactileFrame> frames;
  std::vector<double> current;  // motor current per frame
  std::vector<double> force;    // true normal force per frame
  FruitType type;
  double shore00;
};

/// Fingers close linearly on a fruit; springs in series set the force and the
/// imprint. Harder fruit gives steeper force and current, a smaller imprint
/// for the same force and sharper surface texture.
CompressionSim synth_compression_clip(const FruitModel& fruit, int n_frames, const GelModel& gel,
                                      const LightRig& rig, const CompressionParams& p, Rng& rng);

struct ForceSample {
  double current;
  double force;
};

struct ForceRampParams {
  double current_per_n = 0.12;
  double current_offset = 0.05;
  double current_noise = 0.04;  // about 0.33 N of force-equivalent scatter
  double low_n = 6.0;           // ramp start, jittered by +-0.5 N per trial
  double high_n = 12.0;         // ramp end, jittered by +-0.5 N per trial
};

/// Slow squeeze ramps, `trials` x `samples_per_trial` current/force readings.
std::vector<ForceSample> synth_normal_force_dataset(int trials, int samples_per_trial,
                                                    const ForceRampParams& p, Rng& rng);

struct ShearSample {
  MarkerSet before;
  MarkerSet after;
  ContactMask contact;  // pixel mask of the pressed geometry
  Vec2 shear_mm;
  double depth_mm;
  Vec2 force_n;
};

struct ShearParams {
  double min_shear_mm = 0.2;
  double max_shear_mm = 1.0;
  double rotation_nuisance_mm = 0.15;  // max rim travel of a superimposed twist
  double marker_noise_px = 0.15;
  double newton_per_mm = 2.0;
  double depth_gain = 0.15;            // relative stiffening per mm of depth
  double label_noise = 0.02;           // relative
  double contact_threshold_mm = 0.3;
};

/// Sphere presses with a random tangential load; labels are proportional to
/// the applied shear with mild depth dependence.
std::vector<ShearSample> synth_shear_dataset(int n, const GelModel& gel, const ShearParams& p,
                                             Rng& rng);

}  // namespace gelgrip::sim
