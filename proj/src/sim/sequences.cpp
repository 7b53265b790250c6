#include "gelgrip/sim/sequences.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gelgrip/core/error.hpp"

namespace gelgrip::sim {

void GraspScene::validate() const {
  fruit.validate();
  if (opening_mm < 0.0 || opening_mm > 40.0) throw Error("gripper opening must lie in [0, 40] mm");
  if (load_g < 0.0) throw Error("external load must be non-negative");
  if (!(friction > 0.0)) throw Error("friction must be positive");
  if (opening_mm >= fruit.diameter_mm) throw Error("gripper opening does not touch the fruit");
}

double GraspScene::indent_depth_mm() const {
  return std::clamp(0.5 * (fruit.diameter_mm - opening_mm), 0.0, 1.5);
}

namespace {

MarkerSet jitter(const MarkerSet& m, double sigma, Rng& rng) {
  if (sigma <= 0.0) return m;
  std::vector<Marker> out = m.markers();
  for (Marker& k : out) {
    k.x += normal(rng, 0.0, sigma);
    k.y += normal(rng, 0.0, sigma);
  }
  return MarkerSet(std::move(out), m.grid_rows(), m.grid_cols());
}

MarkerSet displaced(const MarkerSet& rest, Vec2 center_px, double radius_px, Vec2 shear_mm,
                    ShearMode mode, const GelModel& gel) {
  std::vector<Marker> out = rest.markers();
  for (Marker& k : out) {
    const Vec2 d = shear_displacement_px({k.x, k.y}, center_px, radius_px, shear_mm, mode, gel);
    k.x += d.x;
    k.y += d.y;
  }
  return MarkerSet(std::move(out), rest.grid_rows(), rest.grid_cols());
}

double cap_radius(double radius, double depth) {
  return depth <= 0.0 ? 0.0 : std::sqrt(std::max(0.0, 2.0 * radius * depth - depth * depth));
}

}  // namespace

SlipSequence synth_slip_sequence(const GraspScene& scene, int n_frames, const GelModel& gel,
                                 const LightRig& rig, const SlipDynamics& dyn, Rng& rng) {
  scene.validate();
  gel.validate();
  if (n_frames < 10) throw Error("slip sequence needs at least 10 frames");

  const double s = gel.px_per_mm();
  const double depth = scene.indent_depth_mm();
  const double radius = scene.fruit.radius_mm();
  const Vec2 dir = scene.pose == GraspPose::kTop ? Vec2{0.0, 1.0} : Vec2{1.0, 0.0};
  const double mid = 0.5 * gel.gel_size_mm;
  const Vec2 start = scene.pose == GraspPose::kTop ? Vec2{mid, dyn.start_offset_mm}
                                                   : Vec2{dyn.start_offset_mm, mid};
  const std::uint64_t texture_seed = static_cast<std::uint64_t>(uniform_int(rng, 1, 1 << 30));
  const FruitSurface surface = fruit_surface(scene.fruit.type, radius, texture_seed);
  const double contact_px = cap_radius(radius, depth) * s;

  // trial-to-trial spread of grip quality
  const double rate = dyn.stretch_rate_mm_per_g * scene.load_g * (0.6 / scene.friction) *
                      uniform(rng, 0.85, 1.15);
  const double stretch_max = dyn.stretch_max_mm * uniform(rng, 0.85, 1.15);
  const double speed = dyn.slip_speed_base_mm + dyn.slip_speed_per_g_mm * scene.load_g;
  const int t0 = static_cast<int>(std::lround(dyn.static_fraction * n_frames * uniform(rng, 0.8, 1.2)));

  SlipSequence seq{render_background(rig, gel)};
  seq.fps = 30.0;
  const MarkerSet rest = gel.rest_markers();

  double stretch = 0.0;   // mm along dir
  double travel = 0.0;    // object displacement along dir, mm
  SlipPhase phase = SlipPhase::kStatic;
  for (int i = 0; i < n_frames; ++i) {
    if (i >= t0 && rate > 0.0) {
      if (phase == SlipPhase::kStatic) {
        phase = SlipPhase::kIncipient;
        seq.incipient_onset = i;
      }
      if (phase == SlipPhase::kIncipient) {
        if (stretch + rate > stretch_max) {
          phase = SlipPhase::kFullSlip;
          seq.slip_onset = i;
        } else {
          stretch += rate;
          travel += rate;
        }
      }
      if (phase == SlipPhase::kFullSlip) {
        stretch = dyn.kinetic_stretch_ratio * stretch_max;
        travel = std::min(travel + speed, dyn.travel_mm);
        if (travel >= dyn.travel_mm) phase = SlipPhase::kArrested;
      }
    }
    const Vec2 center_mm = start + dir * travel;
    const HeightMap h = press(indent_heightmap(surface, center_mm, depth, gel), gel);
    TactileFrame frame = add_pixel_noise(render_tactile(h, rig, gel, i / seq.fps),
                                         dyn.pixel_noise, rng);
    const Vec2 center_px = center_mm * s;
    const MarkerSet moved =
        displaced(rest, center_px, contact_px, dir * stretch, ShearMode::kTranslation, gel);

    seq.frames.push_back(std::move(frame));
    seq.heights.push_back(h);
    seq.markers.push_back(jitter(moved, dyn.marker_noise_px, rng));
    seq.object_px.push_back(center_px);
    seq.stretch_px.push_back(dir * (stretch * s));
    seq.phase.push_back(phase);
  }

  const bool in_contact = depth > 0.0;
  for (int i = 0; i + 1 < n_frames; ++i) {
    const Vec2 obj = seq.object_px[i + 1] - seq.object_px[i];
    const Vec2 gel_v = seq.stretch_px[i + 1] - seq.stretch_px[i];
    const double rel = (obj - gel_v).norm();
    seq.relative_speed.push_back(rel);
    seq.slip_truth.push_back(in_contact && rel > dyn.slip_threshold_px);
  }
  return seq;
}

CompressionSim synth_compression_clip(const FruitModel& fruit, int n_frames, const GelModel& gel,
                                      const LightRig& rig, const CompressionParams& p, Rng& rng) {
  fruit.validate();
  gel.validate();
  if (n_frames < 2) throw Error("compression clip needs at least 2 frames");
  if (!(p.gel_stiffness_n_per_mm > 0.0)) throw Error("gel stiffness must be positive");
  if (p.closing_mm < 0.0) throw Error("closing travel must be non-negative");

  const double kg = p.gel_stiffness_n_per_mm;
  const double kf = fruit.stiffness_n_per_mm;
  const double k_series = 1.0 / (1.0 / kg + 1.0 / kf);
  const double r_eff = fruit.radius_mm() * (1.0 + kg / kf);
  const double sharpness = 2.0 * kf / (kf + kg);

  FruitSurface surface =
      fruit_surface(fruit.type, r_eff, static_cast<std::uint64_t>(uniform_int(rng, 1, 1 << 30)));
  surface.bump_amplitude_mm *= sharpness;
  const double mid = 0.5 * gel.gel_size_mm;
  const Vec2 center{mid + uniform(rng, -p.max_offset_mm, p.max_offset_mm),
                    mid + uniform(rng, -p.max_offset_mm, p.max_offset_mm)};

  CompressionSim out{render_background(rig, gel), {}, {}, {}, fruit.type, fruit.shore00};
  for (int i = 0; i < n_frames; ++i) {
    const double x = p.closing_mm * i / (n_frames - 1);
    const double force = k_series * x;
    const double depth = std::min(force / kg, max_depth(surface));
    const HeightMap h = press(indent_heightmap(surface, center, depth, gel), gel);
    out.frames.push_back(add_pixel_noise(render_tactile(h, rig, gel, i / 30.0), p.pixel_noise, rng));
    out.force.push_back(force);
    out.current.push_back(p.current_per_n * force + p.current_offset +
                          normal(rng, 0.0, p.current_noise));
  }
  return out;
}

std::vector<ForceSample> synth_normal_force_dataset(int trials, int samples_per_trial,
                                                    const ForceRampParams& p, Rng& rng) {
  if (trials < 1 || samples_per_trial < 2) throw Error("force dataset needs ramps of >= 2 samples");
  std::vector<ForceSample> out;
  out.reserve(static_cast<std::size_t>(trials) * samples_per_trial);
  for (int t = 0; t < trials; ++t) {
    const double lo = p.low_n + uniform(rng, -0.5, 0.5);
    const double hi = p.high_n + uniform(rng, -0.5, 0.5);
    for (int j = 0; j < samples_per_trial; ++j) {
      const double f = lo + (hi - lo) * j / (samples_per_trial - 1);
      out.push_back({p.current_per_n * f + p.current_offset + normal(rng, 0.0, p.current_noise), f});
    }
  }
  return out;
}

std::vector<ShearSample> synth_shear_dataset(int n, const GelModel& gel, const ShearParams& p,
                                             Rng& rng) {
  gel.validate();
  const double s = gel.px_per_mm();
  const MarkerSet rest = gel.rest_markers();
  const Sphere ball;
  const double mid = 0.5 * gel.gel_size_mm;
  std::vector<ShearSample> out;
  out.reserve(static_cast<std::size_t>(std::max(n, 0)));
  for (int k = 0; k < n; ++k) {
    const Vec2 c{mid + uniform(rng, -4.0, 4.0), mid + uniform(rng, -4.0, 4.0)};
    const double depth = uniform(rng, 0.5, 1.5);
    const double mag = uniform(rng, p.min_shear_mm, p.max_shear_mm);
    const double ang = uniform(rng, 0.0, 2.0 * std::numbers::pi);
    const Vec2 shear{mag * std::cos(ang), mag * std::sin(ang)};
    const double twist = uniform(rng, -p.rotation_nuisance_mm, p.rotation_nuisance_mm);

    const HeightMap h = press(indent_heightmap(ball, c, depth, gel), gel);
    ContactMask mask((h.values().array() > p.contact_threshold_mm), p.contact_threshold_mm);
    const double r_px = cap_radius(ball.radius_mm, depth) * s;

    std::vector<Marker> moved = rest.markers();
    for (Marker& m : moved) {
      const Vec2 pos{m.x, m.y};
      const Vec2 d =
          shear_displacement_px(pos, c * s, r_px, shear, ShearMode::kTranslation, gel) +
          shear_displacement_px(pos, c * s, r_px, {twist, 0.0}, ShearMode::kRotation, gel);
      m.x += d.x;
      m.y += d.y;
    }
    const double gain = p.newton_per_mm * (1.0 + p.depth_gain * (depth - 1.0));
    const Vec2 force{gain * shear.x * (1.0 + normal(rng, 0.0, p.label_noise)),
                     gain * shear.y * (1.0 + normal(rng, 0.0, p.label_noise))};
    out.push_back({jitter(rest, p.marker_noise_px, rng),
                   jitter(MarkerSet(std::move(moved), rest.grid_rows(), rest.grid_cols()),
                          p.marker_noise_px, rng),
                   std::move(mask), shear, depth, force});
  }
  return out;
}

}  // namespace gelgrip::sim
