#include "gelgrip/cli/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "gelgrip/core/error.hpp"
#include "gelgrip/core/image_ops.hpp"
#include "gelgrip/force/interpolate.hpp"
#include "gelgrip/force/metrics.hpp"
#include "gelgrip/geometry/reconstruction.hpp"
#include "gelgrip/sim/tactile.hpp"

namespace gelgrip::cli {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double cap_radius(double radius, double depth) {
  return std::sqrt(std::max(0.0, 2.0 * radius * depth - depth * depth));
}

GridGeometry force_grid(const Config& c) {
  return GridGeometry::covering(c.sim.frame_px, c.sim.frame_px, c.force.grid, c.force.grid);
}

}  // namespace

std::vector<geometry::CalibrationPress> synth_calibration_presses(const Config& c,
                                                                  double pixel_noise, Rng& rng) {
  const sim::GelModel gel = c.sim.gel();
  const sim::LightRig rig = c.sim.rig();
  const TactileFrame bg = sim::render_background(rig, gel);
  const double r = c.geometry.sphere_radius_mm;
  const double size = gel.gel_size_mm;
  std::vector<geometry::CalibrationPress> out;
  for (int i = 0; i < c.geometry.presses; ++i) {
    const double depth = uniform(rng, 0.1 * r, 0.24 * r);
    const Vec2 center{uniform(rng, 0.27 * size, 0.73 * size), uniform(rng, 0.27 * size, 0.73 * size)};
    const HeightMap h = sim::press(sim::indent_heightmap(sim::Sphere{r}, center, depth, gel), gel);
    const TactileFrame f = sim::add_pixel_noise(sim::render_tactile(h, rig, gel), pixel_noise, rng);
    out.push_back({diff_image(f, bg), center * gel.px_per_mm(),
                   cap_radius(r, depth) * gel.px_per_mm(), r});
  }
  return out;
}

CalibrationRun calibrate(const Config& c, double pixel_noise, std::uint64_t seed) {
  const auto t0 = Clock::now();
  Rng rng = derive_rng(seed, 1);
  const auto data =
      geometry::build_calibration_dataset(synth_calibration_presses(c, pixel_noise, rng),
                                          c.geometry.flat_stride);
  CalibrationRun run{geometry::fit_rgb2normal(data, c.geometry.fit_options(seed)),
                     data.samples.size(), 0.0};
  run.seconds = seconds_since(t0);
  return run;
}

PyramidReport reconstruct_pyramids(const Config& c, const geometry::Rgb2NormalModel& model, int n,
                                   double pixel_noise, std::uint64_t seed) {
  if (n < 1) throw Error("need at least one pyramid press");
  const sim::GelModel gel = c.sim.gel();
  const sim::LightRig rig = c.sim.rig();
  const TactileFrame bg = sim::render_background(rig, gel);
  const geometry::HeightIntegrator integrator(gel.frame_px, gel.frame_px);
  const double size = gel.gel_size_mm;
  Rng rng = derive_rng(seed, 2);
  PyramidReport rep;
  double busy = 0.0;
  for (int i = 0; i < n; ++i) {
    const Vec2 center{uniform(rng, 0.3 * size, 0.7 * size), uniform(rng, 0.3 * size, 0.7 * size)};
    const sim::HexPyramid pyramid;
    const HeightMap raw = sim::indent_heightmap(pyramid, center, pyramid.height_mm, gel);
    const TactileFrame f =
        sim::add_pixel_noise(sim::render_tactile(sim::press(raw, gel), rig, gel), pixel_noise, rng);
    const auto t0 = Clock::now();
    const HeightMap rec = geometry::reconstruct_heightmap(diff_image(f, bg), model, integrator);
    busy += seconds_since(t0);
    rep.mse_mm2.push_back(geometry::reconstruction_error(rec, raw));
  }
  double sum = 0.0;
  for (double m : rep.mse_mm2) sum += m;
  rep.mean_mse_mm2 = sum / n;
  rep.seconds_per_frame = busy / n;
  return rep;
}

NormalForceReport normal_force_experiment(const Config& c, std::uint64_t seed) {
  Rng rng = derive_rng(seed, 3);
  sim::ForceRampParams p;
  p.current_per_n = c.force.current_per_n;
  p.current_offset = c.force.current_offset;
  p.current_noise = c.force.current_noise;
  const auto data = sim::synth_normal_force_dataset(c.force.ramps, c.force.samples_per_ramp, p, rng);
  std::vector<double> current, truth;
  for (const auto& s : data) {
    current.push_back(s.current);
    truth.push_back(s.force);
  }
  NormalForceReport r;
  r.model = force::fit_normal_force(current, truth);
  std::vector<double> pred;
  for (double i : current) pred.push_back(force::predict_normal_force(i, r.model));
  r.r2 = force::r_squared(truth, pred);
  r.mape = force::mape(truth, pred);
  r.samples = data.size();
  return r;
}

force::ShearFeature shear_feature(const MarkerSet& rest, const MarkerSet& now,
                                  const ContactMask& contact, const force::HhdSolver& solver) {
  const DisplacementField v = force::interpolate_markers(rest, now, solver.grid());
  return force::shear_features(v, solver.decompose(v), contact.sampled_on(solver.grid()));
}

ShearReport shear_experiment(const Config& c, std::uint64_t seed) {
  Rng rng = derive_rng(seed, 4);
  sim::ShearParams p;
  p.contact_threshold_mm = c.force.contact_threshold_mm;
  const auto data = sim::synth_shear_dataset(c.force.shear_samples, c.sim.gel(), p, rng);
  const force::HhdSolver solver(force_grid(c));
  std::vector<force::ShearFeature> x;
  std::vector<Vec2> y;
  for (const auto& s : data) {
    x.push_back(shear_feature(s.before, s.after, s.contact, solver));
    y.push_back(s.force_n);
  }
  const int n = static_cast<int>(data.size());
  const int test = std::max(1, static_cast<int>(std::lround(c.force.holdout * n)));
  ShearReport r;
  r.train = n - test;
  r.test = test;
  r.model = force::fit_shear_model({x.begin(), x.begin() + r.train}, {y.begin(), y.begin() + r.train});
  std::vector<double> truth, pred;
  for (int i = r.train; i < n; ++i) {
    truth.push_back(y[i].norm());
    pred.push_back(force::predict_shear(x[i], r.model).norm());
  }
  r.r2 = force::r_squared(truth, pred);
  r.mape = force::mape(truth, pred);
  return r;
}

SlipBenchmark slip_benchmark(const Config& c, const geometry::Rgb2NormalModel* model,
                             std::uint64_t seed) {
  const sim::GelModel gel = c.sim.gel();
  const sim::LightRig rig = c.sim.rig();
  std::optional<geometry::HeightIntegrator> integrator;
  if (model) integrator.emplace(gel.frame_px, gel.frame_px);
  sim::SlipDynamics dyn;
  dyn.pixel_noise = c.slip.pixel_noise;
  dyn.marker_noise_px = c.slip.marker_noise_px;
  dyn.slip_threshold_px = c.slip.threshold_px;

  SlipBenchmark out;
  std::vector<std::vector<bool>> predicted, truth;
  std::uint64_t stream = 100;
  for (sim::GraspPose pose : {sim::GraspPose::kTop, sim::GraspPose::kSide}) {
    for (double load : {10.0, 20.0, 50.0}) {
      for (int rep = 0; rep < 2; ++rep) {
        Rng rng = derive_rng(seed, stream++);
        sim::GraspScene scene;
        scene.pose = pose;
        scene.load_g = load;
        scene.opening_mm = scene.fruit.diameter_mm - 2.0;
        const auto seq = sim::synth_slip_sequence(scene, c.slip.frames, gel, rig, dyn, rng);
        std::vector<ContactMask> masks;
        for (std::size_t i = 0; i < seq.frames.size(); ++i) {
          const HeightMap h =
              model ? geometry::reconstruct_heightmap(diff_image(seq.frames[i], seq.background),
                                                      *model, *integrator)
                    : seq.heights[i];
          masks.push_back(slip::segment_contact(h, c.slip.contact_threshold_mm));
        }
        SlipTrial t{pose, load, rep,
                    slip::detect_sequence(masks, seq.markers, c.slip.threshold_px, c.slip.smooth),
                    seq.slip_truth};
        std::vector<bool> p;
        for (const auto& f : t.frames) p.push_back(f.slip);
        predicted.push_back(std::move(p));
        truth.push_back(t.truth);
        out.trials.push_back(std::move(t));
      }
    }
  }
  out.summary = slip::evaluate_slip_detector(predicted, truth, 30.0);
  return out;
}

SoftnessDataset softness_dataset(const Config& c, std::uint64_t seed) {
  const sim::GelModel gel = c.sim.gel().with_frame_px(c.softness.frame_px);
  const sim::LightRig rig = c.sim.rig();
  Rng rng = derive_rng(seed, 5);
  SoftnessDataset d;
  for (sim::FruitType type :
       {sim::FruitType::kCherryTomato, sim::FruitType::kStrawberry, sim::FruitType::kRaspberry}) {
    for (double shore : kHardnessLevels) {
      for (int t = 0; t < c.softness.trials; ++t) {
        sim::CompressionParams p;
        p.current_per_n = c.force.current_per_n;
        p.current_offset = c.force.current_offset;
        p.pixel_noise = c.sim.pixel_noise;
        p.closing_mm = uniform(rng, 2.5, 3.5);
        const auto sim_clip = sim::synth_compression_clip(sim::silicone_replica(type, shore),
                                                          c.softness.clip_frames, gel, rig, p, rng);
        softness::CompressionClip clip;
        for (const auto& f : sim_clip.frames) clip.frames.push_back(diff_image(f, sim_clip.background));
        for (double i : sim_clip.current) {
          clip.force_n.push_back(std::max(0.0, (i - p.current_offset) / p.current_per_n));
        }
        clip.fruit = std::string(sim::to_string(type));
        clip.shore00 = shore;
        (t < c.softness.train_trials ? d.train : d.test).push_back(static_cast<int>(d.clips.size()));
        d.clips.push_back(softness::prepare_clip(clip));
        d.fruit.push_back(clip.fruit);
        d.shore00.push_back(shore);
      }
    }
  }
  return d;
}

harvest::ExperimentResult harvest_experiment(const Config& c,
                                             const std::vector<harvest::Strategy>& strategies,
                                             const std::vector<sim::FruitType>& fruits,
                                             std::uint64_t seed) {
  std::vector<harvest::Population> pops;
  for (sim::FruitType f : fruits) pops.push_back(harvest::Population::defaults(f));
  const harvest::TrialParams params = c.harvest.trial_params(c.sim, c.slip, c.force);
  return harvest::run_experiment(pops, strategies, c.harvest.trials, params, seed,
                                 c.harvest.max_retries);
}

PerceptionLoop::PerceptionLoop(const Config& c, geometry::Rgb2NormalModel model,
                               TactileFrame background, force::NormalForceModel normal,
                               force::ShearModel shear)
    : config_(c), model_(std::move(model)), background_(std::move(background)),
      normal_(normal), shear_(shear),
      integrator_(background_.width(), background_.height()),
      hhd_(GridGeometry::covering(background_.width(), background_.height(), c.force.grid,
                                  c.force.grid)),
      monitor_(c.slip.threshold_px, c.slip.smooth),
      rest_(c.sim.gel().rest_markers()) {}

TickReport PerceptionLoop::tick(const TactileFrame& frame, const MarkerSet& markers,
                                double current) {
  HeightMap h = geometry::reconstruct_heightmap(diff_image(frame, background_), model_, integrator_);
  ContactMask mask = slip::segment_contact(h, config_.slip.contact_threshold_mm);
  TickReport r{std::move(h), mask, monitor_.push(mask, markers),
               std::max(0.0, force::predict_normal_force(current, normal_)), {}};
  if (mask.count() > 0) r.shear_force_n = force::predict_shear(shear_feature(rest_, markers, mask, hhd_), shear_);
  return r;
}

}  // namespace gelgrip::cli
