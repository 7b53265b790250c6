#include <algorithm>
#include <cmath>

#include "gelgrip/core/error.hpp"
#include "gelgrip/harvest/harvest.hpp"
#include "gelgrip/sim/tactile.hpp"
#include "gelgrip/slip/slip.hpp"

namespace gelgrip::harvest {

namespace {

double cap_radius(double radius, double depth) {
  return depth <= 0.0 ? 0.0 : std::sqrt(std::max(0.0, 2.0 * radius * depth - depth * depth));
}

// One finger's view of the fruit: contact mask and markers.
struct Sensor {
  const TrialParams& p;
  MarkerSet rest;
  slip::SlipMonitor monitor;

  explicit Sensor(const TrialParams& params)
      : p(params), rest(params.gel.rest_markers()),
        monitor(params.slip_threshold_px, /*smooth=*/false) {}

  bool observe(const FruitModel& fruit, double squeeze_mm, double slide_mm, double stretch_mm,
               Rng& rng) {
    const double s = p.gel.px_per_mm();
    const double radius = fruit.radius_mm();
    const double depth = std::min({0.5 * squeeze_mm, 1.5, radius});
    if (depth <= p.contact_threshold_mm) {
      monitor.reset();
      return false;
    }
    const Vec2 center{0.5 * p.gel.gel_size_mm, 10.0 + slide_mm};
    const HeightMap h = sim::indent_heightmap(sim::Sphere{radius}, center, depth, p.gel);
    const ContactMask mask = slip::segment_contact(h, p.contact_threshold_mm);
    const double r_px = cap_radius(radius, depth) * s;
    std::vector<Marker> moved = rest.markers();
    for (Marker& m : moved) {
      const Vec2 d = sim::shear_displacement_px({m.x, m.y}, center * s, r_px, {0.0, stretch_mm},
                                                sim::ShearMode::kTranslation, p.gel);
      m.x += d.x + normal(rng, 0.0, p.marker_noise_px);
      m.y += d.y + normal(rng, 0.0, p.marker_noise_px);
    }
    const auto frame =
        monitor.push(mask, MarkerSet(std::move(moved), rest.grid_rows(), rest.grid_cols()));
    return frame && frame->slip;
  }
};

}  // namespace

TrialOutcome run_trial(const FruitModel& fruit, const StrategyConfig& cfg,
                       const TrialParams& params, std::uint64_t seed) {
  fruit.validate();
  cfg.validate();
  params.gel.validate();
  if (params.max_ticks < 1) throw Error("max ticks must be at least 1");
  Rng rng(seed);

  const double measured = fruit.diameter_mm + normal(rng, 0.0, params.diameter_noise_mm);
  GraspState state = initial_state(measured, cfg);
  Sensor sensor(params);
  Percepts percepts;
  TrialOutcome out;

  double pull = 0.0;
  double slide = 0.0;  // fruit travel through the fingers this attempt, mm
  for (int tick = 0; tick < params.max_ticks; ++tick) {
    const int attempt_before = state.attempt;
    state = step_controller(state, percepts, cfg);
    out.attempts = state.attempt;
    if (state.phase == Phase::kDone) {
      out.failure = FailureMode::kMaxRetries;
      break;
    }
    if (state.attempt != attempt_before || state.phase == Phase::kApproach) {
      // re-grasp: fingers re-seat the fruit, the arm starts a fresh pull
      pull = 0.0;
      slide = 0.0;
      sensor.monitor.reset();
    }
    const bool pulling = state.phase == Phase::kHoldPull;
    if (pulling) pull += params.pull_rate_n_per_tick * fruit.stem_stiffness;

    const FruitState fs = fruit_response(fruit, state.opening_mm, pull);
    const double current = params.current_per_n * fs.contact_force_n + params.current_offset +
                           normal(rng, 0.0, params.current_noise);
    percepts.force_n = std::max(0.0, force::predict_normal_force(current, params.force_model));
    out.force_trace.push_back(percepts.force_n);
    out.peak_force_n = std::max(out.peak_force_n, percepts.force_n);
    out.peak_contact_force_n = std::max(out.peak_contact_force_n, fs.contact_force_n);
    out.commanded_force_n = state.commanded_force_n;

    if (fs.bruised) {
      out.failure = FailureMode::kBruise;
      break;
    }
    if (fs.detached) {
      out.success = true;
      break;
    }
    const double squeeze = std::max(0.0, fruit.diameter_mm - state.opening_mm);
    const double step = fs.slip_rate * params.arm_step_mm;
    slide += step;
    const double capacity = 2.0 * fruit.friction * fs.contact_force_n;
    const double stretch =
        step > 0.0 ? 0.6 * params.stretch_mm
                   : params.stretch_mm * (capacity > 0.0 ? std::min(1.0, pull / capacity) : 0.0);
    // the monitor also watches the closing so the first pulling tick has a baseline
    const bool seen = state.phase == Phase::kClose || pulling
                          ? sensor.observe(fruit, squeeze, slide, stretch, rng)
                          : false;
    percepts.slip = pulling && seen;
    // a slip seen this tick is answered by re-grasping before the fruit leaves the fingers
    const bool caught = percepts.slip && cfg.strategy != Strategy::kOpenLoop;
    if (pulling && !caught && slide > cap_radius(fruit.radius_mm(), 0.5 * squeeze)) {
      out.failure = FailureMode::kSlipDrop;
      break;
    }
  }
  if (!out.success && out.failure == FailureMode::kNone) out.failure = FailureMode::kTimeout;
  return out;
}

std::string_view to_string(FailureMode f) {
  switch (f) {
    case FailureMode::kNone: return "none";
    case FailureMode::kSlipDrop: return "slip_drop";
    case FailureMode::kBruise: return "bruise";
    case FailureMode::kMaxRetries: return "max_retries";
    case FailureMode::kTimeout: return "timeout";
  }
  return "?";
}

}  // namespace gelgrip::harvest
