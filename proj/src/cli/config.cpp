#include "gelgrip/cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "gelgrip/core/error.hpp"

namespace gelgrip::cli {

sim::GelModel SimConfig::gel() const {
  sim::GelModel g;
  g.frame_px = frame_px;
  g.gel_size_mm = frame_px / px_per_mm;
  g.membrane_sigma_mm = membrane_sigma_mm;
  g.shear_falloff_mm = shear_falloff_mm;
  g.marker_rows = marker_rows;
  g.marker_cols = marker_cols;
  return g;
}

sim::LightRig SimConfig::rig() const {
  return sim::LightRig::standard(light_elevation_deg, 0.0, light_intensity);
}

geometry::FitOptions GeometryConfig::fit_options(std::uint64_t seed) const {
  geometry::FitOptions o;
  o.epochs = epochs;
  o.learning_rate = learning_rate;
  o.optimizer = optimizer == "gd" ? geometry::Optimizer::kGradientDescent
                                  : geometry::Optimizer::kAdam;
  o.seed = seed;
  return o;
}

softness::TrainOptions SoftnessConfig::train_options(std::uint64_t seed) const {
  softness::TrainOptions o;
  o.epochs = epochs;
  o.learning_rate = learning_rate;
  o.optimizer = optimizer == "adam" ? softness::RankerOptimizer::kAdam
                                    : softness::RankerOptimizer::kGradientDescent;
  o.train_bias = train_bias;
  o.seed = seed;
  return o;
}

harvest::TrialParams HarvestConfig::trial_params(const SimConfig& sim, const SlipConfig& slip,
                                                 const ForceConfig& force) const {
  harvest::TrialParams p;
  p.diameter_noise_mm = diameter_noise_mm;
  p.pull_rate_n_per_tick = pull_rate_n_per_tick;
  p.arm_step_mm = arm_step_mm;
  p.current_per_n = force.current_per_n;
  p.current_offset = force.current_offset;
  p.current_noise = current_noise;
  p.force_model = {1.0 / force.current_per_n, -force.current_offset / force.current_per_n, true};
  p.gel = sim.gel();
  p.contact_threshold_mm = slip.contact_threshold_mm;
  p.slip_threshold_px = slip.threshold_px;
  p.marker_noise_px = slip.marker_noise_px;
  return p;
}

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw Error(std::string("config: ") + what);
}

}  // namespace

void Config::validate() const {
  sim.gel().validate();
  require(sim.pixel_noise >= 0.0, "sim.pixel_noise must be >= 0");
  require(sim.light_elevation_deg > 0.0 && sim.light_elevation_deg < 90.0,
          "sim.light_elevation_deg must lie in (0, 90)");
  require(geometry.presses >= 1, "geometry.presses must be >= 1");
  require(geometry.sphere_radius_mm > 0.0, "geometry.sphere_radius_mm must be > 0");
  require(geometry.flat_stride >= 1, "geometry.flat_stride must be >= 1");
  require(geometry.epochs >= 1, "geometry.epochs must be >= 1");
  require(geometry.learning_rate > 0.0, "geometry.learning_rate must be > 0");
  require(geometry.optimizer == "adam" || geometry.optimizer == "gd",
          "geometry.optimizer must be adam or gd");
  require(force.current_per_n > 0.0, "force.current_per_n must be > 0");
  require(force.current_noise >= 0.0, "force.current_noise must be >= 0");
  require(force.ramps >= 1 && force.samples_per_ramp >= 2, "force ramps need >= 2 samples");
  require(force.grid >= 8, "force.grid must be >= 8");
  require(force.contact_threshold_mm > 0.0, "force.contact_threshold_mm must be > 0");
  require(force.shear_samples >= 20, "force.shear_samples must be >= 20");
  require(force.holdout > 0.0 && force.holdout < 1.0, "force.holdout must lie in (0, 1)");
  require(slip.threshold_px >= 0.0, "slip.threshold_px must be >= 0");
  require(slip.contact_threshold_mm > 0.0, "slip.contact_threshold_mm must be > 0");
  require(slip.frames >= 10, "slip.frames must be >= 10");
  require(slip.pixel_noise >= 0.0 && slip.marker_noise_px >= 0.0, "slip noise must be >= 0");
  require(softness.epochs >= 1, "softness.epochs must be >= 1");
  require(softness.learning_rate > 0.0, "softness.learning_rate must be > 0");
  require(softness.optimizer == "gd" || softness.optimizer == "adam",
          "softness.optimizer must be gd or adam");
  require(softness.frame_px >= 16, "softness.frame_px must be >= 16");
  require(softness.clip_frames >= 4, "softness.clip_frames must be >= 4");
  require(softness.train_trials >= 1 && softness.train_trials < softness.trials,
          "softness.train_trials must lie in [1, softness.trials)");
  require(harvest.trials >= 8, "harvest.trials must be >= 8");
  require(harvest.diameter_noise_mm >= 0.0, "harvest.diameter_noise_mm must be >= 0");
  require(harvest.max_retries >= 1, "harvest.max_retries must be >= 1");
  require(harvest.pull_rate_n_per_tick > 0.0, "harvest.pull_rate_n_per_tick must be > 0");
  require(harvest.arm_step_mm > 0.0, "harvest.arm_step_mm must be > 0");
}

namespace {

template <class T>
T parse_value(const std::string& s);

template <>
double parse_value<double>(const std::string& s) {
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw Error("expected a number, got '" + s + "'");
  }
  return v;
}

template <>
int parse_value<int>(const std::string& s) {
  int v = 0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) {
    throw Error("expected an integer, got '" + s + "'");
  }
  return v;
}

template <>
bool parse_value<bool>(const std::string& s) {
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw Error("expected true or false, got '" + s + "'");
}

template <>
std::string parse_value<std::string>(const std::string& s) {
  if (s.empty()) throw Error("empty value");
  return s;
}

template <class T>
std::string show(const T& v) {
  std::ostringstream os;
  if constexpr (std::is_same_v<T, bool>) {
    os << (v ? "true" : "false");
  } else {
    os << std::setprecision(10) << v;
  }
  return os.str();
}

template <auto Section, auto Field>
ConfigKey key(std::string name, std::string help) {
  return {std::move(name), std::move(help),
          [](Config& c, const std::string& s) {
            auto& field = (c.*Section).*Field;
            field = parse_value<std::decay_t<decltype(field)>>(s);
          },
          [](const Config& c) { return show((c.*Section).*Field); }};
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

const std::vector<ConfigKey>& config_keys() {
  using C = Config;
  static const std::vector<ConfigKey> keys = {
      key<&C::sim, &SimConfig::frame_px>("sim.frame_px", "rectified frame side, px"),
      key<&C::sim, &SimConfig::px_per_mm>("sim.px_per_mm", "frame scale; pad side = frame_px / px_per_mm"),
      key<&C::sim, &SimConfig::membrane_sigma_mm>("sim.membrane_sigma_mm", "membrane smoothing, mm"),
      key<&C::sim, &SimConfig::shear_falloff_mm>("sim.shear_falloff_mm", "marker shear decay outside contact, mm"),
      key<&C::sim, &SimConfig::marker_rows>("sim.marker_rows", "marker lattice rows"),
      key<&C::sim, &SimConfig::marker_cols>("sim.marker_cols", "marker lattice columns"),
      key<&C::sim, &SimConfig::light_elevation_deg>("sim.light_elevation_deg", "light elevation, degrees"),
      key<&C::sim, &SimConfig::light_intensity>("sim.light_intensity", "per-light channel gain"),
      key<&C::sim, &SimConfig::pixel_noise>("sim.pixel_noise", "camera read noise sigma"),
      key<&C::geometry, &GeometryConfig::presses>("geometry.presses", "calibration sphere presses"),
      key<&C::geometry, &GeometryConfig::sphere_radius_mm>("geometry.sphere_radius_mm", "calibration sphere radius, mm"),
      key<&C::geometry, &GeometryConfig::flat_stride>("geometry.flat_stride", "sampling stride outside contact, px"),
      key<&C::geometry, &GeometryConfig::epochs>("geometry.epochs", "MLP training epochs"),
      key<&C::geometry, &GeometryConfig::learning_rate>("geometry.learning_rate", "MLP learning rate"),
      key<&C::geometry, &GeometryConfig::optimizer>("geometry.optimizer", "adam or gd"),
      key<&C::force, &ForceConfig::current_per_n>("force.current_per_n", "motor current per newton"),
      key<&C::force, &ForceConfig::current_offset>("force.current_offset", "motor current at zero force"),
      key<&C::force, &ForceConfig::current_noise>("force.current_noise", "current noise sigma of the force ramps"),
      key<&C::force, &ForceConfig::ramps>("force.ramps", "force ramps in the normal-force dataset"),
      key<&C::force, &ForceConfig::samples_per_ramp>("force.samples_per_ramp", "samples per ramp"),
      key<&C::force, &ForceConfig::grid>("force.grid", "displacement grid nodes per side"),
      key<&C::force, &ForceConfig::contact_threshold_mm>("force.contact_threshold_mm", "contact height threshold, mm"),
      key<&C::force, &ForceConfig::shear_samples>("force.shear_samples", "shear dataset size"),
      key<&C::force, &ForceConfig::holdout>("force.holdout", "held-out share of the shear dataset"),
      key<&C::slip, &SlipConfig::threshold_px>("slip.threshold_px", "slip speed threshold, px per frame"),
      key<&C::slip, &SlipConfig::contact_threshold_mm>("slip.contact_threshold_mm", "contact height threshold, mm"),
      key<&C::slip, &SlipConfig::smooth>("slip.smooth", "3-frame velocity smoothing"),
      key<&C::slip, &SlipConfig::frames>("slip.frames", "frames per benchmark trial"),
      key<&C::slip, &SlipConfig::pixel_noise>("slip.pixel_noise", "camera read noise of slip scenes"),
      key<&C::slip, &SlipConfig::marker_noise_px>("slip.marker_noise_px", "marker tracking noise, px"),
      key<&C::softness, &SoftnessConfig::epochs>("softness.epochs", "ranker training epochs"),
      key<&C::softness, &SoftnessConfig::learning_rate>("softness.learning_rate", "ranker learning rate"),
      key<&C::softness, &SoftnessConfig::optimizer>("softness.optimizer", "gd or adam"),
      key<&C::softness, &SoftnessConfig::train_bias>("softness.train_bias", "train the comparator bias"),
      key<&C::softness, &SoftnessConfig::frame_px>("softness.frame_px", "compression clip frame side, px"),
      key<&C::softness, &SoftnessConfig::clip_frames>("softness.clip_frames", "frames per simulated squeeze"),
      key<&C::softness, &SoftnessConfig::trials>("softness.trials", "squeezes per fruit and hardness"),
      key<&C::softness, &SoftnessConfig::train_trials>("softness.train_trials", "of which used for training"),
      key<&C::harvest, &HarvestConfig::trials>("harvest.trials", "trials per strategy and fruit"),
      key<&C::harvest, &HarvestConfig::diameter_noise_mm>("harvest.diameter_noise_mm", "diameter measurement sigma, mm"),
      key<&C::harvest, &HarvestConfig::max_retries>("harvest.max_retries", "grasp attempts allowed"),
      key<&C::harvest, &HarvestConfig::pull_rate_n_per_tick>("harvest.pull_rate_n_per_tick", "stem pull growth per tick, N"),
      key<&C::harvest, &HarvestConfig::arm_step_mm>("harvest.arm_step_mm", "arm retreat per tick, mm"),
      key<&C::harvest, &HarvestConfig::current_noise>("harvest.current_noise", "motor current noise during harvest"),
  };
  return keys;
}

Config parse_config(std::istream& in) {
  Config c;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string text = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ParseError(line, "expected key=value");
    const std::string name = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    const auto& keys = config_keys();
    const auto it = std::find_if(keys.begin(), keys.end(),
                                 [&](const ConfigKey& k) { return k.name == name; });
    if (it == keys.end()) throw ParseError(line, "unknown config key '" + name + "'");
    try {
      it->set(c, value);
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(line, "bad value for '" + name + "': " + e.what());
    }
  }
  c.validate();
  return c;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config " + path.string());
  return parse_config(in);
}

void write_config_reference(std::ostream& os, const Config& c) {
  for (const ConfigKey& k : config_keys()) {
    os << "  " << std::left << std::setw(42) << (k.name + " = " + k.get(c)) << " # " << k.help
       << '\n';
  }
}

}  // namespace gelgrip::cli
