#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "gelgrip/geometry/rgb2normal.hpp"
#include "gelgrip/harvest/harvest.hpp"
#include "gelgrip/sim/gel.hpp"
#include "gelgrip/softness/ranker.hpp"

namespace gelgrip::cli {

struct SimConfig {
  int frame_px = 128;
  double px_per_mm = 128.0 / 30.0;
  double membrane_sigma_mm = 0.25;
  double shear_falloff_mm = 3.0;
  int marker_rows = 16;
  int marker_cols = 16;
  double light_elevation_deg = 60.0;
  double light_intensity = 0.5;
  double pixel_noise = 0.004;

  sim::GelModel gel() const;
  sim::LightRig rig() const;
};

struct GeometryConfig {
  int presses = 10;
  double sphere_radius_mm = 5.0;
  int flat_stride = 8;
  int epochs = 600;
  double learning_rate = geometry::kDefaultAdamRate;
  std::string optimizer = "adam";

  geometry::FitOptions fit_options(std::uint64_t seed) const;
};

struct ForceConfig {
  double current_per_n = 0.12;
  double current_offset = 0.05;
  double current_noise = 0.04;
  int ramps = 100;
  int samples_per_ramp = 100;
  int grid = 32;
  double contact_threshold_mm = 0.3;
  int shear_samples = 400;
  double holdout = 0.2;
};

struct SlipConfig {
  double threshold_px = 10.0;
  double contact_threshold_mm = 0.3;
  bool smooth = true;
  int frames = 200;
  double pixel_noise = 0.004;
  double marker_noise_px = 0.15;
};

struct SoftnessConfig {
  int epochs = 2000;
  double learning_rate = 1e-2;
  std::string optimizer = "gd";
  bool train_bias = true;
  int frame_px = 64;
  int clip_frames = 20;
  int trials = 10;
  int train_trials = 7;

  softness::TrainOptions train_options(std::uint64_t seed) const;
};

struct HarvestConfig {
  int trials = 50;
  double diameter_noise_mm = 1.0;
  int max_retries = 5;
  double pull_rate_n_per_tick = 3.0;
  double arm_step_mm = 5.0;
  double current_noise = 0.01;

  harvest::TrialParams trial_params(const SimConfig& sim, const SlipConfig& slip,
                                    const ForceConfig& force) const;
};

struct Config {
  SimConfig sim;
  GeometryConfig geometry;
  ForceConfig force;
  SlipConfig slip;
  SoftnessConfig softness;
  HarvestConfig harvest;

  /// Throws naming the first out-of-range value.
  void validate() const;
};

struct ConfigKey {
  std::string name;
  std::string help;
  std::function<void(Config&, const std::string&)> set;  // throws on a bad value
  std::function<std::string(const Config&)> get;
};

/// Every accepted key, in documentation order.
const std::vector<ConfigKey>& config_keys();

/// `key=value` lines; `#` starts a comment; blank lines ignored. Unknown keys
/// and unparsable values raise ParseError naming the key and line.
Config parse_config(std::istream& in);
Config load_config(const std::filesystem::path& path);

/// One `key = default  # help` line per key.
void write_config_reference(std::ostream& os, const Config& c = {});

}  // namespace gelgrip::cli
