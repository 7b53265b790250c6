#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gelgrip/cli/config.hpp"
#include "gelgrip/force/normal_force.hpp"
#include "gelgrip/force/shear.hpp"
#include "gelgrip/geometry/calibration.hpp"
#include "gelgrip/geometry/integrate.hpp"
#include "gelgrip/geometry/rgb2normal.hpp"
#include "gelgrip/harvest/harvest.hpp"
#include "gelgrip/sim/sequences.hpp"
#include "gelgrip/slip/slip.hpp"
#include "gelgrip/softness/ranker.hpp"

namespace gelgrip::cli {

// Geometry

/// Simulated presses of the calibration sphere at random depth and position.
std::vector<geometry::CalibrationPress> synth_calibration_presses(const Config& c,
                                                                  double pixel_noise, Rng& rng);

struct CalibrationRun {
  geometry::FitResult fit;
  std::size_t samples = 0;
  double seconds = 0.0;
};
CalibrationRun calibrate(const Config& c, double pixel_noise, std::uint64_t seed);

struct PyramidReport {
  std::vector<double> mse_mm2;
  double mean_mse_mm2 = 0.0;
  double seconds_per_frame = 0.0;
};
/// Presses the hexagonal pyramid `n` times, reconstructs and scores each
/// against the unsmoothed indentation.
PyramidReport reconstruct_pyramids(const Config& c, const geometry::Rgb2NormalModel& model, int n,
                                   double pixel_noise, std::uint64_t seed);

// Force

struct NormalForceReport {
  force::NormalForceModel model;
  double r2 = 0.0;
  double mape = 0.0;  // fraction
  std::size_t samples = 0;
};
NormalForceReport normal_force_experiment(const Config& c, std::uint64_t seed);

struct ShearReport {
  force::ShearModel model;
  double r2 = 0.0;    // on held-out force magnitudes
  double mape = 0.0;  // fraction
  int train = 0;
  int test = 0;
};
ShearReport shear_experiment(const Config& c, std::uint64_t seed);

/// Shear feature of one marker frame against the rest frame.
force::ShearFeature shear_feature(const MarkerSet& rest, const MarkerSet& now,
                                  const ContactMask& contact, const force::HhdSolver& solver);

// Slip

struct SlipTrial {
  sim::GraspPose pose;
  double load_g;
  int repeat;
  std::vector<slip::SlipFrame> frames;
  std::vector<bool> truth;
};

struct SlipBenchmark {
  std::vector<SlipTrial> trials;
  slip::SlipSummary summary;
};

/// Top and side grasps under 10, 20 and 50 g, twice each. Heights come from
/// `model` when given (full reconstruction), otherwise from the simulator.
SlipBenchmark slip_benchmark(const Config& c, const geometry::Rgb2NormalModel* model,
                             std::uint64_t seed);

// Softness

inline constexpr double kHardnessLevels[] = {68.4, 64.8, 51.4, 42.2};

struct SoftnessDataset {
  std::vector<softness::ClipTensor> clips;
  std::vector<std::string> fruit;
  std::vector<double> shore00;
  std::vector<int> train;
  std::vector<int> test;
};
/// Replica squeezes for each fruit texture and hardness; the first
/// train_trials of every cell train, the rest test.
SoftnessDataset softness_dataset(const Config& c, std::uint64_t seed);

// Harvest

harvest::ExperimentResult harvest_experiment(const Config& c,
                                             const std::vector<harvest::Strategy>& strategies,
                                             const std::vector<sim::FruitType>& fruits,
                                             std::uint64_t seed);

// Perception tick

struct TickReport {
  HeightMap height;
  ContactMask contact;
  std::optional<slip::SlipFrame> slip;
  double normal_force_n = 0.0;
  Vec2 shear_force_n;
};

/// Frame -> normals -> heightmap -> contact -> slip and force estimates.
class PerceptionLoop {
 public:
  PerceptionLoop(const Config& c, geometry::Rgb2NormalModel model, TactileFrame background,
                 force::NormalForceModel normal, force::ShearModel shear);

  TickReport tick(const TactileFrame& frame, const MarkerSet& markers, double current);

 private:
  Config config_;
  geometry::Rgb2NormalModel model_;
  TactileFrame background_;
  force::NormalForceModel normal_;
  force::ShearModel shear_;
  geometry::HeightIntegrator integrator_;
  force::HhdSolver hhd_;
  slip::SlipMonitor monitor_;
  MarkerSet rest_;
};

}  // namespace gelgrip::cli
