#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "gelgrip/core/random.hpp"
#include "gelgrip/force/normal_force.hpp"
#include "gelgrip/sim/fruit.hpp"
#include "gelgrip/sim/gel.hpp"

namespace gelgrip::harvest {

using sim::FruitModel;
using sim::FruitType;

struct FruitState {
  double contact_force_n = 0.0;
  double slip_rate = 0.0;  // share of the pull not transmitted through the grip, [0, 1]
  bool detached = false;
  bool bruised = false;
};

/// Plant physics of a two-finger pinch at `opening_mm` under stem pull `pull_n`.
/// Contact force k * max(0, d - opening); the grip transmits at most
/// 2 * friction * contact force; the stem breaks once the transmitted pull
/// reaches the detachment force; skin bruises above the bruise force.
FruitState fruit_response(const FruitModel& fruit, double opening_mm, double pull_n);

enum class Strategy { kOpenLoop, kSlip, kSlipForce };
std::string_view to_string(Strategy s);
Strategy strategy_from_string(std::string_view s);

struct StrategyConfig {
  Strategy strategy = Strategy::kOpenLoop;
  double close_margin_mm = 2.0;     // close to measured diameter minus this
  double retry_increment_mm = 2.0;  // extra closing after a slip (slip strategy)
  double initial_force_n = 1.2;     // slip_force command on the first attempt
  double force_increment_n = 0.3;   // added to the command after each slip
  int max_retries = 5;              // attempts allowed in total
  double close_step_mm = 0.2;       // finger travel per tick while force-closing

  /// Default settings for a strategy and fruit type.
  static StrategyConfig defaults(Strategy s, FruitType fruit);
  void validate() const;
};

enum class Phase { kDetect, kApproach, kClose, kHoldPull, kRetry, kDone };
std::string_view to_string(Phase p);

struct GraspState {
  Phase phase = Phase::kDetect;
  double opening_mm = 40.0;
  double target_diameter_mm = 0.0;  // perceived fruit diameter
  double commanded_force_n = 0.0;
  int attempt = 0;
  double peak_force_n = 0.0;
  bool gave_up = false;  // slip seen on the last allowed attempt
};

struct Percepts {
  bool slip = false;
  double force_n = 0.0;  // normal force estimate
};

/// Fresh state for a fruit whose measured diameter is `measured_diameter_mm`.
GraspState initial_state(double measured_diameter_mm, const StrategyConfig& cfg);

/// One 15 Hz controller tick. Done is absorbing; attempts never exceed
/// cfg.max_retries.
GraspState step_controller(const GraspState& state, const Percepts& percepts,
                           const StrategyConfig& cfg);

enum class FailureMode { kNone, kSlipDrop, kBruise, kMaxRetries, kTimeout };
std::string_view to_string(FailureMode f);

struct TrialOutcome {
  bool success = false;
  FailureMode failure = FailureMode::kNone;
  int attempts = 0;
  double peak_force_n = 0.0;          // peak sensed normal force
  double peak_contact_force_n = 0.0;  // peak applied force, simulator truth
  double commanded_force_n = 0.0;     // last force command (slip_force)
  std::vector<double> force_trace;    // sensed normal force per tick
};

struct TrialParams {
  double tick_hz = 15.0;
  double diameter_noise_mm = 1.0;
  double pull_rate_n_per_tick = 3.0;   // scaled by the fruit's stem stiffness
  double arm_step_mm = 5.0;            // retreat per tick; full slip moves this far
  double current_per_n = 0.12;
  double current_offset = 0.05;
  double current_noise = 0.01;
  force::NormalForceModel force_model{1.0 / 0.12, -0.05 / 0.12, true};
  sim::GelModel gel{};
  double contact_threshold_mm = 0.3;
  double slip_threshold_px = 10.0;
  double marker_noise_px = 0.15;
  double stretch_mm = 0.5;             // gel stretch at full static friction
  int max_ticks = 400;
};

/// Perception-control loop until the fruit is detached, dropped, bruised or
/// the controller gives up. Success iff detached without bruise or drop.
TrialOutcome run_trial(const FruitModel& fruit, const StrategyConfig& cfg,
                       const TrialParams& params, std::uint64_t seed);

/// Fruit distribution of the default lab populations.
struct Population {
  FruitType type = FruitType::kCherryTomato;
  double diameter_mean_mm = 28.3;
  double diameter_sd_mm = 1.5;
  double diameter_min_mm = 0.0;  // uniform range used when max > min
  double diameter_max_mm = 0.0;
  double stiffness_mean = 0.8;
  double stiffness_sd = 0.1;
  double detach_min_n = 1.0;
  double detach_max_n = 2.2;
  double bruise_min_n = 3.2;
  double bruise_max_n = 4.5;
  double friction = 0.6;
  double stem_stiffness = 1.0;

  static Population defaults(FruitType t);
  FruitModel sample(Rng& rng) const;
};

struct StrategySummary {
  std::string fruit;
  Strategy strategy;
  int trials = 0;
  double success_rate = 0.0;
  double mean_attempts = 0.0;
  double force_mean_n = 0.0;
  double force_var_n2 = 0.0;
};

struct TrialRecord {
  std::string fruit;
  Strategy strategy;
  int trial;
  TrialOutcome outcome;
};

struct ExperimentResult {
  std::vector<StrategySummary> summary;
  std::vector<TrialRecord> trials;
};

/// Every strategy sees the same fruit and seed for trial i, so cells differ
/// only in the controller. Requires >= 8 trials per cell.
ExperimentResult run_experiment(const std::vector<Population>& populations,
                                const std::vector<Strategy>& strategies, int trials_per_cell,
                                const TrialParams& params, std::uint64_t seed,
                                int max_retries = 5);

void write_trials_csv(std::ostream& os, const ExperimentResult& r);
void write_summary_csv(std::ostream& os, const ExperimentResult& r);

}  // namespace gelgrip::harvest
