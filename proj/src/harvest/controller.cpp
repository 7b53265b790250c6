#include <algorithm>
#include <string>

#include "gelgrip/core/error.hpp"
#include "gelgrip/harvest/harvest.hpp"

namespace gelgrip::harvest {

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::kOpenLoop: return "open_loop";
    case Strategy::kSlip: return "slip";
    case Strategy::kSlipForce: return "slip_force";
  }
  return "?";
}

Strategy strategy_from_string(std::string_view s) {
  if (s == "open_loop") return Strategy::kOpenLoop;
  if (s == "slip") return Strategy::kSlip;
  if (s == "slip_force") return Strategy::kSlipForce;
  throw Error("unknown strategy '" + std::string(s) + "'");
}

std::string_view to_string(Phase p) {
  switch (p) {
    case Phase::kDetect: return "detect";
    case Phase::kApproach: return "approach";
    case Phase::kClose: return "close";
    case Phase::kHoldPull: return "hold_pull";
    case Phase::kRetry: return "retry";
    case Phase::kDone: return "done";
  }
  return "?";
}

StrategyConfig StrategyConfig::defaults(Strategy s, FruitType fruit) {
  StrategyConfig c;
  c.strategy = s;
  if (fruit == FruitType::kStrawberry) {
    c.initial_force_n = 2.0;
    c.force_increment_n = 1.0;
  }
  return c;
}

void StrategyConfig::validate() const {
  if (close_margin_mm < 0.0) throw Error("close margin must be non-negative");
  if (!(retry_increment_mm > 0.0)) throw Error("retry increment must be positive");
  if (!(force_increment_n > 0.0)) throw Error("force increment must be positive");
  if (!(initial_force_n > 0.0)) throw Error("initial force must be positive");
  if (max_retries < 1) throw Error("max retries must be at least 1");
  if (!(close_step_mm > 0.0)) throw Error("close step must be positive");
}

GraspState initial_state(double measured_diameter_mm, const StrategyConfig& cfg) {
  cfg.validate();
  GraspState s;
  s.target_diameter_mm = measured_diameter_mm;
  s.commanded_force_n = cfg.initial_force_n;
  return s;
}

GraspState step_controller(const GraspState& state, const Percepts& percepts,
                           const StrategyConfig& cfg) {
  GraspState s = state;
  s.peak_force_n = std::max(s.peak_force_n, percepts.force_n);
  switch (state.phase) {
    case Phase::kDone:
      return state;
    case Phase::kDetect:
      s.phase = Phase::kApproach;
      break;
    case Phase::kApproach:
      // pre-grasp just outside the perceived fruit
      s.opening_mm = std::clamp(s.target_diameter_mm + cfg.close_margin_mm, 0.0, 40.0);
      s.attempt = 1;
      s.phase = Phase::kClose;
      break;
    case Phase::kClose:
      if (cfg.strategy == Strategy::kSlipForce) {
        if (percepts.force_n >= s.commanded_force_n) {
          s.phase = Phase::kHoldPull;
        } else {
          s.opening_mm = std::max(0.0, s.opening_mm - cfg.close_step_mm);
        }
      } else {
        const double extra = cfg.strategy == Strategy::kSlip
                                 ? (s.attempt - 1) * cfg.retry_increment_mm
                                 : 0.0;
        s.opening_mm = std::max(0.0, s.target_diameter_mm - cfg.close_margin_mm - extra);
        s.phase = Phase::kHoldPull;
      }
      break;
    case Phase::kHoldPull:
      if (percepts.slip && cfg.strategy != Strategy::kOpenLoop) {
        if (s.attempt >= cfg.max_retries) {
          s.gave_up = true;
          s.phase = Phase::kDone;
        } else {
          s.phase = Phase::kRetry;
        }
      }
      break;
    case Phase::kRetry:
      ++s.attempt;
      if (cfg.strategy == Strategy::kSlipForce) s.commanded_force_n += cfg.force_increment_n;
      s.phase = Phase::kClose;
      break;
  }
  return s;
}

}  // namespace gelgrip::harvest
