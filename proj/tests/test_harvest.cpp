#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "gelgrip/core/error.hpp"
#include "gelgrip/harvest/harvest.hpp"

using namespace gelgrip;
using namespace gelgrip::harvest;

namespace {

FruitModel fruit(double diameter, double k, double detach, double bruise) {
  FruitModel f;
  f.diameter_mm = diameter;
  f.stiffness_n_per_mm = k;
  f.detachment_force_n = detach;
  f.bruise_force_n = bruise;
  return f;
}

TrialParams quiet() {
  TrialParams p;
  p.diameter_noise_mm = 0.0;
  p.current_noise = 0.0;
  p.marker_noise_px = 0.0;
  return p;
}

// Runs the controller from detect to the first hold.
GraspState to_hold(GraspState s, const StrategyConfig& cfg, double force_n = 10.0) {
  for (int i = 0; i < 100 && s.phase != Phase::kHoldPull; ++i) s = step_controller(s, {false, force_n}, cfg);
  return s;
}

constexpr Strategy kAll[] = {Strategy::kOpenLoop, Strategy::kSlip, Strategy::kSlipForce};

}  // namespace

TEST_CASE("fruit_response") {
  const FruitModel f = fruit(28.0, 0.8, 1.0, 4.0);
  SUBCASE("open fingers transmit nothing") {
    const FruitState s = fruit_response(f, 28.0, 2.0);
    CHECK(s.contact_force_n == 0.0);
    CHECK(s.slip_rate == 1.0);
    CHECK_FALSE(s.detached);
  }
  SUBCASE("squeeze, capacity and detachment") {
    const FruitState s = fruit_response(f, 26.0, 1.0);
    CHECK(s.contact_force_n == doctest::Approx(1.6));
    CHECK(s.slip_rate == 0.0);
    CHECK(s.detached);
    CHECK_FALSE(s.bruised);
    // capacity 2 * 0.6 * 0.8 = 0.96 N below a 2 N pull
    const FruitState weak = fruit_response(f, 27.0, 2.0);
    CHECK(weak.slip_rate == doctest::Approx(0.52));
    CHECK_FALSE(weak.detached);
  }
  SUBCASE("bruising above the bruise force") {
    CHECK(fruit_response(f, 22.0, 0.0).bruised);
    CHECK_FALSE(fruit_response(f, 23.5, 0.0).bruised);
  }
  SUBCASE("more squeeze never raises the slip rate") {
    for (double pull : {0.5, 1.0, 3.0, 9.0}) {
      double last = 2.0;
      for (double opening = 30.0; opening >= 20.0; opening -= 0.05) {
        const double rate = fruit_response(f, opening, pull).slip_rate;
        CHECK(rate <= last);
        last = rate;
      }
    }
  }
  SUBCASE("negative inputs") {
    CHECK_THROWS_AS(fruit_response(f, -1.0, 0.0), Error);
    CHECK_THROWS_AS(fruit_response(f, 10.0, -1.0), Error);
  }
}

TEST_CASE("step_controller") {
  SUBCASE("open loop ignores slip") {
    const auto cfg = StrategyConfig::defaults(Strategy::kOpenLoop, FruitType::kCherryTomato);
    GraspState s = to_hold(initial_state(28.0, cfg), cfg);
    CHECK(s.opening_mm == doctest::Approx(26.0));
    for (int i = 0; i < 20; ++i) {
      s = step_controller(s, {true, 1.0}, cfg);
      CHECK(s.phase == Phase::kHoldPull);
      CHECK(s.attempt == 1);
    }
  }
  SUBCASE("slip closes a further 2 mm on the next attempt") {
    const auto cfg = StrategyConfig::defaults(Strategy::kSlip, FruitType::kCherryTomato);
    GraspState s = to_hold(initial_state(28.0, cfg), cfg);
    CHECK(s.attempt == 1);
    s = step_controller(s, {true, 1.0}, cfg);
    CHECK(s.phase == Phase::kRetry);
    s = to_hold(s, cfg);
    CHECK(s.attempt == 2);
    CHECK(s.opening_mm == doctest::Approx(24.0));
  }
  SUBCASE("slip_force raises the command by 0.3 N per retry") {
    const auto cfg = StrategyConfig::defaults(Strategy::kSlipForce, FruitType::kCherryTomato);
    GraspState s = initial_state(28.0, cfg);
    std::vector<double> commands;
    for (int attempt = 0; attempt < 3; ++attempt) {
      s = to_hold(s, cfg);
      commands.push_back(s.commanded_force_n);
      s = step_controller(s, {true, 0.0}, cfg);
    }
    CHECK(commands[0] == doctest::Approx(1.2));
    CHECK(commands[1] == doctest::Approx(1.5));
    CHECK(commands[2] == doctest::Approx(1.8));
  }
  SUBCASE("slip_force keeps closing until the force is reached") {
    const auto cfg = StrategyConfig::defaults(Strategy::kSlipForce, FruitType::kCherryTomato);
    GraspState s = initial_state(28.0, cfg);
    for (int i = 0; i < 3; ++i) s = step_controller(s, {false, 0.0}, cfg);
    CHECK(s.phase == Phase::kClose);
    CHECK(s.opening_mm == doctest::Approx(29.8));
    s = step_controller(s, {false, 1.2}, cfg);
    CHECK(s.phase == Phase::kHoldPull);
  }
  SUBCASE("attempts are capped and done is absorbing") {
    auto cfg = StrategyConfig::defaults(Strategy::kSlip, FruitType::kCherryTomato);
    cfg.max_retries = 3;
    GraspState s = initial_state(28.0, cfg);
    for (int i = 0; i < 200; ++i) {
      s = step_controller(s, {true, 0.5}, cfg);
      CHECK(s.attempt <= 3);
    }
    CHECK(s.phase == Phase::kDone);
    CHECK(s.gave_up);
    CHECK(step_controller(s, {false, 9.0}, cfg).peak_force_n == s.peak_force_n);
  }
  SUBCASE("strawberry uses a stronger schedule") {
    const auto cfg = StrategyConfig::defaults(Strategy::kSlipForce, FruitType::kStrawberry);
    CHECK(cfg.initial_force_n == 2.0);
    CHECK(cfg.force_increment_n == 1.0);
  }
  SUBCASE("config validation") {
    StrategyConfig cfg;
    cfg.max_retries = 0;
    CHECK_THROWS_AS(cfg.validate(), Error);
    CHECK_THROWS_AS(strategy_from_string("gentle"), Error);
    for (Strategy s : kAll) CHECK(strategy_from_string(to_string(s)) == s);
  }
}

TEST_CASE("run_trial") {
  const TrialParams p = quiet();
  SUBCASE("a loose stem comes off at the first attempt") {
    for (Strategy s : kAll) {
      const auto out = run_trial(fruit(28.0, 0.8, 0.0, 4.0), StrategyConfig::defaults(s, FruitType::kCherryTomato), p, 1);
      CHECK(out.success);
      CHECK(out.attempts == 1);
    }
  }
  SUBCASE("a fruit that bruises before it detaches") {
    const FruitModel f = fruit(28.0, 1.5, 3.0, 2.5);
    const auto open = run_trial(f, StrategyConfig::defaults(Strategy::kOpenLoop, FruitType::kCherryTomato), p, 1);
    CHECK_FALSE(open.success);
    CHECK(open.failure == FailureMode::kBruise);
    auto cfg = StrategyConfig::defaults(Strategy::kSlipForce, FruitType::kCherryTomato);
    cfg.max_retries = 2;
    cfg.close_step_mm = 0.1;
    const auto forced = run_trial(f, cfg, p, 1);
    CHECK_FALSE(forced.success);
    CHECK(forced.failure == FailureMode::kMaxRetries);
    CHECK(forced.attempts == 2);
    CHECK(forced.peak_contact_force_n < f.bruise_force_n);
  }
  SUBCASE("an easy fruit needs one force-controlled attempt") {
    const auto out = run_trial(fruit(28.0, 0.8, 1.0, 4.0),
                               StrategyConfig::defaults(Strategy::kSlipForce, FruitType::kCherryTomato), p, 3);
    CHECK(out.success);
    CHECK(out.attempts == 1);
  }
  SUBCASE("seeded trials are reproducible") {
    const TrialParams noisy;
    const FruitModel f = fruit(27.0, 0.9, 1.8, 4.0);
    for (Strategy s : kAll) {
      const auto cfg = StrategyConfig::defaults(s, FruitType::kCherryTomato);
      const auto a = run_trial(f, cfg, noisy, 77), b = run_trial(f, cfg, noisy, 77);
      CHECK(a.success == b.success);
      CHECK(a.attempts == b.attempts);
      CHECK(a.force_trace == b.force_trace);
    }
  }
  SUBCASE("population invariants") {
    Rng rng(5);
    const Population pop = Population::defaults(FruitType::kCherryTomato);
    for (int i = 0; i < 60; ++i) {
      const FruitModel f = pop.sample(rng);
      for (Strategy s : kAll) {
        const auto cfg = StrategyConfig::defaults(s, FruitType::kCherryTomato);
        const auto out = run_trial(f, cfg, TrialParams{}, 100 + i);
        CHECK(out.attempts >= 1);
        CHECK(out.attempts <= cfg.max_retries);
        if (out.success) CHECK(out.peak_contact_force_n <= f.bruise_force_n);
        CHECK(out.success == (out.failure == FailureMode::kNone));
        if (s == Strategy::kOpenLoop) CHECK(out.attempts == 1);
        if (s == Strategy::kSlipForce) {
          // closing stops within one step of the command when sensing is exact
          const auto exact = run_trial(f, cfg, p, 100 + i);
          CHECK(exact.peak_contact_force_n <= exact.commanded_force_n + f.stiffness_n_per_mm * cfg.close_step_mm + 1e-9);
        }
      }
    }
  }
}

TEST_CASE("run_experiment") {
  const std::vector<Population> pops{Population::defaults(FruitType::kCherryTomato)};
  const std::vector<Strategy> all(std::begin(kAll), std::end(kAll));
  const auto r = run_experiment(pops, all, 50, TrialParams{}, 7);
  REQUIRE(r.summary.size() == 3);
  const auto& open = r.summary[0];
  const auto& slip = r.summary[1];
  const auto& force = r.summary[2];
  CHECK(force.success_rate >= slip.success_rate);
  CHECK(slip.success_rate >= open.success_rate);
  CHECK(force.force_var_n2 < slip.force_var_n2);
  CHECK(force.mean_attempts >= slip.mean_attempts);
  CHECK(r.trials.size() == 150);
  SUBCASE("csv output") {
    std::ostringstream a, b;
    write_summary_csv(a, r);
    write_trials_csv(b, r);
    CHECK(a.str().rfind("fruit,strategy,", 0) == 0);
    const std::string rows = b.str();
    CHECK(std::count(rows.begin(), rows.end(), '\n') == 151);
  }
  CHECK_THROWS_AS(run_experiment(pops, all, 7, TrialParams{}, 7), Error);
}
