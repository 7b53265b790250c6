#include <algorithm>
#include <ostream>

#include "gelgrip/core/error.hpp"
#include "gelgrip/harvest/harvest.hpp"

namespace gelgrip::harvest {

Population Population::defaults(FruitType t) {
  Population p;
  p.type = t;
  if (t == FruitType::kStrawberry) {
    p.diameter_min_mm = 25.0;
    p.diameter_max_mm = 35.0;
    p.stiffness_mean = 0.9;
    p.detach_min_n = 1.8;
    p.detach_max_n = 4.0;
    p.bruise_min_n = 5.5;
    p.bruise_max_n = 7.5;
    p.stem_stiffness = 2.0;
  } else if (t == FruitType::kRaspberry) {
    p.diameter_mean_mm = 22.0;
    p.diameter_sd_mm = 1.5;
    p.stiffness_mean = 0.5;
    p.detach_min_n = 0.8;
    p.detach_max_n = 1.6;
    p.bruise_min_n = 2.0;
    p.bruise_max_n = 3.0;
  }
  return p;
}

FruitModel Population::sample(Rng& rng) const {
  FruitModel f;
  f.type = type;
  f.diameter_mm = diameter_max_mm > diameter_min_mm
                      ? uniform(rng, diameter_min_mm, diameter_max_mm)
                      : std::max(5.0, normal(rng, diameter_mean_mm, diameter_sd_mm));
  f.stiffness_n_per_mm = std::max(0.1, normal(rng, stiffness_mean, stiffness_sd));
  f.detachment_force_n = uniform(rng, detach_min_n, detach_max_n);
  f.bruise_force_n = uniform(rng, bruise_min_n, bruise_max_n);
  f.friction = friction;
  f.stem_stiffness = stem_stiffness;
  return f;
}

ExperimentResult run_experiment(const std::vector<Population>& populations,
                                const std::vector<Strategy>& strategies, int trials_per_cell,
                                const TrialParams& params, std::uint64_t seed,
                                int max_retries) {
  if (trials_per_cell < 8) throw Error("need at least 8 trials per strategy and fruit");
  if (populations.empty() || strategies.empty()) throw Error("nothing to run");
  ExperimentResult r;
  for (std::size_t pi = 0; pi < populations.size(); ++pi) {
    const Population& pop = populations[pi];
    std::vector<FruitModel> fruits;
    Rng fruit_rng = derive_rng(seed, 2 * pi);
    for (int t = 0; t < trials_per_cell; ++t) fruits.push_back(pop.sample(fruit_rng));
    Rng seed_rng = derive_rng(seed, 2 * pi + 1);
    std::vector<std::uint64_t> seeds;
    for (int t = 0; t < trials_per_cell; ++t) seeds.push_back(seed_rng());

    for (Strategy s : strategies) {
      StrategyConfig cfg = StrategyConfig::defaults(s, pop.type);
      cfg.max_retries = max_retries;
      StrategySummary sum{std::string(sim::to_string(pop.type)), s, trials_per_cell};
      double succ = 0.0, att = 0.0, f = 0.0, f2 = 0.0;
      for (int t = 0; t < trials_per_cell; ++t) {
        TrialOutcome o = run_trial(fruits[t], cfg, params, seeds[t]);
        succ += o.success;
        att += o.attempts;
        f += o.peak_force_n;
        f2 += o.peak_force_n * o.peak_force_n;
        r.trials.push_back({sum.fruit, s, t, std::move(o)});
      }
      const double n = trials_per_cell;
      sum.success_rate = succ / n;
      sum.mean_attempts = att / n;
      sum.force_mean_n = f / n;
      sum.force_var_n2 = std::max(0.0, (f2 - f * f / n) / (n - 1.0));
      r.summary.push_back(sum);
    }
  }
  return r;
}

void write_trials_csv(std::ostream& os, const ExperimentResult& r) {
  os << "fruit,strategy,trial,success,failure,attempts,peak_force_n\n";
  for (const TrialRecord& t : r.trials) {
    os << t.fruit << ',' << to_string(t.strategy) << ',' << t.trial << ','
       << (t.outcome.success ? 1 : 0) << ',' << to_string(t.outcome.failure) << ','
       << t.outcome.attempts << ',' << t.outcome.peak_force_n << '\n';
  }
}

void write_summary_csv(std::ostream& os, const ExperimentResult& r) {
  os << "fruit,strategy,trials,success_rate,mean_attempts,force_mean_n,force_var_n2\n";
  for (const StrategySummary& s : r.summary) {
    os << s.fruit << ',' << to_string(s.strategy) << ',' << s.trials << ',' << s.success_rate
       << ',' << s.mean_attempts << ',' << s.force_mean_n << ',' << s.force_var_n2 << '\n';
  }
}

}  // namespace gelgrip::harvest
