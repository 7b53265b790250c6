#include "gelgrip/force/metrics.hpp"

#include <cmath>

#include "gelgrip/core/error.hpp"

namespace gelgrip::force {

namespace {

void check(const std::vector<double>& t, const std::vector<double>& p) {
  if (t.size() != p.size()) throw Error("truth and prediction lengths differ");
  if (t.empty()) throw Error("metrics need at least one sample");
}

}  // namespace

double r_squared(const std::vector<double>& truth, const std::vector<double>& predicted) {
  check(truth, predicted);
  double mean = 0.0;
  for (double t : truth) mean += t;
  mean /= static_cast<double>(truth.size());
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    ss_res += (truth[i] - predicted[i]) * (truth[i] - predicted[i]);
    ss_tot += (truth[i] - mean) * (truth[i] - mean);
  }
  if (ss_tot == 0.0) throw Error("R^2 undefined for constant truth");
  return 1.0 - ss_res / ss_tot;
}

double mape(const std::vector<double>& truth, const std::vector<double>& predicted) {
  check(truth, predicted);
  double acc = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] == 0.0) throw Error("MAPE undefined for zero truth");
    acc += std::abs((truth[i] - predicted[i]) / truth[i]);
  }
  return acc / static_cast<double>(truth.size());
}

}  // namespace gelgrip::force
