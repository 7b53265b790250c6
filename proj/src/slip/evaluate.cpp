#include "gelgrip/core/error.hpp"
#include "gelgrip/slip/slip.hpp"

namespace gelgrip::slip {

SlipSummary evaluate_slip_detector(const std::vector<std::vector<bool>>& predictions,
                                   const std::vector<std::vector<bool>>& truth, double fps) {
  if (predictions.size() != truth.size()) throw Error("prediction and truth trial counts differ");
  if (!(fps > 0.0)) throw Error("fps must be positive");
  SlipSummary s;
  double lead_sum = 0.0;
  int lead_n = 0;
  for (std::size_t t = 0; t < truth.size(); ++t) {
    const auto& p = predictions[t];
    const auto& g = truth[t];
    if (p.size() != g.size()) throw Error("prediction and truth series are not aligned");
    int first_pred = -1, first_true = -1;
    bool hit = false;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (p[i] && g[i]) ++s.true_positives, hit = true;
      if (p[i] && !g[i]) ++s.false_positives;
      if (!p[i] && g[i]) ++s.false_negatives;
      if (p[i] && first_pred < 0) first_pred = static_cast<int>(i);
      if (g[i] && first_true < 0) first_true = static_cast<int>(i);
    }
    if (hit) {
      lead_sum += (first_true - first_pred) / fps;
      ++lead_n;
    }
  }
  const int tp = s.true_positives;
  s.precision = tp + s.false_positives == 0 ? 1.0 : double(tp) / (tp + s.false_positives);
  s.recall = tp + s.false_negatives == 0 ? 1.0 : double(tp) / (tp + s.false_negatives);
  s.f1 = s.precision + s.recall == 0.0 ? 0.0
                                       : 2.0 * s.precision * s.recall / (s.precision + s.recall);
  if (lead_n > 0) s.mean_lead_time_s = lead_sum / lead_n;
  return s;
}

}  // namespace gelgrip::slip
