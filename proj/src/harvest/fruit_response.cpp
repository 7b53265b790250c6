#include <algorithm>

#include "gelgrip/core/error.hpp"
#include "gelgrip/harvest/harvest.hpp"

namespace gelgrip::harvest {

FruitState fruit_response(const FruitModel& fruit, double opening_mm, double pull_n) {
  if (opening_mm < 0.0) throw Error("gripper opening must be non-negative");
  if (pull_n < 0.0) throw Error("pull must be non-negative");
  FruitState s;
  s.contact_force_n = fruit.stiffness_n_per_mm * std::max(0.0, fruit.diameter_mm - opening_mm);
  const double capacity = 2.0 * fruit.friction * s.contact_force_n;
  if (pull_n > 0.0) s.slip_rate = std::max(0.0, pull_n - capacity) / pull_n;
  const double transmitted = std::min(pull_n, capacity);
  s.detached = s.contact_force_n > 0.0 && pull_n > 0.0 && transmitted >= fruit.detachment_force_n;
  s.bruised = s.contact_force_n > fruit.bruise_force_n;
  return s;
}

}  // namespace gelgrip::harvest
