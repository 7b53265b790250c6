#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gelgrip::force {

/// F_n = slope * I + intercept.
struct NormalForceModel {
  double slope = 0.0;      // N per current unit
  double intercept = 0.0;  // N
  bool fitted = false;
};

/// Ordinary least squares of force on current. Throws "rank deficient" when
/// all currents coincide.
NormalForceModel fit_normal_force(const std::vector<double>& current,
                                  const std::vector<double>& force_n);

/// Throws when the model was never fitted.
double predict_normal_force(double current, const NormalForceModel& model);

void save_normal_force(std::ostream& os, const NormalForceModel& m);
NormalForceModel load_normal_force(std::istream& is);

}  // namespace gelgrip::force
