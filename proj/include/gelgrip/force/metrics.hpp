#pragma once

#include <vector>

namespace gelgrip::force {

/// Coefficient of determination 1 - SS_res / SS_tot.
double r_squared(const std::vector<double>& truth, const std::vector<double>& predicted);

/// Mean absolute percentage error as a fraction (0.03 == 3%). Truth values
/// must be non-zero.
double mape(const std::vector<double>& truth, const std::vector<double>& predicted);

}  // namespace gelgrip::force
