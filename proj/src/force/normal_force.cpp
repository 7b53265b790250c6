#include "gelgrip/force/normal_force.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>

#include "gelgrip/core/error.hpp"

namespace gelgrip::force {

NormalForceModel fit_normal_force(const std::vector<double>& current,
                                  const std::vector<double>& force_n) {
  if (current.size() != force_n.size()) throw Error("current and force lengths differ");
  if (current.size() < 2) throw Error("rank deficient: need at least two samples");
  const double n = static_cast<double>(current.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < current.size(); ++i) {
    mx += current[i];
    my += force_n[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < current.size(); ++i) {
    sxx += (current[i] - mx) * (current[i] - mx);
    sxy += (current[i] - mx) * (force_n[i] - my);
  }
  if (!(sxx > 0.0)) throw Error("rank deficient: all currents are identical");
  NormalForceModel m;
  m.slope = sxy / sxx;
  m.intercept = my - m.slope * mx;
  m.fitted = std::isfinite(m.slope) && std::isfinite(m.intercept);
  if (!m.fitted) throw Error("normal force fit is not finite");
  return m;
}

double predict_normal_force(double current, const NormalForceModel& model) {
  if (!model.fitted) throw Error("normal force model is not fitted");
  return model.slope * current + model.intercept;
}

void save_normal_force(std::ostream& os, const NormalForceModel& m) {
  if (!m.fitted) throw Error("refusing to save an unfitted normal force model");
  os << std::setprecision(std::numeric_limits<double>::max_digits10)
     << "normal_force slope " << m.slope << " intercept " << m.intercept << '\n';
}

NormalForceModel load_normal_force(std::istream& is) {
  std::string tag, k1, k2;
  NormalForceModel m;
  if (!(is >> tag >> k1 >> m.slope >> k2 >> m.intercept) || tag != "normal_force" ||
      k1 != "slope" || k2 != "intercept") {
    throw Error("malformed normal force model");
  }
  m.fitted = true;
  return m;
}

}  // namespace gelgrip::force
