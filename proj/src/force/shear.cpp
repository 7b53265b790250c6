#include "gelgrip/force/shear.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

#include <Eigen/QR>

#include "gelgrip/core/error.hpp"

namespace gelgrip::force {

ShearFeature shear_features(const DisplacementField& v, const HHDResult& hhd,
                            const ContactMask& mask) {
  if (mask.height() != v.grid.rows || mask.width() != v.grid.cols) {
    throw Error("contact mask is not sampled on the field grid");
  }
  if (mask.empty()) throw Error("shear features need a non-empty contact mask");
  double acc[6] = {0, 0, 0, 0, 0, 0};
  for (int r = 0; r < v.grid.rows; ++r) {
    for (int c = 0; c < v.grid.cols; ++c) {
      if (!mask.at(r, c)) continue;
      acc[0] += v.u(r, c);
      acc[1] += v.v(r, c);
      acc[2] += hhd.p.u(r, c);
      acc[3] += hhd.p.v(r, c);
      acc[4] += hhd.s.u(r, c);
      acc[5] += hhd.s.v(r, c);
    }
  }
  const double n = static_cast<double>(mask.count());
  for (double& a : acc) a /= n;
  return {acc[0], acc[1],
          acc[2], acc[2] * acc[2], acc[3], acc[3] * acc[3],
          acc[4], acc[4] * acc[4], acc[5], acc[5] * acc[5]};
}

ShearModel fit_shear_model(const std::vector<ShearFeature>& features,
                           const std::vector<Vec2>& labels_n) {
  if (features.size() != labels_n.size()) throw Error("feature and label counts differ");
  if (features.size() < 11) throw Error("shear fit needs at least 11 samples");
  const auto n = static_cast<Eigen::Index>(features.size());
  Eigen::MatrixXd a(n, 11);
  Eigen::MatrixXd y(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& f = features[static_cast<std::size_t>(i)];
    for (int k = 0; k < 10; ++k) a(i, k) = f[static_cast<std::size_t>(k)];
    a(i, 10) = 1.0;
    y(i, 0) = labels_n[static_cast<std::size_t>(i)].x;
    y(i, 1) = labels_n[static_cast<std::size_t>(i)].y;
  }
  // column scaling keeps the rank test meaningful when features differ in size
  Eigen::VectorXd scale = a.colwise().norm().transpose();
  for (Eigen::Index k = 0; k < scale.size(); ++k) {
    if (scale(k) == 0.0) throw Error("rank deficient: a shear feature is identically zero");
  }
  const Eigen::MatrixXd as = a * scale.cwiseInverse().asDiagonal();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(as);
  qr.setThreshold(1e-10);
  if (qr.rank() < 11) throw Error("rank deficient shear design matrix");
  const Eigen::MatrixXd w = scale.cwiseInverse().asDiagonal() * qr.solve(y);
  ShearModel m;
  for (int k = 0; k < 10; ++k) {
    m.wx[static_cast<std::size_t>(k)] = w(k, 0);
    m.wy[static_cast<std::size_t>(k)] = w(k, 1);
  }
  m.bx = w(10, 0);
  m.by = w(10, 1);
  if (!w.allFinite()) throw Error("shear fit is not finite");
  return m;
}

Vec2 predict_shear(const ShearFeature& x, const ShearModel& m) {
  Vec2 f{m.bx, m.by};
  for (std::size_t k = 0; k < x.size(); ++k) {
    f.x += m.wx[k] * x[k];
    f.y += m.wy[k] * x[k];
  }
  return f;
}

void save_shear_model(std::ostream& os, const ShearModel& m) {
  os << std::setprecision(std::numeric_limits<double>::max_digits10) << "shear_model\nwx";
  for (double w : m.wx) os << ' ' << w;
  os << "\nwy";
  for (double w : m.wy) os << ' ' << w;
  os << "\nb " << m.bx << ' ' << m.by << '\n';
}

ShearModel load_shear_model(std::istream& is) {
  std::string tag;
  ShearModel m;
  if (!(is >> tag) || tag != "shear_model") throw Error("malformed shear model header");
  if (!(is >> tag) || tag != "wx") throw Error("shear model: expected wx");
  for (double& w : m.wx) {
    if (!(is >> w)) throw Error("shear model: truncated wx");
  }
  if (!(is >> tag) || tag != "wy") throw Error("shear model: expected wy");
  for (double& w : m.wy) {
    if (!(is >> w)) throw Error("shear model: truncated wy");
  }
  if (!(is >> tag >> m.bx >> m.by) || tag != "b") throw Error("shear model: expected biases");
  return m;
}

}  // namespace gelgrip::force
