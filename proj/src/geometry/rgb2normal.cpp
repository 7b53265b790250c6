#include "gelgrip/geometry/rgb2normal.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "gelgrip/core/error.hpp"

namespace gelgrip::geometry {

namespace {

Eigen::MatrixXd xavier(int rows, int cols, Rng& rng) {
  const double a = std::sqrt(6.0 / (rows + cols));
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = uniform(rng, -a, a);
  }
  return m;
}

template <typename Fn>
void for_each_block(Fn&& fn, Eigen::MatrixXd& w1, Eigen::VectorXd& b1, Eigen::MatrixXd& w2,
                    Eigen::VectorXd& b2, Eigen::MatrixXd& w3, Eigen::VectorXd& b3) {
  fn(w1.data(), w1.size());
  fn(b1.data(), b1.size());
  fn(w2.data(), w2.size());
  fn(b2.data(), b2.size());
  fn(w3.data(), w3.size());
  fn(b3.data(), b3.size());
}

}  // namespace

Rgb2NormalModel Rgb2NormalModel::random(Rng& rng) {
  Rgb2NormalModel m;
  m.w1_ = xavier(kHidden, kIn, rng);
  m.b1_ = Eigen::VectorXd::Zero(kHidden);
  m.w2_ = xavier(kHidden, kHidden, rng);
  m.b2_ = Eigen::VectorXd::Zero(kHidden);
  m.w3_ = xavier(kOut, kHidden, rng) * 0.1;
  m.b3_ = Eigen::VectorXd::Zero(kOut);
  return m;
}

Eigen::MatrixXd Rgb2NormalModel::predict_batch(const Eigen::MatrixXd& x) const {
  const Eigen::MatrixXd a1 = ((w1_ * x).colwise() + b1_).array().tanh().matrix();
  const Eigen::MatrixXd a2 = ((w2_ * a1).colwise() + b2_).array().tanh().matrix();
  const Eigen::MatrixXd o = (w3_ * a2).colwise() + b3_;
  Eigen::MatrixXd n(3, x.cols());
  for (Eigen::Index i = 0; i < x.cols(); ++i) {
    const double g = 1.0 / std::sqrt(1.0 + o(0, i) * o(0, i) + o(1, i) * o(1, i));
    n(0, i) = o(0, i) * g;
    n(1, i) = o(1, i) * g;
    n(2, i) = g;
  }
  return n;
}

Eigen::Vector3d Rgb2NormalModel::predict(const PixelInput& in) const {
  Eigen::MatrixXd x(kIn, 1);
  for (int i = 0; i < kIn; ++i) x(i, 0) = in[static_cast<std::size_t>(i)];
  return predict_batch(x).col(0);
}

int Rgb2NormalModel::parameter_count() const {
  return static_cast<int>(w1_.size() + b1_.size() + w2_.size() + b2_.size() + w3_.size() +
                          b3_.size());
}

Eigen::VectorXd Rgb2NormalModel::parameters() const {
  Eigen::VectorXd p(parameter_count());
  Eigen::Index k = 0;
  auto copy = [&](double* d, Eigen::Index n) {
    std::copy(d, d + n, p.data() + k);
    k += n;
  };
  auto self = *this;
  for_each_block(copy, self.w1_, self.b1_, self.w2_, self.b2_, self.w3_, self.b3_);
  return p;
}

void Rgb2NormalModel::set_parameters(const Eigen::VectorXd& p) {
  if (p.size() != parameter_count()) throw Error("parameter vector has the wrong length");
  Eigen::Index k = 0;
  auto copy = [&](double* d, Eigen::Index n) {
    std::copy(p.data() + k, p.data() + k + n, d);
    k += n;
  };
  for_each_block(copy, w1_, b1_, w2_, b2_, w3_, b3_);
}

double Rgb2NormalModel::loss(const Eigen::MatrixXd& x, const Eigen::MatrixXd& target,
                             Eigen::VectorXd* grad) const {
  const Eigen::Index n = x.cols();
  if (n == 0) throw Error("empty calibration batch");
  const Eigen::MatrixXd a1 = ((w1_ * x).colwise() + b1_).array().tanh().matrix();
  const Eigen::MatrixXd a2 = ((w2_ * a1).colwise() + b2_).array().tanh().matrix();
  const Eigen::MatrixXd o = (w3_ * a2).colwise() + b3_;

  double total = 0.0;
  Eigen::MatrixXd d_o(kOut, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double ox = o(0, i), oy = o(1, i);
    const double g = 1.0 / std::sqrt(1.0 + ox * ox + oy * oy);
    const Eigen::Vector3d u(ox, oy, 1.0);
    const Eigen::Vector3d e = u * g - target.col(i);
    total += e.squaredNorm();
    // d|e|^2/dn = 2e; dn_j/do_k = delta_jk g - u_j o_k g^3
    const Eigen::Vector3d dn = 2.0 * e / static_cast<double>(n);
    const double ud = dn.dot(u);
    d_o(0, i) = g * dn(0) - ox * g * g * g * ud;
    d_o(1, i) = g * dn(1) - oy * g * g * g * ud;
  }
  const double loss = total / static_cast<double>(n);
  if (grad == nullptr) return loss;

  const Eigen::MatrixXd gw3 = d_o * a2.transpose();
  const Eigen::VectorXd gb3 = d_o.rowwise().sum();
  const Eigen::MatrixXd d_z2 =
      ((w3_.transpose() * d_o).array() * (1.0 - a2.array().square())).matrix();
  const Eigen::MatrixXd gw2 = d_z2 * a1.transpose();
  const Eigen::VectorXd gb2 = d_z2.rowwise().sum();
  const Eigen::MatrixXd d_z1 =
      ((w2_.transpose() * d_z2).array() * (1.0 - a1.array().square())).matrix();
  const Eigen::MatrixXd gw1 = d_z1 * x.transpose();
  const Eigen::VectorXd gb1 = d_z1.rowwise().sum();

  grad->resize(parameter_count());
  Eigen::Index k = 0;
  auto append = [&](const auto& m) {
    std::copy(m.data(), m.data() + m.size(), grad->data() + k);
    k += m.size();
  };
  append(gw1);
  append(gb1);
  append(gw2);
  append(gb2);
  append(gw3);
  append(gb3);
  return loss;
}

void Rgb2NormalModel::save(std::ostream& os) const {
  os << "rgb2normal " << kIn << ' ' << kHidden << ' ' << kHidden << ' ' << kOut << '\n';
  os << std::setprecision(std::numeric_limits<double>::max_digits10);
  const Eigen::VectorXd p = parameters();
  for (Eigen::Index i = 0; i < p.size(); ++i) os << p(i) << ((i + 1) % 8 == 0 ? '\n' : ' ');
  os << '\n';
  if (!os) throw Error("failed to write rgb2normal model");
}

Rgb2NormalModel Rgb2NormalModel::load(std::istream& is) {
  std::string tag;
  int a = 0, b = 0, c = 0, d = 0;
  if (!(is >> tag >> a >> b >> c >> d) || tag != "rgb2normal") {
    throw Error("not an rgb2normal model file");
  }
  if (a != kIn || b != kHidden || c != kHidden || d != kOut) {
    throw Error("rgb2normal layer sizes do not match 5 32 32 2");
  }
  Rng rng(0);
  Rgb2NormalModel m = random(rng);
  Eigen::VectorXd p(m.parameter_count());
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (!(is >> p(i))) throw Error("rgb2normal model truncated");
    if (!std::isfinite(p(i))) throw Error("rgb2normal model holds a non-finite weight");
  }
  m.set_parameters(p);
  return m;
}

void Rgb2NormalModel::save(const std::string& path) const {
  std::ofstream f(path);
  if (!f) throw Error("cannot open " + path + " for writing");
  save(f);
}

Rgb2NormalModel Rgb2NormalModel::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error("cannot open " + path);
  return load(f);
}

CalibrationMatrices to_matrices(const CalibrationDataset& data) {
  const auto n = static_cast<Eigen::Index>(data.samples.size());
  CalibrationMatrices m{Eigen::MatrixXd(Rgb2NormalModel::kIn, n), Eigen::MatrixXd(3, n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& s = data.samples[static_cast<std::size_t>(i)];
    for (int k = 0; k < Rgb2NormalModel::kIn; ++k) m.inputs(k, i) = s.input[static_cast<std::size_t>(k)];
    m.normals.col(i) = s.normal;
  }
  return m;
}

FitResult fit_rgb2normal(const CalibrationDataset& data, const FitOptions& opt) {
  if (data.samples.empty()) throw Error("calibration dataset is empty");
  if (opt.epochs < 0) throw Error("epochs must be non-negative");
  if (!(opt.learning_rate > 0.0)) throw Error("learning rate must be positive");
  const CalibrationMatrices m = to_matrices(data);
  Rng rng(opt.seed);
  FitResult r{Rgb2NormalModel::random(rng), {}, 0.0};

  Eigen::VectorXd p = r.model.parameters();
  Eigen::VectorXd grad, m1 = Eigen::VectorXd::Zero(p.size()), m2 = m1;
  constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kEps = 1e-8;
  for (int epoch = 0; epoch < opt.epochs; ++epoch) {
    const double loss = r.model.loss(m.inputs, m.normals, &grad);
    if (!std::isfinite(loss) || !grad.allFinite()) throw Error("diverged; reduce learning rate");
    r.loss_history.push_back(loss);
    if (opt.optimizer == Optimizer::kGradientDescent) {
      p -= opt.learning_rate * grad;
    } else {
      m1 = kBeta1 * m1 + (1.0 - kBeta1) * grad;
      m2 = kBeta2 * m2 + (1.0 - kBeta2) * grad.cwiseProduct(grad);
      const double c1 = 1.0 - std::pow(kBeta1, epoch + 1);
      const double c2 = 1.0 - std::pow(kBeta2, epoch + 1);
      p.array() -= opt.learning_rate * (m1.array() / c1) / ((m2.array() / c2).sqrt() + kEps);
    }
    if (!p.allFinite()) throw Error("diverged; reduce learning rate");
    r.model.set_parameters(p);
  }
  r.final_loss = r.model.loss(m.inputs, m.normals);
  if (!std::isfinite(r.final_loss)) throw Error("diverged; reduce learning rate");
  r.loss_history.push_back(r.final_loss);
  return r;
}

NormalMap predict_normals(const DiffFrame& frame, const Rgb2NormalModel& model) {
  const int w = frame.width(), h = frame.height();
  Eigen::MatrixXd x(Rgb2NormalModel::kIn, static_cast<Eigen::Index>(w) * h);
  for (int y = 0; y < h; ++y) {
    for (int c = 0; c < w; ++c) {
      const PixelInput in = pixel_input(frame, y, c);
      for (int k = 0; k < Rgb2NormalModel::kIn; ++k) {
        x(k, static_cast<Eigen::Index>(y) * w + c) = in[static_cast<std::size_t>(k)];
      }
    }
  }
  const Eigen::MatrixXd n = model.predict_batch(x);
  Grid nx(h, w), ny(h, w), nz(h, w);
  for (int y = 0; y < h; ++y) {
    for (int c = 0; c < w; ++c) {
      const Eigen::Index i = static_cast<Eigen::Index>(y) * w + c;
      nx(y, c) = n(0, i);
      ny(y, c) = n(1, i);
      nz(y, c) = n(2, i);
    }
  }
  return NormalMap(std::move(nx), std::move(ny), std::move(nz));
}

double angular_error_deg(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  const double c = std::clamp(a.normalized().dot(b.normalized()), -1.0, 1.0);
  return std::acos(c) * 180.0 / std::numbers::pi;
}

}  // namespace gelgrip::geometry
