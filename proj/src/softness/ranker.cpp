#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>

#include "gelgrip/core/error.hpp"
#include "gelgrip/softness/ranker.hpp"

namespace gelgrip::softness {

namespace {

Eigen::MatrixXd random_matrix(int rows, int cols, double scale, Rng& rng) {
  const double a = scale * std::sqrt(3.0 / cols);
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = uniform(rng, -a, a);
  }
  return m;
}

}  // namespace

struct RankerLayout {
  struct Forward {
    Eigen::MatrixXd h, q, k, v, att, z, g;
  };

  static Forward run(const RankerModel& m, const ClipTensor& c) {
    Forward f;
    Eigen::MatrixXd pre = c.patches * m.we_.transpose();
    pre.rowwise() += m.be_.transpose();
    pre += m.pos_;
    f.h = pre.array().tanh().matrix();
    f.q = f.h * m.wq_.transpose();
    f.k = f.h * m.wk_.transpose();
    f.v = f.h * m.wv_.transpose();
    Eigen::MatrixXd s = f.q * f.k.transpose() / std::sqrt(static_cast<double>(kFrameDim));
    f.att.resize(s.rows(), s.cols());
    for (Eigen::Index i = 0; i < s.rows(); ++i) {
      const double mx = s.row(i).maxCoeff();
      const Eigen::RowVectorXd e = (s.row(i).array() - mx).exp().matrix();
      f.att.row(i) = e / e.sum();
    }
    f.z = f.att * f.v;
    Eigen::MatrixXd gp = c.force * m.wf_.transpose();
    gp.rowwise() += m.bf_.transpose();
    f.g = gp.array().tanh().matrix();
    return f;
  }

  template <typename Fn>
  static void blocks(RankerModel& m, Fn&& fn) {
    fn(m.we_.data(), m.we_.size());
    fn(m.be_.data(), m.be_.size());
    fn(m.pos_.data(), m.pos_.size());
    fn(m.wq_.data(), m.wq_.size());
    fn(m.wk_.data(), m.wk_.size());
    fn(m.wv_.data(), m.wv_.size());
    fn(m.wf_.data(), m.wf_.size());
    fn(m.bf_.data(), m.bf_.size());
    fn(m.a_.data(), m.a_.size());
    fn(&m.b_, 1);
  }
};

RankerModel RankerModel::random(Rng& rng, double scale) {
  RankerModel m;
  m.we_ = random_matrix(kFrameDim, kPatch * kPatch, scale, rng);
  m.be_ = Eigen::VectorXd::Zero(kFrameDim);
  m.pos_ = random_matrix(kClipFrames, kFrameDim, 0.1 * scale, rng);
  m.wq_ = random_matrix(kFrameDim, kFrameDim, scale, rng);
  m.wk_ = random_matrix(kFrameDim, kFrameDim, scale, rng);
  m.wv_ = random_matrix(kFrameDim, kFrameDim, scale, rng);
  m.wf_ = random_matrix(kForceDim, 1, scale, rng).col(0);
  m.bf_ = random_matrix(kForceDim, 1, 0.5 * scale, rng).col(0);
  m.a_ = Eigen::MatrixXd::Zero(kEmbedDim, kEmbedDim);
  m.b_ = 0.0;
  return m;
}

Eigen::VectorXd RankerModel::encode(const ClipTensor& clip) const {
  if (clip.patches.rows() != kClipFrames || clip.patches.cols() != kPatch * kPatch ||
      clip.force.size() != kClipFrames) {
    throw Error("clip tensor has the wrong shape");
  }
  const auto f = RankerLayout::run(*this, clip);
  Eigen::VectorXd e(kEmbedDim);
  e.head(kFrameDim) = f.z.colwise().mean().transpose();
  e.tail(kForceDim) = f.g.colwise().mean().transpose();
  return e;
}

double RankerModel::compare(const Eigen::VectorXd& ea, const Eigen::VectorXd& eb) const {
  if (ea.size() != kEmbedDim || eb.size() != kEmbedDim) throw Error("embedding has the wrong size");
  return ea.dot(w() * eb) + b_;
}

double compare_pair(const Eigen::VectorXd& ea, const Eigen::VectorXd& eb, const RankerModel& m) {
  return m.compare(ea, eb);
}

void RankerModel::set_comparator(const Eigen::MatrixXd& a) {
  if (a.rows() != kEmbedDim || a.cols() != kEmbedDim) throw Error("comparator must be D x D");
  a_ = a;
}

int RankerModel::parameter_count() const {
  return static_cast<int>(we_.size() + be_.size() + pos_.size() + wq_.size() + wk_.size() +
                          wv_.size() + wf_.size() + bf_.size() + a_.size() + 1);
}

Eigen::VectorXd RankerModel::parameters() const {
  Eigen::VectorXd p(parameter_count());
  Eigen::Index k = 0;
  RankerModel copy = *this;
  RankerLayout::blocks(copy, [&](double* d, Eigen::Index n) {
    std::copy(d, d + n, p.data() + k);
    k += n;
  });
  return p;
}

void RankerModel::set_parameters(const Eigen::VectorXd& p) {
  if (p.size() != parameter_count()) throw Error("parameter vector has the wrong length");
  Eigen::Index k = 0;
  RankerLayout::blocks(*this, [&](double* d, Eigen::Index n) {
    std::copy(p.data() + k, p.data() + k + n, d);
    k += n;
  });
}

void RankerModel::backprop_clip(const ClipTensor& clip, const Eigen::VectorXd& d_embed,
                                Eigen::VectorXd& grad) const {
  const auto f = RankerLayout::run(*this, clip);
  const double t = kClipFrames;
  const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(kFrameDim));

  // frame path
  const Eigen::MatrixXd dz = Eigen::MatrixXd::Ones(kClipFrames, 1) * d_embed.head(kFrameDim).transpose() / t;
  const Eigen::MatrixXd datt = dz * f.v.transpose();
  const Eigen::MatrixXd dv = f.att.transpose() * dz;
  Eigen::MatrixXd ds(kClipFrames, kClipFrames);
  for (int i = 0; i < kClipFrames; ++i) {
    const double dot = datt.row(i).dot(f.att.row(i));
    ds.row(i) = (f.att.row(i).array() * (datt.row(i).array() - dot)).matrix();
  }
  const Eigen::MatrixXd dq = ds * f.k * inv_sqrt_d;
  const Eigen::MatrixXd dk = ds.transpose() * f.q * inv_sqrt_d;
  const Eigen::MatrixXd dwq = dq.transpose() * f.h;
  const Eigen::MatrixXd dwk = dk.transpose() * f.h;
  const Eigen::MatrixXd dwv = dv.transpose() * f.h;
  const Eigen::MatrixXd dh = dq * wq_ + dk * wk_ + dv * wv_;
  const Eigen::MatrixXd dpre = (dh.array() * (1.0 - f.h.array().square())).matrix();
  const Eigen::MatrixXd dwe = dpre.transpose() * clip.patches;
  const Eigen::VectorXd dbe = dpre.colwise().sum().transpose();

  // force path
  const Eigen::RowVectorXd dg = d_embed.tail(kForceDim).transpose() / t;
  const Eigen::MatrixXd dgp = ((Eigen::MatrixXd::Ones(kClipFrames, 1) * dg).array() *
                               (1.0 - f.g.array().square())).matrix();
  const Eigen::VectorXd dwf = dgp.transpose() * clip.force;
  const Eigen::VectorXd dbf = dgp.colwise().sum().transpose();

  Eigen::Index k = 0;
  auto add = [&](const auto& m) {
    for (Eigen::Index i = 0; i < m.size(); ++i) grad(k + i) += m.data()[i];
    k += m.size();
  };
  add(dwe);
  add(dbe);
  add(dpre);  // positional embedding gradient equals dpre
  add(dwq);
  add(dwk);
  add(dwv);
  add(dwf);
  add(dbf);
}

void RankerModel::save(std::ostream& os) const {
  os << "ranker " << kClipFrames << ' ' << kPatch << ' ' << kFrameDim << ' ' << kForceDim << '\n';
  os << std::setprecision(std::numeric_limits<double>::max_digits10);
  const Eigen::VectorXd p = parameters();
  for (Eigen::Index i = 0; i < p.size(); ++i) os << p(i) << ((i + 1) % 8 == 0 ? '\n' : ' ');
  os << '\n';
  if (!os) throw Error("failed to write ranker model");
}

RankerModel RankerModel::load(std::istream& is) {
  std::string tag;
  int t = 0, patch = 0, d = 0, fd = 0;
  if (!(is >> tag >> t >> patch >> d >> fd) || tag != "ranker") throw Error("not a ranker model file");
  if (t != kClipFrames || patch != kPatch || d != kFrameDim || fd != kForceDim) {
    throw Error("ranker model dimensions do not match this build");
  }
  Rng rng(0);
  RankerModel m = random(rng);
  Eigen::VectorXd p(m.parameter_count());
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (!(is >> p(i))) throw Error("ranker model truncated");
    if (!std::isfinite(p(i))) throw Error("ranker model holds a non-finite weight");
  }
  m.set_parameters(p);
  return m;
}

}  // namespace gelgrip::softness
