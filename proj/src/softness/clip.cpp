#include <algorithm>
#include <cmath>

#include "gelgrip/core/error.hpp"
#include "gelgrip/softness/ranker.hpp"

namespace gelgrip::softness {

void CompressionClip::validate() const {
  if (frames.size() < 4) throw Error("a compression clip needs at least 4 frames");
  if (force_n.size() != frames.size()) throw Error("one force value per clip frame is required");
  for (double f : force_n) {
    if (!(f >= 0.0) || !std::isfinite(f)) throw Error("clip forces must be finite and non-negative");
  }
  for (const DiffFrame& f : frames) {
    if (f.width() != frames.front().width() || f.height() != frames.front().height()) {
      throw Error("clip frames differ in size");
    }
  }
}

Eigen::VectorXd pool_frame(const DiffFrame& f) {
  if (f.width() < kPatch || f.height() < kPatch) throw Error("frame smaller than the pooling grid");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(kPatch * kPatch);
  Eigen::VectorXd count = Eigen::VectorXd::Zero(kPatch * kPatch);
  for (int y = 0; y < f.height(); ++y) {
    const int py = y * kPatch / f.height();
    for (int x = 0; x < f.width(); ++x) {
      const int px = x * kPatch / f.width();
      const double r = f.at(y, x, 0), g = f.at(y, x, 1), b = f.at(y, x, 2);
      out(py * kPatch + px) += std::sqrt((r * r + g * g + b * b) / 3.0);
      count(py * kPatch + px) += 1.0;
    }
  }
  return out.cwiseQuotient(count);
}

ClipTensor prepare_clip(const CompressionClip& clip) {
  clip.validate();
  const int n = static_cast<int>(clip.frames.size());
  ClipTensor t{Eigen::MatrixXd(kClipFrames, kPatch * kPatch), Eigen::VectorXd(kClipFrames)};
  for (int i = 0; i < kClipFrames; ++i) {
    const int src = static_cast<int>(std::lround(static_cast<double>(i) * (n - 1) / (kClipFrames - 1)));
    t.patches.row(i) = kPatchGain * pool_frame(clip.frames[static_cast<std::size_t>(src)]).transpose();
    t.force(i) = clip.force_n[static_cast<std::size_t>(src)];
  }
  return t;
}

}  // namespace gelgrip::softness
