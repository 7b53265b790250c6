#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "gelgrip/core/random.hpp"
#include "gelgrip/core/types.hpp"

namespace gelgrip::softness {

inline constexpr int kClipFrames = 16;   // frames after temporal resampling
inline constexpr int kPatch = 16;        // pooled frame side
inline constexpr int kFrameDim = 32;     // d
inline constexpr int kForceDim = 8;
inline constexpr int kEmbedDim = kFrameDim + kForceDim;  // D
// Pooled difference magnitudes are of order 1e-2 while forces are a few
// newtons; without this gain plain descent barely moves the frame path.
inline constexpr double kPatchGain = 30.0;

/// Squeeze video of one object with per-frame normal-force estimates.
struct CompressionClip {
  std::vector<DiffFrame> frames;
  std::vector<double> force_n;
  std::string fruit;
  double shore00 = 0.0;

  /// >= 4 frames, one non-negative force per frame.
  void validate() const;
};

/// Network-ready clip: kClipFrames pooled patches (rows, times kPatchGain) and forces.
struct ClipTensor {
  Eigen::MatrixXd patches;  // kClipFrames x kPatch^2
  Eigen::VectorXd force;    // kClipFrames
};

/// Mean-pools the per-pixel RGB magnitude of a frame onto a kPatch x kPatch grid.
Eigen::VectorXd pool_frame(const DiffFrame& f);

/// Uniform temporal resampling to kClipFrames frames, then pooling.
ClipTensor prepare_clip(const CompressionClip& clip);

/// Clip embedder plus comparator f(eA, eB) = eA^T W eB + b with W = A - A^T.
///
/// Frame path: h_t = tanh(We x_t + be + pos_t); single-head self-attention
/// over t with 1/sqrt(d) scaling; mean over t. Force path: tanh(wf F_t + bf),
/// mean over t. The embedding concatenates both (d + 8 = 40 values).
class RankerModel {
 public:
  /// Random embedder; the comparator starts at zero so every untrained
  /// decision is a tie (f = b = 0) and balanced accuracy is exactly chance.
  static RankerModel random(Rng& rng, double scale = 1.0);

  Eigen::VectorXd encode(const ClipTensor& clip) const;
  /// Antisymmetric comparator matrix.
  Eigen::MatrixXd w() const { return a_ - a_.transpose(); }
  double compare(const Eigen::VectorXd& ea, const Eigen::VectorXd& eb) const;
  double bias() const { return b_; }
  void set_bias(double b) { b_ = b; }
  void set_comparator(const Eigen::MatrixXd& a);

  int parameter_count() const;
  Eigen::VectorXd parameters() const;
  void set_parameters(const Eigen::VectorXd& p);

  /// Per-clip gradient of a scalar loss given dLoss/dEmbedding, accumulated into `grad`.
  void backprop_clip(const ClipTensor& clip, const Eigen::VectorXd& d_embed,
                     Eigen::VectorXd& grad) const;

  void save(std::ostream& os) const;
  static RankerModel load(std::istream& is);

 private:
  friend struct RankerLayout;
  Eigen::MatrixXd we_, pos_, wq_, wk_, wv_, a_;
  Eigen::VectorXd be_, wf_, bf_;
  double b_ = 0.0;
};

/// f for two clips.
double compare_pair(const Eigen::VectorXd& ea, const Eigen::VectorXd& eb, const RankerModel& m);

/// Index pair into a clip list; label 1 means clip a is harder than clip b.
struct ClipPair {
  int a;
  int b;
  int label;
};

/// Mean binary cross-entropy softplus(f) - y f over pairs. Fills the full
/// parameter gradient when `grad` is non-null.
double ranker_loss(const RankerModel& m, const std::vector<ClipTensor>& clips,
                   const std::vector<ClipPair>& pairs, Eigen::VectorXd* grad = nullptr);

enum class RankerOptimizer { kGradientDescent, kAdam };

struct TrainOptions {
  int epochs = 2000;
  double learning_rate = 1e-2;
  RankerOptimizer optimizer = RankerOptimizer::kGradientDescent;
  bool train_bias = true;
  std::uint64_t seed = 1;
  double init_scale = 1.0;
};

struct TrainResult {
  RankerModel model;
  std::vector<double> loss_history;
};

/// Full-batch training. Pairs must stay within one fruit type and carry
/// labels 0 or 1. Throws on a non-finite loss.
TrainResult train_ranker(const std::vector<ClipTensor>& clips,
                         const std::vector<std::string>& fruit_of_clip,
                         const std::vector<ClipPair>& pairs, const TrainOptions& opt);

struct AccuracyCell {
  std::string fruit;
  double shore00;
  int correct = 0;
  int total = 0;
  double accuracy() const { return total == 0 ? 0.0 : double(correct) / total; }
};

struct AccuracyReport {
  std::vector<AccuracyCell> cells;  // per fruit and hardness
  std::vector<AccuracyCell> per_fruit;  // shore00 = 0
  double aggregate = 0.0;
  int pairs = 0;
};

/// A >= B is predicted when f >= 0. A pair is counted once in the aggregate
/// and once in the cell of each of its two clips.
AccuracyReport eval_pairwise_accuracy(const RankerModel& m, const std::vector<ClipTensor>& clips,
                                      const std::vector<std::string>& fruit_of_clip,
                                      const std::vector<double>& shore_of_clip,
                                      const std::vector<ClipPair>& pairs);

/// All ordered pairs (both orientations) of clips with equal fruit and
/// different hardness among `indices`.
std::vector<ClipPair> make_pairs(const std::vector<int>& indices,
                                 const std::vector<std::string>& fruit_of_clip,
                                 const std::vector<double>& shore_of_clip);

void write_accuracy_csv(std::ostream& os, const AccuracyReport& r);

}  // namespace gelgrip::softness
