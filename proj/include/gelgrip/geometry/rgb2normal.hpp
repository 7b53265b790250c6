#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "gelgrip/core/random.hpp"
#include "gelgrip/core/types.hpp"
#include "gelgrip/geometry/calibration.hpp"

namespace gelgrip::geometry {

/// 5 -> 32 -> 32 -> 2 tanh perceptron. The two outputs o are squashed to the
/// unit normal (o_x, o_y, 1) / sqrt(1 + |o|^2), so |(nx, ny)| < 1 and nz > 0.
class Rgb2NormalModel {
 public:
  static constexpr int kIn = 5;
  static constexpr int kHidden = 32;
  static constexpr int kOut = 2;

  /// Xavier-style initialisation.
  static Rgb2NormalModel random(Rng& rng);

  Eigen::Vector3d predict(const PixelInput& in) const;
  /// Inputs as columns (5 x N) -> normals as columns (3 x N).
  Eigen::MatrixXd predict_batch(const Eigen::MatrixXd& inputs) const;

  int parameter_count() const;
  Eigen::VectorXd parameters() const;
  void set_parameters(const Eigen::VectorXd& p);

  /// Mean over samples of |n_pred - n_true|^2; fills `grad` when non-null.
  double loss(const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& normals,
              Eigen::VectorXd* grad = nullptr) const;

  void save(std::ostream& os) const;
  static Rgb2NormalModel load(std::istream& is);
  void save(const std::string& path) const;
  static Rgb2NormalModel load(const std::string& path);

 private:
  Eigen::MatrixXd w1_, w2_, w3_;
  Eigen::VectorXd b1_, b2_, b3_;
};

/// Dataset as column matrices (5 x N inputs, 3 x N normals).
struct CalibrationMatrices {
  Eigen::MatrixXd inputs;
  Eigen::MatrixXd normals;
};
CalibrationMatrices to_matrices(const CalibrationDataset& data);

enum class Optimizer { kAdam, kGradientDescent };

struct FitOptions {
  int epochs = 600;
  /// Step size. The defaults are 1e-2 for Adam and 0.2 for full-batch
  /// gradient descent (at or below which the GD loss does not increase).
  double learning_rate = 1e-2;
  Optimizer optimizer = Optimizer::kAdam;
  std::uint64_t seed = 1;
};

inline constexpr double kDefaultAdamRate = 1e-2;
inline constexpr double kDefaultGdRate = 0.2;

struct FitResult {
  Rgb2NormalModel model;
  std::vector<double> loss_history;  // loss before each update, then final
  double final_loss = 0.0;
};

/// Full-batch training on the mean squared normal error. Throws
/// "diverged; reduce learning rate" on a non-finite loss.
FitResult fit_rgb2normal(const CalibrationDataset& data, const FitOptions& opt);

NormalMap predict_normals(const DiffFrame& frame, const Rgb2NormalModel& model);

/// Angle between unit vectors, degrees.
double angular_error_deg(const Eigen::Vector3d& a, const Eigen::Vector3d& b);

}  // namespace gelgrip::geometry
