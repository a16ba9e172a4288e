#pragma once

// Three-layer perceptron (3 inputs, tan-sigmoid hidden layer, 3 linear
// outputs) trained by Levenberg-Marquardt on the target output codes.

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "dnsguard/preproc.hpp"
#include "dnsguard/scaling.hpp"

namespace dnsguard::classifiers {

inline constexpr std::size_t kDefaultHidden = 7;
inline constexpr std::size_t kMaxHidden = 64;

struct MlpModel {
  Eigen::MatrixXd hidden_weights;  // hidden x 3
  Eigen::VectorXd hidden_bias;     // hidden
  Eigen::MatrixXd output_weights;  // 3 x hidden
  Eigen::Vector3d output_bias = Eigen::Vector3d::Zero();
  InputScaling scaling;

  std::size_t hidden() const noexcept { return static_cast<std::size_t>(hidden_bias.size()); }
  std::size_t parameter_count() const noexcept { return 7 * hidden() + 3; }

  /// Flattened as [hidden_weights row-major, hidden_bias, output_weights
  /// row-major, output_bias]; the Jacobian columns follow the same order.
  Eigen::VectorXd parameters() const;
  void set_parameters(const Eigen::VectorXd& theta);

  bool operator==(const MlpModel& other) const;
};

struct MlpTrainConfig {
  std::size_t max_epochs = 500;
  double target_mse = 1e-5;
  double lambda_init = 1e-3;
  double lambda_up = 10.0;
  double lambda_down = 0.1;
  double lambda_max = 1e10;
  double weight_init_range = 0.5;
  std::uint64_t seed = 0;
  /// Fit min-max input scaling on the training inputs before the first step.
  bool scale_inputs = true;
};

void validate(const MlpTrainConfig& cfg);

/// Weights uniform in [-range, range]. Throws InvalidWidth unless
/// 1 <= hidden <= kMaxHidden.
MlpModel mlp_init(std::size_t hidden, std::uint64_t seed, double weight_init_range = 0.5);

/// W_out * tanh(W_h * s(x) + b_h) + b_out, with s the model's input scaling.
Vec3 mlp_forward(const MlpModel& model, const Vec3& x);

/// d(outputs)/d(parameters): row 3*n + k is output k of sample n.
Eigen::MatrixXd mlp_jacobian(const MlpModel& model, std::span<const Vec3> inputs);

/// Mean over samples and output components.
double mlp_mse(const MlpModel& model, std::span<const Vec3> inputs, std::span<const Vec3> targets);

struct MlpTrainResult {
  MlpModel model;
  TrainReport report;
  std::vector<double> mse_history;  // initial MSE, then one entry per accepted step
};

/// Throws EmptyData, LengthMismatch, or SingularUpdate.
MlpTrainResult mlp_train_lm(MlpModel model, std::span<const Vec3> inputs,
                            std::span<const Vec3> targets, const MlpTrainConfig& cfg);
MlpTrainResult mlp_train_lm(MlpModel model, const LabeledDataset& data, const MlpTrainConfig& cfg);

ClassLabel mlp_classify(const MlpModel& model, const FeatureVector& x);

}  // namespace dnsguard::classifiers
