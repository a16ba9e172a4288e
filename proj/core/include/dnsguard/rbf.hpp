#pragma once

// Gaussian radial basis function network: k-means centers, one shared width
// from the center spread, linear output layer solved in closed form.

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "dnsguard/preproc.hpp"
#include "dnsguard/scaling.hpp"

namespace dnsguard::classifiers {

struct RbfModel {
  std::vector<Vec3> centers;       // in scaled input space
  double width = 1.0;              // sigma
  Eigen::MatrixXd output_weights;  // 3 x K
  Eigen::Vector3d output_bias = Eigen::Vector3d::Zero();
  InputScaling scaling;

  std::size_t size() const noexcept { return centers.size(); }
  bool operator==(const RbfModel& other) const;
};

struct RbfTrainConfig {
  std::size_t centers = 10;
  std::uint64_t seed = 0;
  double ridge = 1e-8;
  /// Training MSE at or below which the model is reported as converged.
  double target_mse = 1e-3;
  bool scale_inputs = true;
};

/// sigma = (largest pairwise center distance) / sqrt(number of centers).
/// Throws NeedTwoCenters for fewer than two centers.
double rbf_width(std::span<const Vec3> centers);

/// exp(-||s(x) - c_j||^2 / (2 sigma^2)) for every center.
Eigen::VectorXd rbf_hidden(const RbfModel& model, const Vec3& x);
Vec3 rbf_forward(const RbfModel& model, const Vec3& x);

struct RbfTrainResult {
  RbfModel model;
  TrainReport report;
};

/// Throws EmptyData, NeedTwoCenters (centers < 2), TooFewPoints (from k-means)
/// or DegenerateDesign.
RbfTrainResult rbf_train(const LabeledDataset& data, const RbfTrainConfig& cfg);
RbfTrainResult rbf_train(std::span<const Vec3> inputs, std::span<const Vec3> targets,
                         const RbfTrainConfig& cfg);

ClassLabel rbf_classify(const RbfModel& model, const FeatureVector& x);

}  // namespace dnsguard::classifiers
