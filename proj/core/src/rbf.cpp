#include "dnsguard/rbf.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "dnsguard/error.hpp"
#include "dnsguard/kmeans.hpp"

namespace dnsguard::classifiers {

bool RbfModel::operator==(const RbfModel& other) const {
  return centers == other.centers && width == other.width &&
         output_weights.rows() == other.output_weights.rows() &&
         output_weights.cols() == other.output_weights.cols() &&
         output_weights == other.output_weights && output_bias == other.output_bias &&
         scaling == other.scaling;
}

double rbf_width(std::span<const Vec3> centers) {
  if (centers.size() < 2) throw Error(Errc::NeedTwoCenters, "RBF width needs at least two centers");
  double max_d2 = 0.0;
  for (std::size_t a = 0; a < centers.size(); ++a) {
    for (std::size_t b = a + 1; b < centers.size(); ++b) {
      max_d2 = std::max(max_d2, squared_distance(centers[a], centers[b]));
    }
  }
  return std::sqrt(max_d2) / std::sqrt(static_cast<double>(centers.size()));
}

Eigen::VectorXd rbf_hidden(const RbfModel& model, const Vec3& x) {
  const Vec3 s = model.scaling.apply(x);
  const double denom = 2.0 * model.width * model.width;
  Eigen::VectorXd phi(static_cast<Eigen::Index>(model.size()));
  for (std::size_t j = 0; j < model.size(); ++j) {
    phi(static_cast<Eigen::Index>(j)) = std::exp(-squared_distance(s, model.centers[j]) / denom);
  }
  return phi;
}

Vec3 rbf_forward(const RbfModel& model, const Vec3& x) {
  const Eigen::Vector3d y = model.output_weights * rbf_hidden(model, x) + model.output_bias;
  return {y(0), y(1), y(2)};
}

RbfTrainResult rbf_train(std::span<const Vec3> inputs, std::span<const Vec3> targets,
                         const RbfTrainConfig& cfg) {
  if (inputs.empty()) throw Error(Errc::EmptyData, "RBF training set is empty");
  if (inputs.size() != targets.size()) {
    throw Error(Errc::LengthMismatch, "RBF inputs and targets differ in length");
  }
  if (cfg.centers < 2) throw Error(Errc::NeedTwoCenters, "RBF network needs at least two centers");
  if (!(cfg.ridge >= 0.0)) throw Error(Errc::InvalidConfig, "RBF ridge must be >= 0");
  const auto started = std::chrono::steady_clock::now();

  RbfTrainResult result;
  RbfModel& m = result.model;
  m.scaling = cfg.scale_inputs ? InputScaling::fit_minmax(inputs) : InputScaling::identity();
  std::vector<Vec3> scaled;
  scaled.reserve(inputs.size());
  for (const auto& x : inputs) scaled.push_back(m.scaling.apply(x));

  m.centers = kmeans(scaled, cfg.centers, cfg.seed).centers;
  m.width = rbf_width(m.centers);
  if (!(m.width > 0.0)) throw Error(Errc::DegenerateDesign, "RBF centers coincide");

  // Ridge-regularized least squares on [phi, 1], solved as the stacked
  // system [A; sqrt(ridge) I] w = [T; 0].
  const auto n = static_cast<Eigen::Index>(inputs.size());
  const auto k = static_cast<Eigen::Index>(m.size());
  Eigen::MatrixXd design = Eigen::MatrixXd::Zero(n + k + 1, k + 1);
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(n + k + 1, 3);
  for (Eigen::Index i = 0; i < n; ++i) {
    design.row(i).head(k) = rbf_hidden(m, inputs[static_cast<std::size_t>(i)]).transpose();
    design(i, k) = 1.0;
    for (Eigen::Index c = 0; c < 3; ++c) rhs(i, c) = targets[static_cast<std::size_t>(i)][c];
  }
  const double root_ridge = std::sqrt(cfg.ridge);
  for (Eigen::Index j = 0; j <= k; ++j) design(n + j, j) = root_ridge;

  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() < k + 1) {
    throw Error(Errc::DegenerateDesign, "RBF design matrix is rank deficient (rank " +
                                            std::to_string(qr.rank()) + " of " +
                                            std::to_string(k + 1) + ")");
  }
  const Eigen::MatrixXd w = qr.solve(rhs);
  if (!w.allFinite()) throw Error(Errc::DegenerateDesign, "RBF output weights are not finite");
  m.output_weights = w.topRows(k).transpose();
  m.output_bias = w.row(k).transpose();

  double sse = 0.0;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const Vec3 y = rbf_forward(m, inputs[i]);
    for (std::size_t c = 0; c < 3; ++c) sse += (y[c] - targets[i][c]) * (y[c] - targets[i][c]);
  }
  result.report.final_mse = sse / (3.0 * static_cast<double>(inputs.size()));
  result.report.epochs_run = 1;
  result.report.converged = result.report.final_mse <= cfg.target_mse;
  result.report.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

RbfTrainResult rbf_train(const LabeledDataset& data, const RbfTrainConfig& cfg) {
  const auto inputs = feature_arrays(data);
  const auto targets = target_codes(data);
  return rbf_train(inputs, targets, cfg);
}

ClassLabel rbf_classify(const RbfModel& model, const FeatureVector& x) {
  return nearest_code(rbf_forward(model, x.to_array()));
}

}  // namespace dnsguard::classifiers
