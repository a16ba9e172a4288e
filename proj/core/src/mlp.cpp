#include "dnsguard/mlp.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "dnsguard/error.hpp"
#include "dnsguard/random.hpp"

namespace dnsguard::classifiers {

Eigen::VectorXd MlpModel::parameters() const {
  const auto h = static_cast<Eigen::Index>(hidden());
  Eigen::VectorXd theta(static_cast<Eigen::Index>(parameter_count()));
  Eigen::Index p = 0;
  for (Eigen::Index j = 0; j < h; ++j)
    for (Eigen::Index i = 0; i < 3; ++i) theta(p++) = hidden_weights(j, i);
  for (Eigen::Index j = 0; j < h; ++j) theta(p++) = hidden_bias(j);
  for (Eigen::Index k = 0; k < 3; ++k)
    for (Eigen::Index j = 0; j < h; ++j) theta(p++) = output_weights(k, j);
  for (Eigen::Index k = 0; k < 3; ++k) theta(p++) = output_bias(k);
  return theta;
}

void MlpModel::set_parameters(const Eigen::VectorXd& theta) {
  const auto h = static_cast<Eigen::Index>(hidden());
  Eigen::Index p = 0;
  for (Eigen::Index j = 0; j < h; ++j)
    for (Eigen::Index i = 0; i < 3; ++i) hidden_weights(j, i) = theta(p++);
  for (Eigen::Index j = 0; j < h; ++j) hidden_bias(j) = theta(p++);
  for (Eigen::Index k = 0; k < 3; ++k)
    for (Eigen::Index j = 0; j < h; ++j) output_weights(k, j) = theta(p++);
  for (Eigen::Index k = 0; k < 3; ++k) output_bias(k) = theta(p++);
}

bool MlpModel::operator==(const MlpModel& other) const {
  return hidden_weights.rows() == other.hidden_weights.rows() &&
         hidden_weights == other.hidden_weights && hidden_bias == other.hidden_bias &&
         output_weights == other.output_weights && output_bias == other.output_bias &&
         scaling == other.scaling;
}

void validate(const MlpTrainConfig& cfg) {
  auto bad = [](const std::string& what) {
    throw Error(Errc::InvalidConfig, "invalid MLP training config: " + what);
  };
  if (cfg.max_epochs < 1) bad("max_epochs must be >= 1");
  if (!(cfg.target_mse > 0.0)) bad("target_mse must be > 0");
  if (!(cfg.lambda_init > 0.0)) bad("lambda_init must be > 0");
  if (!(cfg.lambda_up > 1.0)) bad("lambda_up must be > 1");
  if (!(cfg.lambda_down > 0.0 && cfg.lambda_down < 1.0)) bad("lambda_down must lie in (0, 1)");
  if (!(cfg.lambda_max >= cfg.lambda_init)) bad("lambda_max must be >= lambda_init");
  if (!(cfg.weight_init_range > 0.0)) bad("weight_init_range must be > 0");
}

MlpModel mlp_init(std::size_t hidden, std::uint64_t seed, double weight_init_range) {
  if (hidden < 1 || hidden > kMaxHidden) {
    throw Error(Errc::InvalidWidth, "hidden layer width must lie in [1, " +
                                        std::to_string(kMaxHidden) + "], got " +
                                        std::to_string(hidden));
  }
  const auto h = static_cast<Eigen::Index>(hidden);
  MlpModel m;
  m.hidden_weights.resize(h, 3);
  m.hidden_bias.resize(h);
  m.output_weights.resize(3, h);
  Rng rng(seed);
  Eigen::VectorXd theta(static_cast<Eigen::Index>(m.parameter_count()));
  for (Eigen::Index p = 0; p < theta.size(); ++p) {
    theta(p) = rng.uniform(-weight_init_range, weight_init_range);
  }
  m.set_parameters(theta);
  return m;
}

namespace {

Eigen::Vector3d as_eigen(const Vec3& v) { return {v[0], v[1], v[2]}; }

Eigen::Matrix3Xd scaled_inputs(const MlpModel& m, std::span<const Vec3> inputs) {
  Eigen::Matrix3Xd x(3, static_cast<Eigen::Index>(inputs.size()));
  for (std::size_t n = 0; n < inputs.size(); ++n) {
    x.col(static_cast<Eigen::Index>(n)) = as_eigen(m.scaling.apply(inputs[n]));
  }
  return x;
}

// Hidden activations for every sample, one column per sample.
Eigen::MatrixXd hidden_layer(const MlpModel& m, const Eigen::Matrix3Xd& x) {
  Eigen::MatrixXd z = m.hidden_weights * x;
  z.colwise() += m.hidden_bias;
  return z.array().tanh().matrix();
}

Eigen::Matrix3Xd outputs(const MlpModel& m, const Eigen::MatrixXd& h) {
  Eigen::Matrix3Xd y = m.output_weights * h;
  y.colwise() += m.output_bias;
  return y;
}

Eigen::Matrix3Xd target_matrix(std::span<const Vec3> targets) {
  Eigen::Matrix3Xd t(3, static_cast<Eigen::Index>(targets.size()));
  for (std::size_t n = 0; n < targets.size(); ++n) {
    t.col(static_cast<Eigen::Index>(n)) = as_eigen(targets[n]);
  }
  return t;
}

double mse_of(const MlpModel& m, const Eigen::Matrix3Xd& x, const Eigen::Matrix3Xd& t) {
  const Eigen::Matrix3Xd err = t - outputs(m, hidden_layer(m, x));
  return err.squaredNorm() / static_cast<double>(err.size());
}

Eigen::MatrixXd jacobian_of(const MlpModel& m, const Eigen::Matrix3Xd& x) {
  const auto h = static_cast<Eigen::Index>(m.hidden());
  const Eigen::Index n_samples = x.cols();
  const Eigen::MatrixXd act = hidden_layer(m, x);
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(3 * n_samples,
                                              static_cast<Eigen::Index>(m.parameter_count()));
  const Eigen::Index off_bias = 3 * h;
  const Eigen::Index off_out = 4 * h;
  const Eigen::Index off_out_bias = 7 * h;
  for (Eigen::Index n = 0; n < n_samples; ++n) {
    for (Eigen::Index k = 0; k < 3; ++k) {
      const Eigen::Index row = 3 * n + k;
      for (Eigen::Index j = 0; j < h; ++j) {
        const double hj = act(j, n);
        const double back = m.output_weights(k, j) * (1.0 - hj * hj);
        for (Eigen::Index i = 0; i < 3; ++i) jac(row, 3 * j + i) = back * x(i, n);
        jac(row, off_bias + j) = back;
        jac(row, off_out + k * h + j) = hj;
      }
      jac(row, off_out_bias + k) = 1.0;
    }
  }
  return jac;
}

void check_training_inputs(std::span<const Vec3> inputs, std::span<const Vec3> targets) {
  if (inputs.empty()) throw Error(Errc::EmptyData, "MLP training set is empty");
  if (inputs.size() != targets.size()) {
    throw Error(Errc::LengthMismatch, "MLP training inputs and targets differ in length");
  }
  for (const auto& x : inputs) {
    for (const double v : x) {
      if (!std::isfinite(v)) throw Error(Errc::TrainingError, "non-finite MLP training input");
    }
  }
}

}  // namespace

Vec3 mlp_forward(const MlpModel& model, const Vec3& x) {
  const Eigen::Vector3d s = as_eigen(model.scaling.apply(x));
  const Eigen::VectorXd h = (model.hidden_weights * s + model.hidden_bias).array().tanh();
  const Eigen::Vector3d y = model.output_weights * h + model.output_bias;
  return {y(0), y(1), y(2)};
}

Eigen::MatrixXd mlp_jacobian(const MlpModel& model, std::span<const Vec3> inputs) {
  return jacobian_of(model, scaled_inputs(model, inputs));
}

double mlp_mse(const MlpModel& model, std::span<const Vec3> inputs,
               std::span<const Vec3> targets) {
  if (inputs.size() != targets.size()) {
    throw Error(Errc::LengthMismatch, "inputs and targets differ in length");
  }
  if (inputs.empty()) throw Error(Errc::EmptyData, "cannot compute MSE of an empty set");
  return mse_of(model, scaled_inputs(model, inputs), target_matrix(targets));
}

MlpTrainResult mlp_train_lm(MlpModel model, std::span<const Vec3> inputs,
                            std::span<const Vec3> targets, const MlpTrainConfig& cfg) {
  validate(cfg);
  check_training_inputs(inputs, targets);
  const auto started = std::chrono::steady_clock::now();

  if (cfg.scale_inputs) model.scaling = InputScaling::fit_minmax(inputs);
  const Eigen::Matrix3Xd x = scaled_inputs(model, inputs);
  const Eigen::Matrix3Xd t = target_matrix(targets);

  MlpTrainResult result;
  double mse = mse_of(model, x, t);
  result.mse_history.push_back(mse);
  double lambda = cfg.lambda_init;
  std::size_t epoch = 0;
  const auto p = static_cast<Eigen::Index>(model.parameter_count());

  while (epoch < cfg.max_epochs && mse > cfg.target_mse) {
    const Eigen::MatrixXd jac = jacobian_of(model, x);
    const Eigen::Matrix3Xd err = t - outputs(model, hidden_layer(model, x));
    const Eigen::Map<const Eigen::VectorXd> err_flat(err.data(), err.size());
    Eigen::MatrixXd jtj(p, p);
    jtj.setZero();
    jtj.selfadjointView<Eigen::Lower>().rankUpdate(jac.transpose());
    jtj.triangularView<Eigen::StrictlyUpper>() = jtj.transpose();
    const Eigen::VectorXd gradient = jac.transpose() * err_flat;
    const Eigen::VectorXd theta = model.parameters();

    bool accepted = false;
    bool ever_solved = false;
    while (lambda <= cfg.lambda_max) {
      Eigen::MatrixXd damped = jtj;
      damped.diagonal().array() += lambda;
      const Eigen::LDLT<Eigen::MatrixXd> ldlt(damped);
      Eigen::VectorXd step;
      if (ldlt.info() == Eigen::Success) step = ldlt.solve(gradient);
      if (step.size() == p && step.allFinite()) {
        ever_solved = true;
        MlpModel trial = model;
        trial.set_parameters(theta + step);
        const double trial_mse = mse_of(trial, x, t);
        if (std::isfinite(trial_mse) && trial_mse < mse) {
          model = std::move(trial);
          mse = trial_mse;
          lambda *= cfg.lambda_down;
          accepted = true;
          break;
        }
      }
      lambda *= cfg.lambda_up;
    }
    if (!ever_solved) {
      throw Error(Errc::SingularUpdate,
                  "damped normal equations unsolvable up to lambda_max at epoch " +
                      std::to_string(epoch));
    }
    if (!accepted) break;  // no descent direction left at maximum damping
    ++epoch;
    result.mse_history.push_back(mse);
  }

  result.report.final_mse = mse;
  result.report.epochs_run = epoch;
  result.report.converged = mse <= cfg.target_mse;
  result.report.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  result.model = std::move(model);
  return result;
}

MlpTrainResult mlp_train_lm(MlpModel model, const LabeledDataset& data,
                            const MlpTrainConfig& cfg) {
  const auto inputs = feature_arrays(data);
  const auto targets = target_codes(data);
  return mlp_train_lm(std::move(model), inputs, targets, cfg);
}

ClassLabel mlp_classify(const MlpModel& model, const FeatureVector& x) {
  return nearest_code(mlp_forward(model, x.to_array()));
}

}  // namespace dnsguard::classifiers
