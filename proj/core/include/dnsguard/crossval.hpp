#pragma once

// k-fold cross-validation of classifier recipes, pooled confusion
// accounting, and the hidden-layer width sweep for the MLP.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dnsguard/metrics.hpp"
#include "dnsguard/mlp.hpp"
#include "dnsguard/rbf.hpp"
#include "dnsguard/som.hpp"

namespace dnsguard::eval {

struct Folds {
  std::vector<std::vector<std::size_t>> test_indices;
  /// False when some class was too small to stratify and the split fell back
  /// to a plain shuffled deal.
  bool stratified = true;
};

/// Shuffles each class with `seed`, then deals classes in label order
/// round-robin over the folds. Fold sizes differ by at most one, and so do the
/// per-class counts. Throws TooFewSamples when |data| < k or k < 2.
Folds kfold_split(const LabeledDataset& data, std::size_t k, std::uint64_t seed);

/// A trained model as seen by the evaluator.
struct FoldModel {
  std::function<ClassLabel(const FeatureVector&)> classify;
  /// Raw network output for MSE accounting; empty for classifiers without one.
  std::function<Vec3(const FeatureVector&)> output;
  classifiers::TrainReport report;
};

struct Recipe {
  std::string name;
  std::function<FoldModel(const LabeledDataset& train, std::uint64_t seed)> train;
};

Recipe mlp_recipe(const classifiers::MlpTrainConfig& cfg, std::size_t hidden,
                  std::string name = "BP");
Recipe rbf_recipe(const classifiers::RbfTrainConfig& cfg, std::string name = "RBF");
Recipe som_recipe(const classifiers::SomTrainConfig& cfg, std::string name = "SOM");

struct CvResult {
  std::string classifier;
  ConfusionCounts pooled;
  MetricSet metrics;  // from the pooled counts
  std::vector<MetricSet> fold_metrics;
  double training_time = 0.0;  // seconds, summed over folds
  std::size_t folds = 0;
  bool stratified = true;
  double train_mse = 0.0;             // mean of the per-fold final training MSE
  std::optional<double> test_mse;     // pooled over held-out outputs, when available

  /// Per-metric mean over folds where the metric is defined.
  MetricSet fold_mean() const;
};

/// Seed for training fold `fold` under CV seed `seed`.
std::uint64_t fold_seed(std::uint64_t seed, std::size_t fold) noexcept;

/// Trains on k-1 folds and classifies the held-out fold, k times; counts are
/// pooled over all held-out predictions. Training errors are rethrown with the
/// fold index in the message.
CvResult cross_validate(const Recipe& recipe, const LabeledDataset& data, std::size_t k,
                        std::uint64_t seed);

struct SweepRow {
  std::size_t width = 0;
  MetricSet metrics;
  double train_mse = 0.0;
  double test_mse = 0.0;

  bool operator==(const SweepRow&) const = default;
};

inline constexpr std::size_t kSweepMinWidth = 3;
inline constexpr std::size_t kSweepMaxWidth = 21;

/// One cross-validated MLP row per width (3..21, else InvalidWidth).
std::vector<SweepRow> sweep_hidden_neurons(const LabeledDataset& data,
                                           std::span<const std::size_t> widths, std::size_t k,
                                           std::uint64_t seed,
                                           const classifiers::MlpTrainConfig& base = {});

}  // namespace dnsguard::eval
