#pragma once

// 5x5 self-organizing map on a hexagonal grid with hop-count (link)
// distances. Inputs are L2-normalized feature vectors; neurons get class
// labels by majority vote after unsupervised training.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dnsguard/preproc.hpp"
#include "dnsguard/scaling.hpp"

namespace dnsguard::classifiers {

inline constexpr std::size_t kSomRows = 5;
inline constexpr std::size_t kSomCols = 5;
inline constexpr std::size_t kSomNeurons = kSomRows * kSomCols;

using GridPoint = std::array<double, 2>;

/// Neuron index = row * kSomCols + col. Odd rows shift right by half a cell.
GridPoint grid_position(std::size_t row, std::size_t col) noexcept;
const std::array<GridPoint, kSomNeurons>& grid_positions() noexcept;

/// Hop count between neurons; neighbors are nodes within 1.001 grid units.
int linkdist(std::size_t a, std::size_t b);
/// Largest linkdist on the grid.
int grid_diameter() noexcept;

struct SomModel {
  std::array<Vec3, kSomNeurons> codebook{};
  std::optional<std::array<ClassLabel, kSomNeurons>> neuron_labels;

  bool operator==(const SomModel&) const = default;
};

struct SomTrainConfig {
  std::size_t epochs = 1000;
  double ordering_lr = 0.9;
  std::size_t ordering_steps = 1000;
  double tuning_lr = 0.02;
  double tuning_neighbor_dist = 1.0;
  std::uint64_t seed = 0;
};

void validate(const SomTrainConfig& cfg);

/// Codebook uniform in the unit cube.
SomModel som_init(std::uint64_t seed);

/// L2 normalization that leaves the zero vector unchanged.
Vec3 som_normalize(const Vec3& raw);

/// argmin Euclidean distance; ties to the lowest neuron index.
std::size_t best_matching_unit(const SomModel& model, const Vec3& x) noexcept;

/// Mean distance from each input to its BMU codebook vector.
double quantization_error(const SomModel& model, std::span<const Vec3> inputs);

struct SomTrainResult {
  SomModel model;
  TrainReport report;  // final_mse is the mean squared BMU distance
  double initial_quantization_error = 0.0;
  double ordering_quantization_error = 0.0;  // after the ordering phase
};

/// `inputs` must already be normalized. Ordering phase: ordering_steps
/// presentations with learning rate and neighborhood radius decaying linearly
/// to the tuning values; tuning phase: the remaining presentations up to
/// epochs * |inputs| at fixed tuning values. Every neuron within the current
/// radius of the BMU moves by lr * (x - w). Throws EmptyData.
SomTrainResult som_train(SomModel model, std::span<const Vec3> inputs, const SomTrainConfig& cfg);
/// Normalizes the dataset features, then trains.
SomTrainResult som_train(SomModel model, const LabeledDataset& data, const SomTrainConfig& cfg);

/// Majority vote of the (normalized) samples each neuron wins; ties go to the
/// class most frequent in the whole set, then Normal < Amplification <
/// DirectDoS. Neurons that win nothing copy the nearest labeled neuron by
/// linkdist (lowest index on ties). Throws EmptyData or LengthMismatch.
SomModel som_label(SomModel model, std::span<const Vec3> inputs, std::span<const ClassLabel> labels);
SomModel som_label(SomModel model, const LabeledDataset& data);

/// Label of the BMU of the normalized input. Throws Unlabeled.
ClassLabel som_classify(const SomModel& model, const FeatureVector& x);

}  // namespace dnsguard::classifiers
