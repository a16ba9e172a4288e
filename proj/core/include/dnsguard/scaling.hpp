#pragma once

#include <span>

#include "dnsguard/preproc.hpp"

namespace dnsguard::classifiers {

/// Per-feature affine map x -> (x - offset) * scale applied before the MLP
/// and RBF networks. The raw features span several orders of magnitude
/// (tens of bit/s up to 10^7 bit/s), which saturates tanh units.
struct InputScaling {
  Vec3 offset{0.0, 0.0, 0.0};
  Vec3 scale{1.0, 1.0, 1.0};

  Vec3 apply(const Vec3& x) const noexcept {
    return {(x[0] - offset[0]) * scale[0], (x[1] - offset[1]) * scale[1],
            (x[2] - offset[2]) * scale[2]};
  }

  static InputScaling identity() noexcept { return {}; }

  /// Maps each feature's [min, max] onto [-1, 1]; constant features map to 0.
  static InputScaling fit_minmax(std::span<const Vec3> inputs);

  bool operator==(const InputScaling&) const = default;
};

struct TrainReport {
  double final_mse = 0.0;
  std::size_t epochs_run = 0;
  double wall_time = 0.0;  // seconds
  bool converged = false;

  bool operator==(const TrainReport&) const = default;
};

std::vector<Vec3> feature_arrays(const LabeledDataset& data);
std::vector<Vec3> target_codes(const LabeledDataset& data);

}  // namespace dnsguard::classifiers
