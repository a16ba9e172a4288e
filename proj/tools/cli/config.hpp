#pragma once

// Pipeline configuration: INI-style sections parsed into scenario blocks and
// classifier settings.
//
//   [pipeline]      seed, folds, window_len
//   [block:NAME]    runs, plus any scenario field (attack_kind, duration, ...)
//   [mlp]           hidden, max_epochs, target_mse, lambda_init, lambda_up,
//                   lambda_down, lambda_max, weight_init_range, scale_inputs
//   [rbf]           centers, ridge, target_mse, scale_inputs
//   [som]           epochs, ordering_lr, ordering_steps, tuning_lr,
//                   tuning_neighbor_dist
//   [sweep]         widths (comma separated)
//
// Unknown sections or keys are rejected with ConfigError.

#include <cstdint>
#include <filesystem>
#include <istream>
#include <string>
#include <vector>

#include "dnsguard/mlp.hpp"
#include "dnsguard/rbf.hpp"
#include "dnsguard/simnet.hpp"
#include "dnsguard/som.hpp"

namespace dnsguard::cli {

struct ScenarioBlock {
  std::string name;
  simnet::ScenarioConfig scenario;
  std::size_t runs = 1;
};

struct PipelineConfig {
  std::vector<ScenarioBlock> blocks;
  double window_len = 20.0;
  std::size_t folds = 10;
  std::uint64_t seed = 0;
  bool seed_set = false;

  std::size_t mlp_hidden = classifiers::kDefaultHidden;
  classifiers::MlpTrainConfig mlp;
  classifiers::RbfTrainConfig rbf;
  classifiers::SomTrainConfig som;
  std::vector<std::size_t> sweep_widths{3, 5, 7, 9, 11, 13, 15, 17, 19, 21};
};

/// Throws ConfigError on bad syntax, unknown keys or invalid values.
PipelineConfig parse_config(std::istream& in);
PipelineConfig load_config(const std::filesystem::path& path);

/// Checks cross-field rules (blocks present, one block per class when
/// `need_all_classes`, seed present).
void validate(const PipelineConfig& cfg, bool need_all_classes);

/// Canonical text of everything that shapes outputs, excluding the seed.
std::string canonical_text(const PipelineConfig& cfg);
/// 16 hex digits of FNV-1a over canonical_text.
std::string config_hash(const PipelineConfig& cfg);

/// Seed for run `run` of block `block`.
std::uint64_t run_seed(std::uint64_t master, std::size_t block, std::size_t run) noexcept;

std::vector<std::size_t> parse_widths(const std::string& text);

}  // namespace dnsguard::cli
