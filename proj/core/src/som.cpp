#include "dnsguard/som.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <limits>
#include <string>

#include "dnsguard/error.hpp"
#include "dnsguard/kmeans.hpp"
#include "dnsguard/random.hpp"

namespace dnsguard::classifiers {

GridPoint grid_position(std::size_t row, std::size_t col) noexcept {
  return {static_cast<double>(col) + 0.5 * static_cast<double>(row % 2),
          static_cast<double>(row) * std::sqrt(3.0) / 2.0};
}

const std::array<GridPoint, kSomNeurons>& grid_positions() noexcept {
  static const auto positions = [] {
    std::array<GridPoint, kSomNeurons> p{};
    for (std::size_t r = 0; r < kSomRows; ++r)
      for (std::size_t c = 0; c < kSomCols; ++c) p[r * kSomCols + c] = grid_position(r, c);
    return p;
  }();
  return positions;
}

namespace {

using LinkTable = std::array<std::array<int, kSomNeurons>, kSomNeurons>;

const LinkTable& link_table() {
  static const LinkTable table = [] {
    const auto& pos = grid_positions();
    std::array<std::vector<std::size_t>, kSomNeurons> adjacent;
    for (std::size_t a = 0; a < kSomNeurons; ++a) {
      for (std::size_t b = 0; b < kSomNeurons; ++b) {
        const double dx = pos[a][0] - pos[b][0];
        const double dy = pos[a][1] - pos[b][1];
        if (a != b && std::sqrt(dx * dx + dy * dy) <= 1.001) adjacent[a].push_back(b);
      }
    }
    LinkTable t{};
    for (std::size_t src = 0; src < kSomNeurons; ++src) {
      t[src].fill(-1);
      t[src][src] = 0;
      std::deque<std::size_t> frontier{src};
      while (!frontier.empty()) {
        const auto u = frontier.front();
        frontier.pop_front();
        for (const auto v : adjacent[u]) {
          if (t[src][v] >= 0) continue;
          t[src][v] = t[src][u] + 1;
          frontier.push_back(v);
        }
      }
    }
    return t;
  }();
  return table;
}

double squared_bmu_distance(const SomModel& m, const Vec3& x) {
  return squared_distance(m.codebook[best_matching_unit(m, x)], x);
}

}  // namespace

int linkdist(std::size_t a, std::size_t b) {
  if (a >= kSomNeurons || b >= kSomNeurons) {
    throw Error(Errc::InvalidConfig, "neuron index outside the 5x5 grid");
  }
  return link_table()[a][b];
}

int grid_diameter() noexcept {
  int d = 0;
  for (const auto& row : link_table())
    for (const int v : row) d = std::max(d, v);
  return d;
}

void validate(const SomTrainConfig& cfg) {
  auto in_unit = [](double v) { return v > 0.0 && v <= 1.0; };
  if (!in_unit(cfg.ordering_lr) || !in_unit(cfg.tuning_lr)) {
    throw Error(Errc::InvalidConfig, "SOM learning rates must lie in (0, 1]");
  }
  if (cfg.ordering_steps < 1) throw Error(Errc::InvalidConfig, "SOM ordering_steps must be >= 1");
  if (!(cfg.tuning_neighbor_dist >= 0.0)) {
    throw Error(Errc::InvalidConfig, "SOM tuning neighbor distance must be >= 0");
  }
}

SomModel som_init(std::uint64_t seed) {
  SomModel m;
  Rng rng(seed);
  for (auto& w : m.codebook)
    for (auto& v : w) v = rng.uniform01();
  return m;
}

Vec3 som_normalize(const Vec3& raw) {
  if (raw[0] == 0.0 && raw[1] == 0.0 && raw[2] == 0.0) return raw;
  return preproc::normalize_l2(raw);
}

std::size_t best_matching_unit(const SomModel& model, const Vec3& x) noexcept {
  std::size_t best = 0;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n < kSomNeurons; ++n) {
    const double d2 = squared_distance(model.codebook[n], x);
    if (d2 < best_d2) {
      best_d2 = d2;
      best = n;
    }
  }
  return best;
}

double quantization_error(const SomModel& model, std::span<const Vec3> inputs) {
  if (inputs.empty()) return 0.0;
  double total = 0.0;
  for (const auto& x : inputs) total += std::sqrt(squared_bmu_distance(model, x));
  return total / static_cast<double>(inputs.size());
}

SomTrainResult som_train(SomModel model, std::span<const Vec3> inputs, const SomTrainConfig& cfg) {
  validate(cfg);
  if (inputs.empty()) throw Error(Errc::EmptyData, "SOM training set is empty");
  const auto started = std::chrono::steady_clock::now();

  SomTrainResult result;
  result.initial_quantization_error = quantization_error(model, inputs);
  result.ordering_quantization_error = result.initial_quantization_error;

  const auto& links = link_table();
  const double diameter = grid_diameter();
  const double ordering_steps = static_cast<double>(cfg.ordering_steps);
  Rng rng(cfg.seed);
  std::vector<std::size_t> order(inputs.size());
  std::size_t step = 0;

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng.shuffle(std::span<std::size_t>(order));
    for (const auto idx : order) {
      double lr = cfg.tuning_lr;
      double radius = cfg.tuning_neighbor_dist;
      if (step < cfg.ordering_steps) {
        const double frac = static_cast<double>(step) / ordering_steps;
        lr = cfg.ordering_lr + (cfg.tuning_lr - cfg.ordering_lr) * frac;
        radius = diameter + (cfg.tuning_neighbor_dist - diameter) * frac;
      }
      const Vec3& x = inputs[idx];
      const auto bmu = best_matching_unit(model, x);
      for (std::size_t n = 0; n < kSomNeurons; ++n) {
        if (links[bmu][n] > radius) continue;
        for (std::size_t d = 0; d < 3; ++d) model.codebook[n][d] += lr * (x[d] - model.codebook[n][d]);
      }
      ++step;
      if (step == cfg.ordering_steps) {
        result.ordering_quantization_error = quantization_error(model, inputs);
      }
    }
  }
  if (step < cfg.ordering_steps && step > 0) {
    result.ordering_quantization_error = quantization_error(model, inputs);
  }

  double sse = 0.0;
  for (const auto& x : inputs) sse += squared_bmu_distance(model, x);
  model.neuron_labels.reset();
  result.model = model;
  result.report.final_mse = sse / static_cast<double>(inputs.size());
  result.report.epochs_run = cfg.epochs;
  result.report.converged = true;
  result.report.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

namespace {

std::vector<Vec3> normalized_features(const LabeledDataset& data) {
  std::vector<Vec3> out;
  out.reserve(data.size());
  for (const auto& s : data.samples) out.push_back(som_normalize(s.features.to_array()));
  return out;
}

}  // namespace

SomTrainResult som_train(SomModel model, const LabeledDataset& data, const SomTrainConfig& cfg) {
  return som_train(std::move(model), normalized_features(data), cfg);
}

SomModel som_label(SomModel model, std::span<const Vec3> inputs,
                   std::span<const ClassLabel> labels) {
  if (inputs.empty()) throw Error(Errc::EmptyData, "SOM labeling set is empty");
  if (inputs.size() != labels.size()) {
    throw Error(Errc::LengthMismatch, "SOM inputs and labels differ in length");
  }

  std::array<std::size_t, kNumClasses> overall{};
  std::array<std::array<std::size_t, kNumClasses>, kSomNeurons> votes{};
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    ++overall[index_of(labels[i])];
    ++votes[best_matching_unit(model, inputs[i])][index_of(labels[i])];
  }

  // Preference among classes with equal votes.
  static constexpr std::array<ClassLabel, 3> kTieOrder = {
      ClassLabel::Normal, ClassLabel::Amplification, ClassLabel::DirectDoS};
  auto prefer = [&](ClassLabel a, ClassLabel b) {
    if (overall[index_of(a)] != overall[index_of(b)]) {
      return overall[index_of(a)] > overall[index_of(b)];
    }
    return std::find(kTieOrder.begin(), kTieOrder.end(), a) <
           std::find(kTieOrder.begin(), kTieOrder.end(), b);
  };

  std::array<std::optional<ClassLabel>, kSomNeurons> won{};
  for (std::size_t n = 0; n < kSomNeurons; ++n) {
    std::optional<ClassLabel> best;
    for (const auto c : kAllLabels) {
      const auto v = votes[n][index_of(c)];
      if (v == 0) continue;
      if (!best || v > votes[n][index_of(*best)] ||
          (v == votes[n][index_of(*best)] && prefer(c, *best))) {
        best = c;
      }
    }
    won[n] = best;
  }

  std::array<ClassLabel, kSomNeurons> final_labels{};
  for (std::size_t n = 0; n < kSomNeurons; ++n) {
    if (won[n]) {
      final_labels[n] = *won[n];
      continue;
    }
    int best_dist = std::numeric_limits<int>::max();
    for (std::size_t other = 0; other < kSomNeurons; ++other) {
      if (!won[other]) continue;
      const int d = linkdist(n, other);
      if (d < best_dist) {
        best_dist = d;
        final_labels[n] = *won[other];
      }
    }
  }
  model.neuron_labels = final_labels;
  return model;
}

SomModel som_label(SomModel model, const LabeledDataset& data) {
  std::vector<ClassLabel> labels;
  labels.reserve(data.size());
  for (const auto& s : data.samples) labels.push_back(s.label);
  return som_label(std::move(model), normalized_features(data), labels);
}

ClassLabel som_classify(const SomModel& model, const FeatureVector& x) {
  if (!model.neuron_labels) throw Error(Errc::Unlabeled, "SOM neurons have not been labeled");
  return (*model.neuron_labels)[best_matching_unit(model, som_normalize(x.to_array()))];
}

}  // namespace dnsguard::classifiers
