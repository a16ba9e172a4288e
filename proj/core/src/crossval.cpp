#include "dnsguard/crossval.hpp"

#include <algorithm>
#include <chrono>
#include <memory>
#include <string>

#include "dnsguard/error.hpp"
#include "dnsguard/random.hpp"

namespace dnsguard::eval {

Folds kfold_split(const LabeledDataset& data, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw Error(Errc::TooFewSamples, "cross-validation needs k >= 2");
  if (data.size() < k) {
    throw Error(Errc::TooFewSamples, "cannot split " + std::to_string(data.size()) +
                                         " samples into " + std::to_string(k) + " folds");
  }

  std::array<std::vector<std::size_t>, kNumClasses> by_class;
  for (std::size_t i = 0; i < data.size(); ++i) {
    by_class[index_of(data.samples[i].label)].push_back(i);
  }
  std::size_t present = 0;
  for (const auto& members : by_class) present += members.empty() ? 0 : 1;

  Folds folds;
  folds.test_indices.resize(k);
  for (const auto& members : by_class) {
    if (!members.empty() && members.size() * present < k) folds.stratified = false;
  }

  Rng rng(seed);
  std::vector<std::size_t> deal;
  deal.reserve(data.size());
  if (folds.stratified) {
    for (auto& members : by_class) {
      rng.shuffle(std::span<std::size_t>(members));
      deal.insert(deal.end(), members.begin(), members.end());
    }
  } else {
    for (std::size_t i = 0; i < data.size(); ++i) deal.push_back(i);
    rng.shuffle(std::span<std::size_t>(deal));
  }
  for (std::size_t pos = 0; pos < deal.size(); ++pos) folds.test_indices[pos % k].push_back(deal[pos]);
  for (auto& fold : folds.test_indices) std::sort(fold.begin(), fold.end());
  return folds;
}

Recipe mlp_recipe(const classifiers::MlpTrainConfig& cfg, std::size_t hidden, std::string name) {
  classifiers::validate(cfg);
  return {std::move(name), [cfg, hidden](const LabeledDataset& train, std::uint64_t seed) {
            auto run_cfg = cfg;
            run_cfg.seed = seed;
            auto init = classifiers::mlp_init(hidden, seed, cfg.weight_init_range);
            auto trained = classifiers::mlp_train_lm(std::move(init), train, run_cfg);
            auto model = std::make_shared<const classifiers::MlpModel>(std::move(trained.model));
            FoldModel fm;
            fm.classify = [model](const FeatureVector& x) { return classifiers::mlp_classify(*model, x); };
            fm.output = [model](const FeatureVector& x) {
              return classifiers::mlp_forward(*model, x.to_array());
            };
            fm.report = trained.report;
            return fm;
          }};
}

Recipe rbf_recipe(const classifiers::RbfTrainConfig& cfg, std::string name) {
  return {std::move(name), [cfg](const LabeledDataset& train, std::uint64_t seed) {
            auto run_cfg = cfg;
            run_cfg.seed = seed;
            auto trained = classifiers::rbf_train(train, run_cfg);
            auto model = std::make_shared<const classifiers::RbfModel>(std::move(trained.model));
            FoldModel fm;
            fm.classify = [model](const FeatureVector& x) { return classifiers::rbf_classify(*model, x); };
            fm.output = [model](const FeatureVector& x) {
              return classifiers::rbf_forward(*model, x.to_array());
            };
            fm.report = trained.report;
            return fm;
          }};
}

Recipe som_recipe(const classifiers::SomTrainConfig& cfg, std::string name) {
  classifiers::validate(cfg);
  return {std::move(name), [cfg](const LabeledDataset& train, std::uint64_t seed) {
            auto run_cfg = cfg;
            run_cfg.seed = seed;
            const auto started = std::chrono::steady_clock::now();
            auto trained = classifiers::som_train(classifiers::som_init(seed), train, run_cfg);
            auto labeled = classifiers::som_label(std::move(trained.model), train);
            auto model = std::make_shared<const classifiers::SomModel>(std::move(labeled));
            FoldModel fm;
            fm.classify = [model](const FeatureVector& x) { return classifiers::som_classify(*model, x); };
            fm.report = trained.report;
            fm.report.wall_time =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
            return fm;
          }};
}

MetricSet CvResult::fold_mean() const {
  auto mean_of = [&](std::optional<double> MetricSet::*field) -> std::optional<double> {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& m : fold_metrics) {
      if (m.*field) {
        sum += *(m.*field);
        ++n;
      }
    }
    if (n == 0) return std::nullopt;
    return sum / static_cast<double>(n);
  };
  return {mean_of(&MetricSet::accuracy), mean_of(&MetricSet::dr_direct),
          mean_of(&MetricSet::dr_amplification), mean_of(&MetricSet::far),
          mean_of(&MetricSet::accuracy_3class)};
}

std::uint64_t fold_seed(std::uint64_t seed, std::size_t fold) noexcept {
  return derive_seed(seed, static_cast<std::uint64_t>(fold) + 1);
}

CvResult cross_validate(const Recipe& recipe, const LabeledDataset& data, std::size_t k,
                        std::uint64_t seed) {
  const Folds folds = kfold_split(data, k, seed);
  CvResult result;
  result.classifier = recipe.name;
  result.folds = k;
  result.stratified = folds.stratified;

  std::vector<char> in_test(data.size(), 0);
  double squared_error = 0.0;
  std::size_t output_terms = 0;
  bool outputs_available = true;

  for (std::size_t f = 0; f < k; ++f) {
    const auto& test = folds.test_indices[f];
    std::fill(in_test.begin(), in_test.end(), 0);
    for (const auto i : test) in_test[i] = 1;
    std::vector<std::size_t> train_idx;
    train_idx.reserve(data.size() - test.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
      if (!in_test[i]) train_idx.push_back(i);
    }
    const LabeledDataset train = data.subset(train_idx);

    FoldModel model;
    const auto started = std::chrono::steady_clock::now();
    try {
      model = recipe.train(train, fold_seed(seed, f));
    } catch (const Error& e) {
      throw Error(e.code(), recipe.name + " fold " + std::to_string(f) + ": " + e.what());
    }
    result.training_time +=
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    result.train_mse += model.report.final_mse;

    ConfusionCounts fold_counts;
    for (const auto i : test) {
      const Sample& s = data.samples[i];
      fold_counts.add(s.label, model.classify(s.features));
      if (model.output) {
        const Vec3 y = model.output(s.features);
        const Vec3 t = target_code(s.label);
        for (std::size_t c = 0; c < 3; ++c) squared_error += (y[c] - t[c]) * (y[c] - t[c]);
        output_terms += 3;
      } else {
        outputs_available = false;
      }
    }
    result.fold_metrics.push_back(metric_set(fold_counts));
    result.pooled += fold_counts;
  }

  result.train_mse /= static_cast<double>(k);
  if (outputs_available && output_terms > 0) {
    result.test_mse = squared_error / static_cast<double>(output_terms);
  }
  result.metrics = metric_set(result.pooled);
  return result;
}

std::vector<SweepRow> sweep_hidden_neurons(const LabeledDataset& data,
                                           std::span<const std::size_t> widths, std::size_t k,
                                           std::uint64_t seed,
                                           const classifiers::MlpTrainConfig& base) {
  for (const auto w : widths) {
    if (w < kSweepMinWidth || w > kSweepMaxWidth) {
      throw Error(Errc::InvalidWidth, "sweep widths must lie in [3, 21], got " + std::to_string(w));
    }
  }
  std::vector<SweepRow> rows;
  rows.reserve(widths.size());
  for (const auto w : widths) {
    const CvResult cv = cross_validate(mlp_recipe(base, w), data, k, seed);
    rows.push_back({w, cv.metrics, cv.train_mse, cv.test_mse.value_or(0.0)});
  }
  return rows;
}

}  // namespace dnsguard::eval
