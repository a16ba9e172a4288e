#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cli/commands.hpp"

namespace {

using namespace dnsguard;
using namespace dnsguard::cli;

struct CommonOptions {
  std::string config = DNSGUARD_DEFAULT_CONFIG;
  std::optional<std::uint64_t> seed;
  std::string out = "out";
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--config", opts.config, "Pipeline config file (INI)")->capture_default_str();
  cmd->add_option("--seed", opts.seed, "Master seed; overrides [pipeline] seed");
  cmd->add_option("--out", opts.out, "Output directory")->capture_default_str();
}

PipelineConfig resolve(const CommonOptions& opts, std::optional<std::size_t> k) {
  PipelineConfig cfg = load_config(opts.config);
  if (opts.seed) {
    cfg.seed = *opts.seed;
    cfg.seed_set = true;
  }
  if (k) {
    if (*k < 2) throw Error(Errc::ConfigError, "--k must be >= 2");
    cfg.folds = *k;
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DNS DoS detection pipeline: simulate traffic, extract window features, "
               "train and compare neural classifiers"};
  app.require_subcommand(1);

  CommonOptions opts;
  std::optional<std::size_t> k;
  std::string classifier;
  std::string dataset;
  std::string widths;
  std::vector<std::string> traces;

  auto* simulate = app.add_subcommand("simulate", "Run every scenario block and write traces");
  add_common(simulate, opts);

  auto* features = app.add_subcommand("features", "Window and label traces into dataset.csv");
  add_common(features, opts);
  features->add_option("traces", traces, "Trace files or directories (default: OUT/traces)");

  auto* train = app.add_subcommand("train", "Train classifiers on a dataset and write model files");
  add_common(train, opts);
  train->add_option("--dataset", dataset, "Dataset CSV (default: OUT/dataset.csv)");
  train->add_option("--classifier", classifier, "mlp|rbf|som|all")->default_str("mlp");

  auto* evaluate = app.add_subcommand("evaluate", "k-fold cross-validation report");
  add_common(evaluate, opts);
  evaluate->add_option("--dataset", dataset, "Dataset CSV (default: OUT/dataset.csv)");
  evaluate->add_option("--classifier", classifier, "mlp|rbf|som|all")->default_str("all");
  evaluate->add_option("--k", k, "Number of CV folds");

  auto* sweep = app.add_subcommand("sweep", "Hidden-neuron sweep of the MLP");
  add_common(sweep, opts);
  sweep->add_option("--dataset", dataset, "Dataset CSV (default: OUT/dataset.csv)");
  sweep->add_option("--widths", widths, "Comma separated widths in [3, 21]");
  sweep->add_option("--k", k, "Number of CV folds");

  auto* pipeline = app.add_subcommand("pipeline", "simulate, features and evaluate in one go");
  add_common(pipeline, opts);
  pipeline->add_option("--classifier", classifier, "mlp|rbf|som|all")->default_str("all");
  pipeline->add_option("--k", k, "Number of CV folds");

  CLI11_PARSE(app, argc, argv);

  try {
    const fs::path out = opts.out;
    const fs::path dataset_path = dataset.empty() ? out / "dataset.csv" : fs::path(dataset);
    auto choice = [&](const char* fallback) {
      return parse_classifier(classifier.empty() ? fallback : classifier);
    };

    if (simulate->parsed()) {
      const auto cfg = resolve(opts, std::nullopt);
      for (const auto& p : cmd_simulate(cfg, out)) std::cout << p.string() << '\n';
    } else if (features->parsed()) {
      const auto cfg = resolve(opts, std::nullopt);
      std::vector<fs::path> inputs(traces.begin(), traces.end());
      if (inputs.empty()) inputs.push_back(out / "traces");
      cmd_features(cfg, collect_traces(inputs), out);
      std::cout << (out / "dataset.csv").string() << '\n';
    } else if (train->parsed()) {
      const auto cfg = resolve(opts, std::nullopt);
      const auto c = choice("mlp");
      cmd_train(cfg, dataset_path, c, out);
      for (const auto one : expand(c)) {
        std::cout << (out / ("model_" + file_tag(one) + ".json")).string() << '\n';
      }
    } else if (evaluate->parsed()) {
      cmd_evaluate(resolve(opts, k), dataset_path, choice("all"), out);
    } else if (sweep->parsed()) {
      const auto cfg = resolve(opts, k);
      const auto list = widths.empty() ? cfg.sweep_widths : parse_widths(widths);
      cmd_sweep(cfg, dataset_path, list, out);
    } else if (pipeline->parsed()) {
      cmd_pipeline(resolve(opts, k), choice("all"), out);
    }
  } catch (const Error& e) {
    std::cerr << error_line(e) << '\n';
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: kind=Internal exit=1 message=\"" << e.what() << "\"\n";
    return 1;
  }
  return 0;
}
