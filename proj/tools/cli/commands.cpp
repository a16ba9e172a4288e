#include "cli/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "dnsguard/dataset_io.hpp"
#include "dnsguard/trace_io.hpp"

namespace dnsguard::cli {

namespace {

void log(const std::string& msg) { std::cerr << "[dnsguard] " << msg << '\n'; }

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(Errc::ConfigError, "cannot create directory " + dir.string() + ": " + ec.message());
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error(Errc::ConfigError, "failed writing " + path.string());
}

std::string run_name(const ScenarioBlock& block, std::size_t run) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%03zu", run);
  return block.name + "_" + buf;
}

std::string fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

eval::Recipe recipe_for(const PipelineConfig& cfg, ClassifierChoice c) {
  switch (c) {
    case ClassifierChoice::Mlp: return eval::mlp_recipe(cfg.mlp, cfg.mlp_hidden, display_name(c));
    case ClassifierChoice::Rbf: return eval::rbf_recipe(cfg.rbf, display_name(c));
    case ClassifierChoice::Som: return eval::som_recipe(cfg.som, display_name(c));
    case ClassifierChoice::All: break;
  }
  throw Error(Errc::ConfigError, "no recipe for 'all'");
}

LabeledDataset load_nonempty(const fs::path& path) {
  LabeledDataset data = load_dataset(path);
  if (data.empty()) throw Error(Errc::EmptyData, "dataset " + path.string() + " has no samples");
  return data;
}

}  // namespace

ClassifierChoice parse_classifier(const std::string& text) {
  if (text == "mlp") return ClassifierChoice::Mlp;
  if (text == "rbf") return ClassifierChoice::Rbf;
  if (text == "som") return ClassifierChoice::Som;
  if (text == "all") return ClassifierChoice::All;
  throw Error(Errc::ConfigError, "unknown classifier '" + text + "' (mlp|rbf|som|all)");
}

std::vector<ClassifierChoice> expand(ClassifierChoice choice) {
  if (choice == ClassifierChoice::All) {
    return {ClassifierChoice::Mlp, ClassifierChoice::Rbf, ClassifierChoice::Som};
  }
  return {choice};
}

std::string file_tag(ClassifierChoice c) {
  switch (c) {
    case ClassifierChoice::Mlp: return "mlp";
    case ClassifierChoice::Rbf: return "rbf";
    case ClassifierChoice::Som: return "som";
    case ClassifierChoice::All: return "all";
  }
  return "?";
}

std::string display_name(ClassifierChoice c) {
  switch (c) {
    case ClassifierChoice::Mlp: return "BP";
    case ClassifierChoice::Rbf: return "RBF";
    case ClassifierChoice::Som: return "SOM";
    case ClassifierChoice::All: return "all";
  }
  return "?";
}

std::string header_comment(const PipelineConfig& cfg) {
  return "seed=" + std::to_string(cfg.seed) + " config_hash=" + config_hash(cfg);
}

std::vector<fs::path> cmd_simulate(const PipelineConfig& cfg, const fs::path& out) {
  validate(cfg, false);
  const fs::path dir = out / "traces";
  ensure_dir(dir);
  const std::string comment = header_comment(cfg);
  std::vector<fs::path> written;
  for (std::size_t b = 0; b < cfg.blocks.size(); ++b) {
    const auto& block = cfg.blocks[b];
    for (std::size_t r = 0; r < block.runs; ++r) {
      const auto trace = simnet::run(block.scenario, run_seed(cfg.seed, b, r));
      const fs::path path = dir / (run_name(block, r) + ".trace");
      simnet::save_trace(path, trace, comment);
      log("simulate " + path.filename().string() + ": " + std::to_string(trace.events.size()) +
          " events");
      written.push_back(path);
    }
  }
  std::sort(written.begin(), written.end());
  return written;
}

std::vector<fs::path> collect_traces(std::span<const fs::path> inputs) {
  std::vector<fs::path> traces;
  for (const auto& p : inputs) {
    if (fs::is_directory(p)) {
      for (const auto& entry : fs::directory_iterator(p)) {
        if (entry.is_regular_file() && entry.path().extension() == ".trace") {
          traces.push_back(entry.path());
        }
      }
    } else {
      traces.push_back(p);
    }
  }
  std::sort(traces.begin(), traces.end());
  return traces;
}

LabeledDataset cmd_features(const PipelineConfig& cfg, std::span<const fs::path> traces,
                            const fs::path& out) {
  if (traces.empty()) throw Error(Errc::ConfigError, "no trace files given");
  LabeledDataset data;
  for (const auto& path : traces) {
    const auto trace = simnet::load_trace(path);
    const std::size_t before = data.size();
    preproc::append_trace(data, trace, cfg.window_len, path.stem().string());
    log("features " + path.filename().string() + ": " + std::to_string(data.size() - before) +
        " windows");
  }
  ensure_dir(out);
  save_dataset(out / "dataset.csv", data, header_comment(cfg));
  const auto counts = data.class_counts();
  log("dataset.csv: " + std::to_string(data.size()) + " samples (normal " +
      std::to_string(counts[0]) + ", direct_dos " + std::to_string(counts[1]) +
      ", amplification " + std::to_string(counts[2]) + ")");
  return data;
}

std::vector<classifiers::ModelRecord> cmd_train(const PipelineConfig& cfg, const fs::path& dataset,
                                                ClassifierChoice choice, const fs::path& out) {
  if (!cfg.seed_set) throw Error(Errc::ConfigError, "no master seed: set [pipeline] seed or --seed");
  const LabeledDataset data = load_nonempty(dataset);
  ensure_dir(out);
  const std::string provenance =
      header_comment(cfg) + " dataset=" + eval::dataset_fingerprint(data);
  std::vector<classifiers::ModelRecord> records;
  for (const auto c : expand(choice)) {
    classifiers::ModelRecord record;
    switch (c) {
      case ClassifierChoice::Mlp: {
        auto mcfg = cfg.mlp;
        mcfg.seed = cfg.seed;
        auto res = classifiers::mlp_train_lm(
            classifiers::mlp_init(cfg.mlp_hidden, cfg.seed, mcfg.weight_init_range), data, mcfg);
        record = classifiers::MlpRecord{std::move(res.model), mcfg, res.report};
        break;
      }
      case ClassifierChoice::Rbf: {
        auto rcfg = cfg.rbf;
        rcfg.seed = cfg.seed;
        auto res = classifiers::rbf_train(data, rcfg);
        record = classifiers::RbfRecord{std::move(res.model), rcfg, res.report};
        break;
      }
      case ClassifierChoice::Som: {
        auto scfg = cfg.som;
        scfg.seed = cfg.seed;
        auto res = classifiers::som_train(classifiers::som_init(cfg.seed), data, scfg);
        auto labeled = classifiers::som_label(std::move(res.model), data);
        record = classifiers::SomRecord{std::move(labeled), scfg, res.report};
        break;
      }
      case ClassifierChoice::All: break;
    }
    const fs::path path = out / ("model_" + file_tag(c) + ".json");
    classifiers::save_model(path, record, provenance);
    const auto& report = std::visit([](const auto& r) -> const auto& { return r.report; }, record);
    log("train " + display_name(c) + ": mse " + sci(report.final_mse) + ", " +
        std::to_string(report.epochs_run) + " epochs, " + fixed2(report.wall_time) + " s -> " +
        path.filename().string());
    records.push_back(std::move(record));
  }
  return records;
}

eval::EvalReport cmd_evaluate(const PipelineConfig& cfg, const fs::path& dataset,
                              ClassifierChoice choice, const fs::path& out) {
  if (!cfg.seed_set) throw Error(Errc::ConfigError, "no master seed: set [pipeline] seed or --seed");
  const LabeledDataset data = load_nonempty(dataset);
  eval::EvalReport report;
  report.dataset_fingerprint = eval::dataset_fingerprint(data);
  report.seed = cfg.seed;
  report.folds = cfg.folds;
  for (const auto c : expand(choice)) {
    auto cv = eval::cross_validate(recipe_for(cfg, c), data, cfg.folds, cfg.seed);
    log("evaluate " + cv.classifier + ": accuracy " +
        (cv.metrics.accuracy ? fixed2(*cv.metrics.accuracy) : std::string("-")) + ", " +
        fixed2(cv.training_time) + " s" + (cv.stratified ? "" : " (unstratified folds)"));
    report.entries.push_back(std::move(cv));
  }
  ensure_dir(out);
  const std::string comment = header_comment(cfg) + " dataset=" + report.dataset_fingerprint +
                              " folds=" + std::to_string(cfg.folds);
  const auto rendered = eval::render_report(report, comment);
  write_text(out / "report.csv", rendered.csv);
  write_text(out / "timing.csv", rendered.timing_csv);
  write_text(out / "report.txt", "# " + comment + "\n" + rendered.table);
  std::cout << rendered.table;
  return report;
}

std::vector<eval::SweepRow> cmd_sweep(const PipelineConfig& cfg, const fs::path& dataset,
                                      std::span<const std::size_t> widths, const fs::path& out) {
  if (!cfg.seed_set) throw Error(Errc::ConfigError, "no master seed: set [pipeline] seed or --seed");
  for (const auto w : widths) {
    if (w < eval::kSweepMinWidth || w > eval::kSweepMaxWidth) {
      throw Error(Errc::InvalidWidth, "sweep width " + std::to_string(w) + " outside " +
                                          std::to_string(eval::kSweepMinWidth) + ".." +
                                          std::to_string(eval::kSweepMaxWidth));
    }
  }
  const LabeledDataset data = load_nonempty(dataset);
  std::vector<eval::SweepRow> rows;
  for (const auto w : widths) {
    const std::size_t one[] = {w};
    auto row = eval::sweep_hidden_neurons(data, one, cfg.folds, cfg.seed, cfg.mlp);
    log("sweep width " + std::to_string(w) + ": accuracy " +
        (row[0].metrics.accuracy ? fixed2(*row[0].metrics.accuracy) : std::string("-")));
    rows.push_back(row[0]);
  }
  ensure_dir(out);
  const std::string comment = header_comment(cfg) + " dataset=" + eval::dataset_fingerprint(data) +
                              " folds=" + std::to_string(cfg.folds);
  const std::string csv = eval::render_sweep_csv(rows, comment);
  write_text(out / "sweep.csv", csv);
  std::cout << csv;
  return rows;
}

eval::EvalReport cmd_pipeline(const PipelineConfig& cfg, ClassifierChoice choice,
                              const fs::path& out) {
  validate(cfg, true);
  const auto traces = cmd_simulate(cfg, out);
  cmd_features(cfg, traces, out);
  return cmd_evaluate(cfg, out / "dataset.csv", choice, out);
}

int exit_code(Errc code) noexcept {
  switch (code) {
    case Errc::ConfigError:
    case Errc::InvalidConfig:
    case Errc::InvalidWidth:
      return 2;
    case Errc::ParseError:
      return 3;
    default:
      return 4;
  }
}

std::string error_line(const Error& e) {
  std::string msg = e.what();
  std::string quoted;
  for (const char c : msg) {
    if (c == '"' || c == '\\') quoted += '\\';
    quoted += c == '\n' ? ' ' : c;
  }
  std::string line = "error: kind=" + std::string(errc_name(e.code())) +
                     " exit=" + std::to_string(exit_code(e.code()));
  if (const auto* pe = dynamic_cast<const ParseError*>(&e)) {
    line += " line=" + std::to_string(pe->line());
    if (!pe->field().empty()) line += " field=" + pe->field();
  }
  return line + " message=\"" + quoted + "\"";
}

}  // namespace dnsguard::cli
