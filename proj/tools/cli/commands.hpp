#pragma once

// The six CLI stages. Each writes its outputs under `out` with fixed file
// names, logs progress to stderr and returns what it wrote.

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "cli/config.hpp"
#include "dnsguard/crossval.hpp"
#include "dnsguard/error.hpp"
#include "dnsguard/model_io.hpp"
#include "dnsguard/report.hpp"

namespace dnsguard::cli {

namespace fs = std::filesystem;

enum class ClassifierChoice { Mlp, Rbf, Som, All };

ClassifierChoice parse_classifier(const std::string& text);
/// Expands All into Mlp, Rbf, Som (table order).
std::vector<ClassifierChoice> expand(ClassifierChoice choice);
/// "mlp", "rbf" or "som"; used in file names.
std::string file_tag(ClassifierChoice c);
/// "BP", "RBF" or "SOM"; used in reports.
std::string display_name(ClassifierChoice c);

/// `# seed=... config_hash=...` payload shared by every output file.
std::string header_comment(const PipelineConfig& cfg);

/// Writes traces/<block>_<run>.trace (run zero-padded to 3 digits) and returns
/// the paths in sorted order.
std::vector<fs::path> cmd_simulate(const PipelineConfig& cfg, const fs::path& out);

/// Files are taken as given; directories contribute their *.trace files.
/// The result is sorted so the dataset row order does not depend on argument
/// order.
std::vector<fs::path> collect_traces(std::span<const fs::path> inputs);

/// Windows, labels and extracts every trace into out/dataset.csv.
LabeledDataset cmd_features(const PipelineConfig& cfg, std::span<const fs::path> traces,
                            const fs::path& out);

/// Trains on the whole dataset and writes out/model_<tag>.json per classifier.
std::vector<classifiers::ModelRecord> cmd_train(const PipelineConfig& cfg, const fs::path& dataset,
                                                ClassifierChoice choice, const fs::path& out);

/// k-fold CV per classifier; writes report.csv, timing.csv and report.txt.
eval::EvalReport cmd_evaluate(const PipelineConfig& cfg, const fs::path& dataset,
                              ClassifierChoice choice, const fs::path& out);

/// Hidden-width sweep of the MLP; writes sweep.csv.
std::vector<eval::SweepRow> cmd_sweep(const PipelineConfig& cfg, const fs::path& dataset,
                                      std::span<const std::size_t> widths, const fs::path& out);

/// simulate, then features over the written traces, then evaluate over the
/// written dataset.
eval::EvalReport cmd_pipeline(const PipelineConfig& cfg, ClassifierChoice choice,
                              const fs::path& out);

/// Process exit status for an error code: 2 config, 3 parse, 4 training.
int exit_code(Errc code) noexcept;
/// Single-line `error: kind=... exit=... message="..."` description.
std::string error_line(const Error& e);

}  // namespace dnsguard::cli
