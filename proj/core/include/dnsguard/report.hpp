#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dnsguard/crossval.hpp"

namespace dnsguard::eval {

struct EvalReport {
  std::vector<CvResult> entries;
  std::string dataset_fingerprint;
  std::uint64_t seed = 0;
  std::size_t folds = 0;
};

/// One classifier row of the comparison table.
struct TableRow {
  std::string classifier;
  std::optional<double> training_time;  // seconds
  MetricSet metrics;
  std::size_t folds = 0;
};

std::vector<TableRow> table_rows(const EvalReport& report);

/// Aligned text table with columns: classifier, training time (sec),
/// DR (direct DoS), DR (amplification), accuracy, FAR. Two decimals;
/// undefined metrics print as "—".
std::string render_table(std::span<const TableRow> rows);

/// Deterministic CSV (no wall-clock values):
/// `classifier,dr_direct,dr_amp,accuracy,far,accuracy_3class,folds`, 6 decimals.
std::string render_metrics_csv(std::span<const TableRow> rows, std::string_view comment = {});

/// `classifier,training_time_sec`
std::string render_timing_csv(std::span<const TableRow> rows, std::string_view comment = {});

struct RenderedReport {
  std::string table;
  std::string csv;
  std::string timing_csv;
};

/// Throws EmptyData for a report without entries.
RenderedReport render_report(const EvalReport& report, std::string_view comment = {});

/// Inverse of render_metrics_csv (training time is not part of that file).
std::vector<TableRow> parse_metrics_csv(std::istream& in);

/// `width,dr_direct,dr_amp,accuracy,far,train_mse,test_mse`
std::string render_sweep_csv(std::span<const SweepRow> rows, std::string_view comment = {});

/// FNV-1a 64 of the dataset's CSV serialization, as 16 hex digits.
std::string dataset_fingerprint(const LabeledDataset& data);

/// FNV-1a 64 of arbitrary bytes, as 16 hex digits.
std::string fnv1a_hex(std::string_view bytes);

}  // namespace dnsguard::eval
