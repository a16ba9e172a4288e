#include "dnsguard/report.hpp"

#include <algorithm>
#include <istream>
#include <sstream>

#include "dnsguard/dataset_io.hpp"
#include "dnsguard/error.hpp"
#include "dnsguard/detail/text_util.hpp"

namespace dnsguard::eval {

namespace {

constexpr std::string_view kMissing = "—";
constexpr std::string_view kMetricsHeader =
    "classifier,dr_direct,dr_amp,accuracy,far,accuracy_3class,folds";

std::string fixed2(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 2);
  return std::string(buf, res.ptr);
}

std::string cell(const std::optional<double>& v) { return v ? fixed2(*v) : std::string(kMissing); }

std::string csv_cell(const std::optional<double>& v) {
  return v ? detail::fixed6(*v) : std::string(kMissing);
}

// Display width in code points; the table only contains ASCII and "—".
std::size_t display_width(std::string_view s) {
  std::size_t n = 0;
  for (const char c : s) n += (static_cast<unsigned char>(c) & 0xC0) != 0x80 ? 1 : 0;
  return n;
}

void pad_right(std::string& out, std::string_view s, std::size_t width) {
  out += s;
  out.append(width - std::min(width, display_width(s)), ' ');
}

void pad_left(std::string& out, std::string_view s, std::size_t width) {
  out.append(width - std::min(width, display_width(s)), ' ');
  out += s;
}

std::string comment_line(std::string_view comment) {
  return comment.empty() ? std::string() : "# " + std::string(comment) + "\n";
}

}  // namespace

std::vector<TableRow> table_rows(const EvalReport& report) {
  std::vector<TableRow> rows;
  rows.reserve(report.entries.size());
  for (const auto& e : report.entries) {
    rows.push_back({e.classifier, e.training_time, e.metrics, e.folds});
  }
  return rows;
}

std::string render_table(std::span<const TableRow> rows) {
  const std::vector<std::string> headers = {"Classifier", "Training time (sec)",
                                            "DR (direct DoS)", "DR (amplification)",
                                            "Accuracy", "FAR"};
  std::vector<std::vector<std::string>> cells;
  for (const auto& r : rows) {
    cells.push_back({r.classifier, cell(r.training_time), cell(r.metrics.dr_direct),
                     cell(r.metrics.dr_amplification), cell(r.metrics.accuracy),
                     cell(r.metrics.far)});
  }
  std::vector<std::size_t> widths(headers.size());
  for (std::size_t c = 0; c < headers.size(); ++c) {
    widths[c] = display_width(headers[c]);
    for (const auto& row : cells) widths[c] = std::max(widths[c], display_width(row[c]));
  }

  std::string out;
  auto emit_row = [&](const std::vector<std::string>& row) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      out += c == 0 ? "" : " | ";
      if (c == 0) pad_right(out, row[c], widths[c]);
      else pad_left(out, row[c], widths[c]);
    }
    out += '\n';
  };
  emit_row(headers);
  for (std::size_t c = 0; c < widths.size(); ++c) {
    out += c == 0 ? "" : "-+-";
    out.append(widths[c], '-');
  }
  out += '\n';
  for (const auto& row : cells) emit_row(row);
  return out;
}

std::string render_metrics_csv(std::span<const TableRow> rows, std::string_view comment) {
  std::string out = comment_line(comment);
  out += kMetricsHeader;
  out += '\n';
  for (const auto& r : rows) {
    out += r.classifier + ',' + csv_cell(r.metrics.dr_direct) + ',' +
           csv_cell(r.metrics.dr_amplification) + ',' + csv_cell(r.metrics.accuracy) + ',' +
           csv_cell(r.metrics.far) + ',' + csv_cell(r.metrics.accuracy_3class) + ',' +
           std::to_string(r.folds) + '\n';
  }
  return out;
}

std::string render_timing_csv(std::span<const TableRow> rows, std::string_view comment) {
  std::string out = comment_line(comment);
  out += "classifier,training_time_sec\n";
  for (const auto& r : rows) out += r.classifier + ',' + csv_cell(r.training_time) + '\n';
  return out;
}

RenderedReport render_report(const EvalReport& report, std::string_view comment) {
  if (report.entries.empty()) throw Error(Errc::EmptyData, "report has no classifier entries");
  const auto rows = table_rows(report);
  return {render_table(rows), render_metrics_csv(rows, comment), render_timing_csv(rows, comment)};
}

std::vector<TableRow> parse_metrics_csv(std::istream& in) {
  std::vector<TableRow> rows;
  std::string raw;
  std::size_t line_no = 0;
  bool header_seen = false;
  static constexpr std::string_view kNames[] = {"dr_direct", "dr_amp", "accuracy", "far",
                                                "accuracy_3class"};
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = detail::trim_cr(raw);
    if (line.empty() || line.starts_with('#')) continue;
    if (!header_seen) {
      if (line != kMetricsHeader) throw ParseError(line_no, "", "expected report header");
      header_seen = true;
      continue;
    }
    const auto cols = detail::split(line, ',');
    if (cols.size() != 7) throw ParseError(line_no, "", "expected 7 fields");
    TableRow row;
    row.classifier = std::string(cols[0]);
    std::optional<double>* targets[] = {&row.metrics.dr_direct, &row.metrics.dr_amplification,
                                        &row.metrics.accuracy, &row.metrics.far,
                                        &row.metrics.accuracy_3class};
    for (std::size_t i = 0; i < 5; ++i) {
      if (cols[i + 1] == kMissing) continue;
      const auto v = detail::parse_double(cols[i + 1]);
      if (!v) throw ParseError(line_no, std::string(kNames[i]), "bad number");
      *targets[i] = *v;
    }
    const auto folds = detail::parse_int<std::size_t>(cols[6]);
    if (!folds) throw ParseError(line_no, "folds", "bad integer");
    row.folds = *folds;
    rows.push_back(std::move(row));
  }
  if (!header_seen) throw ParseError(line_no, "", "missing report header");
  return rows;
}

std::string render_sweep_csv(std::span<const SweepRow> rows, std::string_view comment) {
  std::string out = comment_line(comment);
  out += "width,dr_direct,dr_amp,accuracy,far,train_mse,test_mse\n";
  for (const auto& r : rows) {
    out += std::to_string(r.width) + ',' + csv_cell(r.metrics.dr_direct) + ',' +
           csv_cell(r.metrics.dr_amplification) + ',' + csv_cell(r.metrics.accuracy) + ',' +
           csv_cell(r.metrics.far) + ',' + detail::exact_double(r.train_mse) + ',' +
           detail::exact_double(r.test_mse) + '\n';
  }
  return out;
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = kHex[h & 0xF];
    h >>= 4;
  }
  return out;
}

std::string dataset_fingerprint(const LabeledDataset& data) {
  std::ostringstream os;
  LabeledDataset bare;
  bare.samples = data.samples;
  write_dataset(os, bare);
  return fnv1a_hex(os.str());
}

}  // namespace dnsguard::eval
