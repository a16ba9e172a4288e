#include "dnsguard/dataset_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "dnsguard/error.hpp"
#include "dnsguard/detail/text_util.hpp"

namespace dnsguard {

namespace {

constexpr std::string_view kHeader = "throughput_bps,mean_packet_size_bytes,packet_loss,label";
constexpr std::string_view kSourcePrefix = "# source=";

}  // namespace

void write_dataset(std::ostream& out, const LabeledDataset& data, std::string_view comment) {
  if (!comment.empty()) out << "# " << comment << '\n';
  for (const auto& source : data.provenance) out << kSourcePrefix << source << '\n';
  out << kHeader << '\n';
  for (const auto& s : data.samples) {
    out << detail::fixed6(s.features.throughput_bps) << ','
        << detail::fixed6(s.features.mean_packet_size) << ','
        << detail::fixed6(s.features.packet_loss) << ',' << to_string(s.label) << '\n';
  }
}

LabeledDataset read_dataset(std::istream& in) {
  LabeledDataset data;
  std::string raw;
  std::size_t line_no = 0;
  bool header_seen = false;
  static constexpr std::string_view kNames[] = {"throughput_bps", "mean_packet_size_bytes",
                                                "packet_loss"};

  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = detail::trim_cr(raw);
    if (!header_seen) {
      if (line.starts_with(kSourcePrefix)) {
        data.provenance.emplace_back(line.substr(kSourcePrefix.size()));
        continue;
      }
      if (line.starts_with('#') || line.empty()) continue;
      if (line != kHeader) throw ParseError(line_no, "", "expected dataset header");
      header_seen = true;
      continue;
    }
    if (line.empty()) continue;
    const auto cols = detail::split(line, ',');
    if (cols.size() != 4) {
      throw ParseError(line_no, "", "expected 4 fields, got " + std::to_string(cols.size()));
    }
    Vec3 v{};
    for (std::size_t i = 0; i < 3; ++i) {
      const auto value = detail::parse_double(cols[i]);
      if (!value || !(*value >= 0.0)) {
        throw ParseError(line_no, std::string(kNames[i]), "expected a non-negative number");
      }
      v[i] = *value;
    }
    const auto label = parse_label(cols[3]);
    if (!label) {
      throw ParseError(line_no, "label", "unknown label '" + std::string(cols[3]) + "'");
    }
    data.samples.push_back(Sample{FeatureVector::from_array(v), *label});
  }
  if (!header_seen) throw ParseError(line_no, "", "missing dataset header");
  return data;
}

void save_dataset(const std::filesystem::path& path, const LabeledDataset& data,
                  std::string_view comment) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::ConfigError, "cannot open " + path.string() + " for writing");
  write_dataset(out, data, comment);
  if (!out) throw Error(Errc::ConfigError, "failed writing " + path.string());
}

LabeledDataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(0, "", "cannot open " + path.string());
  return read_dataset(in);
}

}  // namespace dnsguard
