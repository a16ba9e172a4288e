#include "dnsguard/trace_io.hpp"

#include <array>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <string>

#include "dnsguard/error.hpp"
#include "dnsguard/detail/text_util.hpp"

namespace dnsguard::simnet {

namespace {

using detail::exact_double;
using detail::parse_double;
using detail::parse_int;

constexpr std::string_view kColumns = "seq,timestamp,kind,size,disposition,flow_id";

struct ConfigField {
  std::string_view key;
  std::function<std::string(const ScenarioConfig&)> write;
  std::function<bool(ScenarioConfig&, std::string_view)> read;
};

template <typename T>
ConfigField real_field(std::string_view key, T ScenarioConfig::*member) {
  return {key, [member](const ScenarioConfig& c) { return exact_double(c.*member); },
          [member](ScenarioConfig& c, std::string_view text) {
            const auto v = parse_double(text);
            if (!v) return false;
            c.*member = *v;
            return true;
          }};
}

ConfigField count_field(std::string_view key, std::uint32_t ScenarioConfig::*member) {
  return {key, [member](const ScenarioConfig& c) { return std::to_string(c.*member); },
          [member](ScenarioConfig& c, std::string_view text) {
            const auto v = parse_int<std::uint32_t>(text);
            if (!v) return false;
            c.*member = *v;
            return true;
          }};
}

const std::vector<ConfigField>& config_fields() {
  static const std::vector<ConfigField> fields = {
      real_field("duration", &ScenarioConfig::duration),
      real_field("window_len", &ScenarioConfig::window_len),
      real_field("legit_interarrival", &ScenarioConfig::legit_interarrival),
      count_field("request_size", &ScenarioConfig::request_size),
      count_field("normal_response_size", &ScenarioConfig::normal_response_size),
      count_field("amp_response_size", &ScenarioConfig::amp_response_size),
      count_field("retransmit_max", &ScenarioConfig::retransmit_max),
      real_field("retransmit_timeout", &ScenarioConfig::retransmit_timeout),
      real_field("bottleneck_rate", &ScenarioConfig::bottleneck_rate),
      real_field("bottleneck_delay", &ScenarioConfig::bottleneck_delay),
      real_field("edge_rate", &ScenarioConfig::edge_rate),
      real_field("edge_delay", &ScenarioConfig::edge_delay),
      count_field("queue_capacity", &ScenarioConfig::queue_capacity),
      {"attack_kind",
       [](const ScenarioConfig& c) { return std::string(to_string(c.attack_kind)); },
       [](ScenarioConfig& c, std::string_view text) {
         const auto kind = parse_attack_kind(text);
         if (!kind) return false;
         c.attack_kind = *kind;
         return true;
       }},
      real_field("attack_rate", &ScenarioConfig::attack_rate),
      count_field("attack_packet_size", &ScenarioConfig::attack_packet_size),
      real_field("attack_start_min", &ScenarioConfig::attack_start_min),
      real_field("attack_start_max", &ScenarioConfig::attack_start_max),
      real_field("attack_duration", &ScenarioConfig::attack_duration),
  };
  return fields;
}

std::string format_timestamp(std::chrono::microseconds ts) {
  const auto us = ts.count();
  std::string frac = std::to_string(us % 1'000'000);
  frac.insert(0, 6 - frac.size(), '0');
  return std::to_string(us / 1'000'000) + "." + frac;
}

std::optional<std::chrono::microseconds> parse_timestamp(std::string_view text) {
  const auto dot = text.find('.');
  if (dot == std::string_view::npos || text.size() - dot - 1 != 6) return std::nullopt;
  const auto whole = parse_int<std::int64_t>(text.substr(0, dot));
  const auto frac = parse_int<std::int64_t>(text.substr(dot + 1));
  if (!whole || !frac || *whole < 0 || *frac < 0) return std::nullopt;
  return std::chrono::microseconds(*whole * 1'000'000 + *frac);
}

}  // namespace

void write_trace(std::ostream& out, const PacketTrace& trace, std::string_view comment) {
  for (const auto& f : config_fields()) {
    out << '#' << f.key << '=' << f.write(trace.config) << '\n';
  }
  out << "#seed=" << trace.seed << '\n';
  out << "#attack_start="
      << (trace.truth.attack_interval ? exact_double(trace.truth.attack_interval->start) : "")
      << '\n';
  out << "#attack_end="
      << (trace.truth.attack_interval ? exact_double(trace.truth.attack_interval->end) : "")
      << '\n';
  out << "#events=" << trace.events.size() << '\n';
  if (!comment.empty()) out << "# " << comment << '\n';
  out << kColumns << '\n';

  std::string line;
  for (const auto& ev : trace.events) {
    line.clear();
    line += std::to_string(ev.seq);
    line += ',';
    line += format_timestamp(ev.timestamp);
    line += ',';
    line += to_string(ev.kind);
    line += ',';
    line += std::to_string(ev.size);
    line += ',';
    line += to_string(ev.disposition);
    line += ',';
    line += std::to_string(static_cast<std::uint64_t>(ev.flow_id));
    line += '\n';
    out.write(line.data(), static_cast<std::streamsize>(line.size()));
  }
}

PacketTrace read_trace(std::istream& in) {
  PacketTrace trace;
  std::map<std::string, std::string, std::less<>> header;
  std::string raw;
  std::size_t line_no = 0;
  bool columns_seen = false;

  while (!columns_seen && std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = detail::trim_cr(raw);
    if (line.starts_with("# ") || line == "#") continue;
    if (line.starts_with('#')) {
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) throw ParseError(line_no, "", "header line without '='");
      header.emplace(std::string(line.substr(1, eq - 1)), std::string(line.substr(eq + 1)));
      continue;
    }
    if (line != kColumns) throw ParseError(line_no, "", "expected column line");
    columns_seen = true;
  }
  if (!columns_seen) throw ParseError(line_no, "", "truncated trace: missing column line");

  auto take = [&](std::string_view key) -> const std::string& {
    const auto it = header.find(key);
    if (it == header.end()) throw ParseError(0, std::string(key), "missing header key");
    return it->second;
  };

  for (const auto& f : config_fields()) {
    if (!f.read(trace.config, take(f.key))) {
      throw ParseError(0, std::string(f.key), "bad header value '" + take(f.key) + "'");
    }
  }
  const auto seed = parse_int<std::uint64_t>(take("seed"));
  if (!seed) throw ParseError(0, "seed", "bad seed");
  trace.seed = *seed;

  trace.truth.attack_kind = trace.config.attack_kind;
  const std::string& start_text = take("attack_start");
  const std::string& end_text = take("attack_end");
  if (start_text.empty() != end_text.empty()) {
    throw ParseError(0, "attack_start", "attack_start and attack_end must both be set or empty");
  }
  if (!start_text.empty()) {
    const auto start = parse_double(start_text);
    const auto end = parse_double(end_text);
    if (!start) throw ParseError(0, "attack_start", "bad value");
    if (!end) throw ParseError(0, "attack_end", "bad value");
    trace.truth.attack_interval = Interval{*start, *end};
  }
  const auto expected = parse_int<std::uint64_t>(take("events"));
  if (!expected) throw ParseError(0, "events", "bad event count");

  trace.events.reserve(*expected);
  static constexpr std::array<std::string_view, 6> kNames = {
      "seq", "timestamp", "kind", "size", "disposition", "flow_id"};
  while (std::getline(in, raw)) {
    ++line_no;
    if (in.eof()) throw ParseError(line_no, "", "truncated trace: last row has no newline");
    const std::string_view line = detail::trim_cr(raw);
    const auto cols = detail::split(line, ',');
    if (cols.size() != kNames.size()) {
      throw ParseError(line_no, "", "expected 6 fields, got " + std::to_string(cols.size()));
    }
    PacketEvent ev;
    const auto seq = parse_int<std::uint64_t>(cols[0]);
    if (!seq) throw ParseError(line_no, std::string(kNames[0]), "bad integer");
    ev.seq = *seq;
    const auto ts = parse_timestamp(cols[1]);
    if (!ts) throw ParseError(line_no, std::string(kNames[1]), "bad timestamp");
    ev.timestamp = *ts;
    const auto kind = parse_packet_kind(cols[2]);
    if (!kind) throw ParseError(line_no, std::string(kNames[2]), "unknown packet kind");
    ev.kind = *kind;
    const auto size = parse_int<std::uint32_t>(cols[3]);
    if (!size) throw ParseError(line_no, std::string(kNames[3]), "bad size");
    ev.size = *size;
    const auto disp = parse_disposition(cols[4]);
    if (!disp) throw ParseError(line_no, std::string(kNames[4]), "unknown disposition");
    ev.disposition = *disp;
    const auto flow = parse_int<std::uint64_t>(cols[5]);
    if (!flow) throw ParseError(line_no, std::string(kNames[5]), "bad flow id");
    ev.flow_id = FlowId{*flow};
    trace.events.push_back(ev);
  }
  if (trace.events.size() != *expected) {
    throw ParseError(line_no, "events",
                     "truncated trace: expected " + std::to_string(*expected) + " events, read " +
                         std::to_string(trace.events.size()));
  }
  return trace;
}

void save_trace(const std::filesystem::path& path, const PacketTrace& trace,
                std::string_view comment) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::ConfigError, "cannot open " + path.string() + " for writing");
  write_trace(out, trace, comment);
  if (!out) throw Error(Errc::ConfigError, "failed writing " + path.string());
}

PacketTrace load_trace(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(0, "", "cannot open " + path.string());
  return read_trace(in);
}

}  // namespace dnsguard::simnet
