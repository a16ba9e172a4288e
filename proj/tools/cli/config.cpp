#include "cli/config.hpp"

#include <array>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "dnsguard/detail/text_util.hpp"
#include "dnsguard/error.hpp"
#include "dnsguard/preproc.hpp"
#include "dnsguard/random.hpp"
#include "dnsguard/report.hpp"

namespace dnsguard::cli {

namespace {

namespace pt = boost::property_tree;

constexpr std::string_view kBlockPrefix = "block:";

[[noreturn]] void fail(const std::string& section, const std::string& key, const std::string& msg) {
  throw Error(Errc::ConfigError, "[" + section + "] " + key + ": " + msg);
}

double as_double(const std::string& section, const std::string& key, const std::string& text) {
  const auto v = detail::parse_double(text);
  if (!v) fail(section, key, "expected a number, got '" + text + "'");
  return *v;
}

template <typename Int>
Int as_int(const std::string& section, const std::string& key, const std::string& text) {
  const auto v = detail::parse_int<Int>(text);
  if (!v) fail(section, key, "expected a non-negative integer, got '" + text + "'");
  return *v;
}

bool as_bool(const std::string& section, const std::string& key, const std::string& text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  fail(section, key, "expected true or false, got '" + text + "'");
}

using Setter = std::function<void(const std::string& section, const std::string& key,
                                  const std::string& value)>;

void apply_section(const std::string& section, const pt::ptree& node,
                   const std::map<std::string, Setter, std::less<>>& setters) {
  for (const auto& [key, child] : node) {
    if (!child.empty()) fail(section, key, "nested keys are not allowed");
    const auto it = setters.find(key);
    if (it == setters.end()) fail(section, key, "unknown key");
    it->second(section, key, child.data());
  }
}

template <typename Field>
Setter set_double(Field& field) {
  return [&field](const auto& s, const auto& k, const auto& v) { field = as_double(s, k, v); };
}

template <typename Int, typename Field>
Setter set_int(Field& field) {
  return [&field](const auto& s, const auto& k, const auto& v) { field = as_int<Int>(s, k, v); };
}

Setter set_bool(bool& field) {
  return [&field](const auto& s, const auto& k, const auto& v) { field = as_bool(s, k, v); };
}

ScenarioBlock parse_block(const std::string& section, const std::string& name,
                          const pt::ptree& node, std::optional<double> window_len) {
  simnet::ScenarioDraft d;
  ScenarioBlock block;
  block.name = name;
  auto opt_double = [](std::optional<double>& f) -> Setter {
    return [&f](const auto& s, const auto& k, const auto& v) { f = as_double(s, k, v); };
  };
  auto opt_u32 = [](std::optional<std::uint32_t>& f) -> Setter {
    return [&f](const auto& s, const auto& k, const auto& v) { f = as_int<std::uint32_t>(s, k, v); };
  };
  const std::map<std::string, Setter, std::less<>> setters = {
      {"runs", set_int<std::size_t>(block.runs)},
      {"duration", opt_double(d.duration)},
      {"legit_interarrival", opt_double(d.legit_interarrival)},
      {"request_size", opt_u32(d.request_size)},
      {"normal_response_size", opt_u32(d.normal_response_size)},
      {"amp_response_size", opt_u32(d.amp_response_size)},
      {"retransmit_max", opt_u32(d.retransmit_max)},
      {"retransmit_timeout", opt_double(d.retransmit_timeout)},
      {"bottleneck_rate", opt_double(d.bottleneck_rate)},
      {"bottleneck_delay", opt_double(d.bottleneck_delay)},
      {"edge_rate", opt_double(d.edge_rate)},
      {"edge_delay", opt_double(d.edge_delay)},
      {"queue_capacity", opt_u32(d.queue_capacity)},
      {"attack_kind",
       [&d](const auto& s, const auto& k, const auto& v) {
         d.attack_kind = simnet::parse_attack_kind(v);
         if (!d.attack_kind) fail(s, k, "expected none, direct_dos or amplification");
       }},
      {"attack_rate", opt_double(d.attack_rate)},
      {"attack_packet_size", opt_u32(d.attack_packet_size)},
      {"attack_start_min", opt_double(d.attack_start_min)},
      {"attack_start_max", opt_double(d.attack_start_max)},
      {"attack_duration", opt_double(d.attack_duration)},
  };
  apply_section(section, node, setters);
  if (block.runs == 0) fail(section, "runs", "must be >= 1");
  d.window_len = window_len;
  try {
    block.scenario = simnet::make_scenario(d);
  } catch (const Error& e) {
    fail(section, "scenario", e.what());
  }
  return block;
}

}  // namespace

std::vector<std::size_t> parse_widths(const std::string& text) {
  std::vector<std::size_t> widths;
  for (auto part : detail::split(text, ',')) {
    while (!part.empty() && part.front() == ' ') part.remove_prefix(1);
    while (!part.empty() && part.back() == ' ') part.remove_suffix(1);
    const auto v = detail::parse_int<std::size_t>(part);
    if (!v) throw Error(Errc::ConfigError, "bad width '" + std::string(part) + "'");
    widths.push_back(*v);
  }
  if (widths.empty()) throw Error(Errc::ConfigError, "empty width list");
  return widths;
}

PipelineConfig parse_config(std::istream& in) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw Error(Errc::ConfigError, "config line " + std::to_string(e.line()) + ": " + e.message());
  }

  PipelineConfig cfg;
  // Window length applies to every block, so read [pipeline] first.
  std::optional<double> window_len;
  if (const auto node = tree.get_child_optional(pt::ptree::path_type("pipeline", '\0'))) {
    const std::map<std::string, Setter, std::less<>> setters = {
        {"seed",
         [&cfg](const auto& s, const auto& k, const auto& v) {
           cfg.seed = as_int<std::uint64_t>(s, k, v);
           cfg.seed_set = true;
         }},
        {"folds", set_int<std::size_t>(cfg.folds)},
        {"window_len",
         [&window_len](const auto& s, const auto& k, const auto& v) { window_len = as_double(s, k, v); }},
    };
    apply_section("pipeline", *node, setters);
  }
  if (window_len) cfg.window_len = *window_len;
  if (!(cfg.window_len > 0.0)) fail("pipeline", "window_len", "must be > 0");

  std::set<std::string> seen_blocks;
  for (const auto& [section, node] : tree) {
    if (node.empty() && !node.data().empty()) fail("", section, "key outside any section");
    if (section == "pipeline") continue;
    if (section.starts_with(kBlockPrefix)) {
      const std::string name = section.substr(kBlockPrefix.size());
      if (name.empty() || name.find_first_of("/\\ .") != std::string::npos) {
        fail(section, "", "block names must be non-empty without '/', '\\', ' ' or '.'");
      }
      cfg.blocks.push_back(parse_block(section, name, node, cfg.window_len));
    } else if (section == "mlp") {
      auto& m = cfg.mlp;
      apply_section(section, node,
                    {{"hidden", set_int<std::size_t>(cfg.mlp_hidden)},
                     {"max_epochs", set_int<std::size_t>(m.max_epochs)},
                     {"target_mse", set_double(m.target_mse)},
                     {"lambda_init", set_double(m.lambda_init)},
                     {"lambda_up", set_double(m.lambda_up)},
                     {"lambda_down", set_double(m.lambda_down)},
                     {"lambda_max", set_double(m.lambda_max)},
                     {"weight_init_range", set_double(m.weight_init_range)},
                     {"scale_inputs", set_bool(m.scale_inputs)}});
    } else if (section == "rbf") {
      auto& r = cfg.rbf;
      apply_section(section, node,
                    {{"centers", set_int<std::size_t>(r.centers)},
                     {"ridge", set_double(r.ridge)},
                     {"target_mse", set_double(r.target_mse)},
                     {"scale_inputs", set_bool(r.scale_inputs)}});
    } else if (section == "som") {
      auto& s = cfg.som;
      apply_section(section, node,
                    {{"epochs", set_int<std::size_t>(s.epochs)},
                     {"ordering_lr", set_double(s.ordering_lr)},
                     {"ordering_steps", set_int<std::size_t>(s.ordering_steps)},
                     {"tuning_lr", set_double(s.tuning_lr)},
                     {"tuning_neighbor_dist", set_double(s.tuning_neighbor_dist)}});
    } else if (section == "sweep") {
      apply_section(section, node,
                    {{"widths", [&cfg](const auto&, const auto&, const auto& v) {
                        cfg.sweep_widths = parse_widths(v);
                      }}});
    } else {
      fail(section, "", "unknown section");
    }
    if (section.starts_with(kBlockPrefix) && !seen_blocks.insert(section).second) {
      fail(section, "", "duplicate block");
    }
  }

  try {
    classifiers::validate(cfg.mlp);
    classifiers::validate(cfg.som);
  } catch (const Error& e) {
    throw Error(Errc::ConfigError, e.what());
  }
  if (cfg.mlp_hidden < 1 || cfg.mlp_hidden > classifiers::kMaxHidden) {
    fail("mlp", "hidden", "must lie in [1, 64]");
  }
  if (cfg.rbf.centers < 2) fail("rbf", "centers", "must be >= 2");
  if (cfg.folds < 2) fail("pipeline", "folds", "must be >= 2");
  for (const auto w : cfg.sweep_widths) {
    if (w < 3 || w > 21) fail("sweep", "widths", "widths must lie in [3, 21]");
  }
  return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::ConfigError, "cannot open config " + path.string());
  return parse_config(in);
}

void validate(const PipelineConfig& cfg, bool need_all_classes) {
  if (!cfg.seed_set) throw Error(Errc::ConfigError, "no master seed: set [pipeline] seed or --seed");
  if (cfg.blocks.empty()) throw Error(Errc::ConfigError, "config defines no [block:NAME] sections");
  if (!need_all_classes) return;
  std::array<bool, kNumClasses> present{};
  for (const auto& b : cfg.blocks) present[index_of(label_for(b.scenario.attack_kind))] = true;
  for (const auto c : kAllLabels) {
    if (!present[index_of(c)]) {
      throw Error(Errc::ConfigError,
                  "training needs at least one block per class; none for " +
                      std::string(to_string(c)));
    }
  }
}

std::string canonical_text(const PipelineConfig& cfg) {
  using detail::exact_double;
  std::ostringstream os;
  os << "window_len=" << exact_double(cfg.window_len) << "\nfolds=" << cfg.folds << '\n';
  for (const auto& b : cfg.blocks) {
    const auto& s = b.scenario;
    os << "block=" << b.name << ";runs=" << b.runs << ";duration=" << exact_double(s.duration)
       << ";window_len=" << exact_double(s.window_len)
       << ";legit_interarrival=" << exact_double(s.legit_interarrival)
       << ";request_size=" << s.request_size << ";normal_response_size=" << s.normal_response_size
       << ";amp_response_size=" << s.amp_response_size << ";retransmit_max=" << s.retransmit_max
       << ";retransmit_timeout=" << exact_double(s.retransmit_timeout)
       << ";bottleneck_rate=" << exact_double(s.bottleneck_rate)
       << ";bottleneck_delay=" << exact_double(s.bottleneck_delay)
       << ";edge_rate=" << exact_double(s.edge_rate) << ";edge_delay=" << exact_double(s.edge_delay)
       << ";queue_capacity=" << s.queue_capacity << ";attack_kind=" << to_string(s.attack_kind)
       << ";attack_rate=" << exact_double(s.attack_rate)
       << ";attack_packet_size=" << s.attack_packet_size
       << ";attack_start_min=" << exact_double(s.attack_start_min)
       << ";attack_start_max=" << exact_double(s.attack_start_max)
       << ";attack_duration=" << exact_double(s.attack_duration) << '\n';
  }
  const auto& m = cfg.mlp;
  os << "mlp=hidden:" << cfg.mlp_hidden << ";max_epochs:" << m.max_epochs
     << ";target_mse:" << exact_double(m.target_mse) << ";lambda_init:" << exact_double(m.lambda_init)
     << ";lambda_up:" << exact_double(m.lambda_up) << ";lambda_down:" << exact_double(m.lambda_down)
     << ";lambda_max:" << exact_double(m.lambda_max)
     << ";weight_init_range:" << exact_double(m.weight_init_range)
     << ";scale_inputs:" << m.scale_inputs << '\n';
  const auto& r = cfg.rbf;
  os << "rbf=centers:" << r.centers << ";ridge:" << exact_double(r.ridge)
     << ";target_mse:" << exact_double(r.target_mse) << ";scale_inputs:" << r.scale_inputs << '\n';
  const auto& s = cfg.som;
  os << "som=epochs:" << s.epochs << ";ordering_lr:" << exact_double(s.ordering_lr)
     << ";ordering_steps:" << s.ordering_steps << ";tuning_lr:" << exact_double(s.tuning_lr)
     << ";tuning_neighbor_dist:" << exact_double(s.tuning_neighbor_dist) << '\n';
  os << "sweep=";
  for (std::size_t i = 0; i < cfg.sweep_widths.size(); ++i) {
    os << (i ? "," : "") << cfg.sweep_widths[i];
  }
  os << '\n';
  return os.str();
}

std::string config_hash(const PipelineConfig& cfg) { return eval::fnv1a_hex(canonical_text(cfg)); }

std::uint64_t run_seed(std::uint64_t master, std::size_t block, std::size_t run) noexcept {
  return derive_seed(derive_seed(master, static_cast<std::uint64_t>(block) + 1),
                     static_cast<std::uint64_t>(run) + 1);
}

}  // namespace dnsguard::cli
