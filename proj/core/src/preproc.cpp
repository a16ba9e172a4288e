#include "dnsguard/preproc.hpp"

#include <algorithm>
#include <cmath>

#include "dnsguard/error.hpp"

namespace dnsguard {

Vec3 target_code(ClassLabel label) noexcept {
  switch (label) {
    case ClassLabel::Normal: return {0.0, 0.0, 0.0};
    case ClassLabel::DirectDoS: return {0.0, 0.0, 1.0};
    case ClassLabel::Amplification: return {0.0, 1.0, 0.0};
  }
  return {0.0, 0.0, 0.0};
}

std::string_view to_string(ClassLabel label) noexcept {
  switch (label) {
    case ClassLabel::Normal: return "normal";
    case ClassLabel::DirectDoS: return "direct_dos";
    case ClassLabel::Amplification: return "amplification";
  }
  return "normal";
}

std::optional<ClassLabel> parse_label(std::string_view text) noexcept {
  for (const auto label : kAllLabels) {
    if (text == to_string(label)) return label;
  }
  return std::nullopt;
}

ClassLabel label_for(simnet::AttackKind kind) noexcept {
  switch (kind) {
    case simnet::AttackKind::None: return ClassLabel::Normal;
    case simnet::AttackKind::DirectDoS: return ClassLabel::DirectDoS;
    case simnet::AttackKind::Amplification: return ClassLabel::Amplification;
  }
  return ClassLabel::Normal;
}

ClassLabel nearest_code(const Vec3& output) noexcept {
  static constexpr std::array<ClassLabel, 3> kTieOrder = {
      ClassLabel::Normal, ClassLabel::Amplification, ClassLabel::DirectDoS};
  ClassLabel best = kTieOrder[0];
  double best_d2 = INFINITY;
  for (const auto label : kTieOrder) {
    const Vec3 code = target_code(label);
    double d2 = 0.0;
    for (std::size_t i = 0; i < 3; ++i) d2 += (output[i] - code[i]) * (output[i] - code[i]);
    if (d2 < best_d2) {
      best_d2 = d2;
      best = label;
    }
  }
  return best;
}

std::array<std::size_t, kNumClasses> LabeledDataset::class_counts() const noexcept {
  std::array<std::size_t, kNumClasses> counts{};
  for (const auto& s : samples) ++counts[index_of(s.label)];
  return counts;
}

LabeledDataset LabeledDataset::subset(std::span<const std::size_t> indices) const {
  LabeledDataset out;
  out.provenance = provenance;
  out.samples.reserve(indices.size());
  for (const auto i : indices) out.samples.push_back(samples.at(i));
  return out;
}

namespace preproc {

std::vector<WindowStats> window_trace(const simnet::PacketTrace& trace, double window_len) {
  if (!(window_len > 0.0)) throw Error(Errc::InvalidConfig, "window_len must be > 0");
  const auto count =
      static_cast<std::size_t>(std::max(0.0, std::ceil(trace.config.duration / window_len)));
  std::vector<WindowStats> windows(count);
  for (std::size_t i = 0; i < count; ++i) {
    windows[i].window_index = i;
    windows[i].start = static_cast<double>(i) * window_len;
  }
  if (count == 0) return windows;

  for (const auto& ev : trace.events) {
    using simnet::Disposition;
    if (ev.disposition != Disposition::DeliveredToServer &&
        ev.disposition != Disposition::DroppedAtQueue) {
      continue;
    }
    auto idx = static_cast<std::size_t>(std::floor(ev.seconds() / window_len));
    idx = std::min(idx, count - 1);
    WindowStats& w = windows[idx];
    if (ev.disposition == Disposition::DeliveredToServer) {
      w.bits_received += 8ULL * ev.size;
      ++w.packets_received;
    } else {
      ++w.packets_lost;
    }
  }
  return windows;
}

FeatureVector extract_features(const WindowStats& w, double window_len) {
  FeatureVector f;
  const auto bits = static_cast<double>(w.bits_received);
  f.throughput_bps = bits / window_len;
  f.mean_packet_size =
      w.packets_received == 0 ? 0.0 : (bits / 8.0) / static_cast<double>(w.packets_received);
  f.packet_loss = static_cast<double>(w.packets_lost);
  return f;
}

std::vector<ClassLabel> label_windows(std::span<const WindowStats> windows,
                                      const simnet::GroundTruth& truth, double window_len) {
  std::vector<ClassLabel> labels(windows.size(), ClassLabel::Normal);
  if (truth.attack_kind == simnet::AttackKind::None || !truth.attack_interval) return labels;
  const auto attack = label_for(truth.attack_kind);
  const auto& iv = *truth.attack_interval;
  for (std::size_t i = 0; i < windows.size(); ++i) {
    const double lo = std::max(iv.start, windows[i].start);
    const double hi = std::min(iv.end, windows[i].start + window_len);
    if (hi - lo > 0.5 * window_len) labels[i] = attack;
  }
  return labels;
}

Vec3 normalize_l2(const Vec3& v) {
  const double norm = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  if (norm == 0.0) throw Error(Errc::ZeroVector, "cannot normalize the zero vector");
  return {v[0] / norm, v[1] / norm, v[2] / norm};
}

void append_trace(LabeledDataset& out, const simnet::PacketTrace& trace, double window_len,
                  std::string source_id) {
  const auto windows = window_trace(trace, window_len);
  const auto labels = label_windows(windows, trace.truth, window_len);
  for (std::size_t i = 0; i < windows.size(); ++i) {
    out.samples.push_back(Sample{extract_features(windows[i], window_len), labels[i]});
  }
  out.provenance.push_back(std::move(source_id));
}

}  // namespace preproc
}  // namespace dnsguard
