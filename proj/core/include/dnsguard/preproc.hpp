#pragma once

// Statistical preprocessing: tumbling monitoring windows over a packet trace,
// the three per-window traffic features, and ground-truth labels.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dnsguard/simnet.hpp"

namespace dnsguard {

enum class ClassLabel : std::uint8_t { Normal = 0, DirectDoS = 1, Amplification = 2 };

inline constexpr std::size_t kNumClasses = 3;
inline constexpr std::array<ClassLabel, kNumClasses> kAllLabels = {
    ClassLabel::Normal, ClassLabel::DirectDoS, ClassLabel::Amplification};

using Vec3 = std::array<double, 3>;

/// Output coding: Normal [0 0 0], DirectDoS [0 0 1], Amplification [0 1 0].
Vec3 target_code(ClassLabel label) noexcept;

constexpr std::size_t index_of(ClassLabel label) noexcept {
  return static_cast<std::size_t>(label);
}

constexpr bool is_attack(ClassLabel label) noexcept { return label != ClassLabel::Normal; }

/// "normal", "direct_dos", "amplification"
std::string_view to_string(ClassLabel label) noexcept;
std::optional<ClassLabel> parse_label(std::string_view text) noexcept;

ClassLabel label_for(simnet::AttackKind kind) noexcept;

/// Label whose code is nearest to `output`; ties resolve Normal, then
/// Amplification, then DirectDoS.
ClassLabel nearest_code(const Vec3& output) noexcept;

struct FeatureVector {
  double throughput_bps = 0.0;
  double mean_packet_size = 0.0;
  double packet_loss = 0.0;

  Vec3 to_array() const noexcept { return {throughput_bps, mean_packet_size, packet_loss}; }
  static FeatureVector from_array(const Vec3& v) noexcept { return {v[0], v[1], v[2]}; }

  bool operator==(const FeatureVector&) const = default;
};

namespace preproc {

struct WindowStats {
  std::size_t window_index = 0;
  double start = 0.0;
  std::uint64_t bits_received = 0;
  std::uint64_t packets_received = 0;
  std::uint64_t packets_lost = 0;

  bool operator==(const WindowStats&) const = default;
};

/// ceil(duration / window_len) windows aligned to t = 0. Packets delivered to
/// the server count as received; packets dropped at the bottleneck as lost.
/// Throws InvalidConfig when window_len <= 0.
std::vector<WindowStats> window_trace(const simnet::PacketTrace& trace, double window_len);

FeatureVector extract_features(const WindowStats& w, double window_len);

/// Attack label iff the attack interval covers strictly more than half of the
/// window; Normal otherwise.
std::vector<ClassLabel> label_windows(std::span<const WindowStats> windows,
                                      const simnet::GroundTruth& truth, double window_len);

/// v / ||v||_2. Throws Error(Errc::ZeroVector) for the all-zero vector.
Vec3 normalize_l2(const Vec3& v);

}  // namespace preproc

struct Sample {
  FeatureVector features;
  ClassLabel label = ClassLabel::Normal;

  bool operator==(const Sample&) const = default;
};

struct LabeledDataset {
  std::vector<Sample> samples;
  std::vector<std::string> provenance;  // source trace identifiers

  std::size_t size() const noexcept { return samples.size(); }
  bool empty() const noexcept { return samples.empty(); }
  std::array<std::size_t, kNumClasses> class_counts() const noexcept;

  /// Samples at `indices`, in that order. Provenance is copied.
  LabeledDataset subset(std::span<const std::size_t> indices) const;

  bool operator==(const LabeledDataset&) const = default;
};

namespace preproc {

/// window_trace + extract_features + label_windows for one trace, appended to
/// `out` under the given source identifier.
void append_trace(LabeledDataset& out, const simnet::PacketTrace& trace, double window_len,
                  std::string source_id);

}  // namespace preproc

}  // namespace dnsguard
