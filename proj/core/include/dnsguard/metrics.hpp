#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>

#include "dnsguard/preproc.hpp"

namespace dnsguard::eval {

/// Positive = any attack class. An attack predicted as the other attack type
/// is a binarized true positive but a miss in the per-class matrix.
struct ConfusionCounts {
  std::array<std::array<std::uint64_t, kNumClasses>, kNumClasses> per_class{};  // [truth][pred]
  std::uint64_t tp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;

  std::uint64_t total() const noexcept { return tp + tn + fp + fn; }
  void add(ClassLabel truth, ClassLabel predicted) noexcept;
  ConfusionCounts& operator+=(const ConfusionCounts& other) noexcept;

  bool operator==(const ConfusionCounts&) const = default;
};

/// Throws LengthMismatch or EmptyData.
ConfusionCounts confusion(std::span<const ClassLabel> predictions,
                          std::span<const ClassLabel> truth);

// Percentages; std::nullopt when the denominator is zero.
std::optional<double> accuracy(const ConfusionCounts& c);
std::optional<double> detection_rate(const ConfusionCounts& c, ClassLabel attack_class);
std::optional<double> false_alarm_rate(const ConfusionCounts& c);
/// Share of samples whose exact class was predicted.
std::optional<double> accuracy_3class(const ConfusionCounts& c);

struct MetricSet {
  std::optional<double> accuracy;
  std::optional<double> dr_direct;
  std::optional<double> dr_amplification;
  std::optional<double> far;
  std::optional<double> accuracy_3class;

  bool operator==(const MetricSet&) const = default;
};

MetricSet metric_set(const ConfusionCounts& c);

}  // namespace dnsguard::eval
