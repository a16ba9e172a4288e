#include "dnsguard/metrics.hpp"

#include "dnsguard/error.hpp"

namespace dnsguard::eval {

void ConfusionCounts::add(ClassLabel truth, ClassLabel predicted) noexcept {
  ++per_class[index_of(truth)][index_of(predicted)];
  const bool actual = is_attack(truth);
  const bool flagged = is_attack(predicted);
  if (actual && flagged) ++tp;
  else if (!actual && !flagged) ++tn;
  else if (!actual && flagged) ++fp;
  else ++fn;
}

ConfusionCounts& ConfusionCounts::operator+=(const ConfusionCounts& other) noexcept {
  for (std::size_t t = 0; t < kNumClasses; ++t)
    for (std::size_t p = 0; p < kNumClasses; ++p) per_class[t][p] += other.per_class[t][p];
  tp += other.tp;
  tn += other.tn;
  fp += other.fp;
  fn += other.fn;
  return *this;
}

ConfusionCounts confusion(std::span<const ClassLabel> predictions,
                          std::span<const ClassLabel> truth) {
  if (predictions.size() != truth.size()) {
    throw Error(Errc::LengthMismatch, "predictions and truth differ in length");
  }
  if (predictions.empty()) throw Error(Errc::EmptyData, "cannot score an empty prediction list");
  ConfusionCounts c;
  for (std::size_t i = 0; i < truth.size(); ++i) c.add(truth[i], predictions[i]);
  return c;
}

namespace {

std::optional<double> percent(std::uint64_t num, std::uint64_t den) {
  if (den == 0) return std::nullopt;
  return 100.0 * static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

std::optional<double> accuracy(const ConfusionCounts& c) { return percent(c.tp + c.tn, c.total()); }

std::optional<double> detection_rate(const ConfusionCounts& c, ClassLabel attack_class) {
  const auto& row = c.per_class[index_of(attack_class)];
  std::uint64_t row_total = 0;
  for (const auto v : row) row_total += v;
  return percent(row[index_of(attack_class)], row_total);
}

std::optional<double> false_alarm_rate(const ConfusionCounts& c) {
  return percent(c.fp, c.fp + c.tn);
}

std::optional<double> accuracy_3class(const ConfusionCounts& c) {
  std::uint64_t correct = 0;
  std::uint64_t total = 0;
  for (std::size_t t = 0; t < kNumClasses; ++t) {
    for (std::size_t p = 0; p < kNumClasses; ++p) {
      total += c.per_class[t][p];
      if (t == p) correct += c.per_class[t][p];
    }
  }
  return percent(correct, total);
}

MetricSet metric_set(const ConfusionCounts& c) {
  return {accuracy(c), detection_rate(c, ClassLabel::DirectDoS),
          detection_rate(c, ClassLabel::Amplification), false_alarm_rate(c), accuracy_3class(c)};
}

}  // namespace dnsguard::eval
