#include "dnsguard/scaling.hpp"

#include <algorithm>
#include <limits>

namespace dnsguard::classifiers {

InputScaling InputScaling::fit_minmax(std::span<const Vec3> inputs) {
  InputScaling s;
  if (inputs.empty()) return s;
  for (std::size_t d = 0; d < 3; ++d) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& x : inputs) {
      lo = std::min(lo, x[d]);
      hi = std::max(hi, x[d]);
    }
    if (hi > lo) {
      s.offset[d] = 0.5 * (lo + hi);
      s.scale[d] = 2.0 / (hi - lo);
    } else {
      s.offset[d] = lo;
      s.scale[d] = 1.0;
    }
  }
  return s;
}

std::vector<Vec3> feature_arrays(const LabeledDataset& data) {
  std::vector<Vec3> out;
  out.reserve(data.size());
  for (const auto& s : data.samples) out.push_back(s.features.to_array());
  return out;
}

std::vector<Vec3> target_codes(const LabeledDataset& data) {
  std::vector<Vec3> out;
  out.reserve(data.size());
  for (const auto& s : data.samples) out.push_back(target_code(s.label));
  return out;
}

}  // namespace dnsguard::classifiers
