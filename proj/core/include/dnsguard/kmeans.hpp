#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dnsguard/preproc.hpp"

namespace dnsguard::classifiers {

struct KmeansResult {
  std::vector<Vec3> centers;
  std::vector<std::size_t> assignment;  // per point, index into centers
  std::size_t iterations = 0;
  /// Within-cluster squared distance after the initial assignment and after
  /// every Lloyd iteration. Non-increasing.
  std::vector<double> sse_history;
};

/// Lloyd's algorithm from k distinct data points picked by seeded k-means++. An empty
/// cluster is re-seeded with the point farthest from its own center.
/// Throws TooFewPoints when k == 0 or fewer than k distinct points exist.
KmeansResult kmeans(std::span<const Vec3> points, std::size_t k, std::uint64_t seed,
                    std::size_t max_iterations = 300);

double squared_distance(const Vec3& a, const Vec3& b) noexcept;

}  // namespace dnsguard::classifiers
