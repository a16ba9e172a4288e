#include "dnsguard/kmeans.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "dnsguard/error.hpp"
#include "dnsguard/random.hpp"

namespace dnsguard::classifiers {

double squared_distance(const Vec3& a, const Vec3& b) noexcept {
  double d2 = 0.0;
  for (std::size_t i = 0; i < 3; ++i) d2 += (a[i] - b[i]) * (a[i] - b[i]);
  return d2;
}

namespace {

std::size_t nearest(const std::vector<Vec3>& centers, const Vec3& x) {
  std::size_t best = 0;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centers.size(); ++c) {
    const double d2 = squared_distance(centers[c], x);
    if (d2 < best_d2) {
      best_d2 = d2;
      best = c;
    }
  }
  return best;
}

double total_sse(std::span<const Vec3> points, const std::vector<Vec3>& centers,
                 const std::vector<std::size_t>& assignment) {
  double sse = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    sse += squared_distance(points[i], centers[assignment[i]]);
  }
  return sse;
}

// Returns true if any point changed cluster.
bool assign(std::span<const Vec3> points, const std::vector<Vec3>& centers,
            std::vector<std::size_t>& assignment) {
  bool changed = false;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto c = nearest(centers, points[i]);
    if (c != assignment[i]) {
      assignment[i] = c;
      changed = true;
    }
  }
  return changed;
}

// Moves every center to the mean of its members. Empty clusters take the point
// farthest from its current center, which then joins that cluster.
std::vector<std::size_t> move_to_means(std::span<const Vec3> points, std::vector<Vec3>& centers,
                                       const std::vector<std::size_t>& assignment) {
  const std::size_t k = centers.size();
  std::vector<Vec3> sums(k, Vec3{0.0, 0.0, 0.0});
  std::vector<std::size_t> counts(k, 0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t d = 0; d < 3; ++d) sums[assignment[i]][d] += points[i][d];
    ++counts[assignment[i]];
  }
  for (std::size_t c = 0; c < k; ++c) {
    if (counts[c] == 0) continue;
    for (std::size_t d = 0; d < 3; ++d) centers[c][d] = sums[c][d] / static_cast<double>(counts[c]);
  }
  return counts;
}

void update_centers(std::span<const Vec3> points, std::vector<Vec3>& centers,
                    std::vector<std::size_t>& assignment) {
  const std::size_t k = centers.size();
  auto counts = move_to_means(points, centers, assignment);
  bool reseeded = false;
  for (std::size_t c = 0; c < k; ++c) {
    if (counts[c] != 0) continue;
    std::size_t far = 0;
    double far_d2 = -1.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (counts[assignment[i]] <= 1) continue;  // never empty another cluster
      const double d2 = squared_distance(points[i], centers[assignment[i]]);
      if (d2 > far_d2) {
        far_d2 = d2;
        far = i;
      }
    }
    if (far_d2 < 0.0) continue;
    --counts[assignment[far]];
    assignment[far] = c;
    counts[c] = 1;
    centers[c] = points[far];
    reseeded = true;
  }
  if (reseeded) move_to_means(points, centers, assignment);
}

}  // namespace

KmeansResult kmeans(std::span<const Vec3> points, std::size_t k, std::uint64_t seed,
                    std::size_t max_iterations) {
  if (k == 0) throw Error(Errc::TooFewPoints, "k-means needs k >= 1");
  std::vector<Vec3> distinct(points.begin(), points.end());
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < k) {
    throw Error(Errc::TooFewPoints, "k-means needs at least k = " + std::to_string(k) +
                                        " distinct points, got " +
                                        std::to_string(distinct.size()));
  }

  // k-means++ seeding over the distinct points
  Rng rng(seed);
  KmeansResult r;
  r.centers.reserve(k);
  r.centers.push_back(distinct[rng.below(distinct.size())]);
  std::vector<double> d2(distinct.size(), std::numeric_limits<double>::infinity());
  while (r.centers.size() < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < distinct.size(); ++i) {
      d2[i] = std::min(d2[i], squared_distance(distinct[i], r.centers.back()));
      total += d2[i];
    }
    double u = rng.uniform01() * total;
    std::size_t pick = distinct.size();
    for (std::size_t i = 0; i < distinct.size(); ++i) {
      if (d2[i] <= 0.0) continue;
      pick = i;
      if (u < d2[i]) break;
      u -= d2[i];
    }
    r.centers.push_back(distinct[pick]);
  }

  r.assignment.assign(points.size(), 0);
  assign(points, r.centers, r.assignment);
  r.sse_history.push_back(total_sse(points, r.centers, r.assignment));

  bool changed = true;
  while (changed && r.iterations < max_iterations) {
    update_centers(points, r.centers, r.assignment);
    changed = assign(points, r.centers, r.assignment);
    ++r.iterations;
    r.sse_history.push_back(total_sse(points, r.centers, r.assignment));
  }
  if (changed) {
    // Iteration cap reached: leave every center at the mean of its members.
    update_centers(points, r.centers, r.assignment);
  }
  return r;
}

}  // namespace dnsguard::classifiers
