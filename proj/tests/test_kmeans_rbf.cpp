#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <optional>

#include <Eigen/LU>

#include "dnsguard/error.hpp"
#include "dnsguard/kmeans.hpp"
#include "dnsguard/random.hpp"
#include "dnsguard/rbf.hpp"

using namespace dnsguard;
using namespace dnsguard::classifiers;

namespace {

struct Blob {
  Vec3 lo, hi;
};

const std::array<Blob, 3> kBlobs = {Blob{{0, 0, 0}, {1, 1, 1}}, Blob{{10, 0, 0}, {11, 1, 1}},
                                    Blob{{0, 10, 5}, {1, 11, 6}}};

std::vector<Vec3> blob_points(std::uint64_t seed, int per_blob) {
  Rng rng(seed);
  std::vector<Vec3> pts;
  for (const auto& b : kBlobs) {
    for (int i = 0; i < per_blob; ++i) {
      pts.push_back({rng.uniform(b.lo[0], b.hi[0]), rng.uniform(b.lo[1], b.hi[1]),
                     rng.uniform(b.lo[2], b.hi[2])});
    }
  }
  return pts;
}

bool inside(const Vec3& p, const Blob& b) {
  for (int k = 0; k < 3; ++k) {
    if (p[k] < b.lo[k] || p[k] > b.hi[k]) return false;
  }
  return true;
}

std::optional<Errc> code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

}  // namespace

TEST_CASE("kmeans on two points") {
  const std::vector<Vec3> pts = {{0, 0, 0}, {10, 0, 0}};
  auto r = kmeans(pts, 2, 1);
  std::sort(r.centers.begin(), r.centers.end());
  CHECK(r.centers[0] == Vec3{0, 0, 0});
  CHECK(r.centers[1] == Vec3{10, 0, 0});

  const auto one = kmeans(pts, 1, 1);
  CHECK(one.centers[0][0] == doctest::Approx(5.0));
}

TEST_CASE("kmeans separates blobs and centers are cluster means") {
  const auto pts = blob_points(12, 30);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto r = kmeans(pts, 3, seed);
    for (const auto& b : kBlobs) {
      const auto hits = std::count_if(r.centers.begin(), r.centers.end(),
                                      [&](const Vec3& c) { return inside(c, b); });
      CHECK(hits == 1);
    }
    // recompute means from the assignment
    for (std::size_t c = 0; c < 3; ++c) {
      Vec3 sum{0, 0, 0};
      int n = 0;
      for (std::size_t i = 0; i < pts.size(); ++i) {
        if (r.assignment[i] != c) continue;
        for (int k = 0; k < 3; ++k) sum[k] += pts[i][k];
        ++n;
      }
      REQUIRE(n > 0);
      for (int k = 0; k < 3; ++k) CHECK(r.centers[c][k] == doctest::Approx(sum[k] / n).epsilon(1e-12));
    }
    // each point is assigned to its nearest center
    for (std::size_t i = 0; i < pts.size(); ++i) {
      for (std::size_t c = 0; c < 3; ++c) {
        CHECK(squared_distance(pts[i], r.centers[r.assignment[i]]) <= squared_distance(pts[i], r.centers[c]));
      }
    }
    for (std::size_t i = 1; i < r.sse_history.size(); ++i) {
      CHECK(r.sse_history[i] <= r.sse_history[i - 1] + 1e-9);
    }
  }
}

TEST_CASE("kmeans SSE is non-increasing on random data") {
  Rng rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Vec3> pts;
    for (int i = 0; i < 60; ++i) pts.push_back({rng.uniform(0, 1), rng.uniform(0, 1), rng.uniform(0, 1)});
    const auto r = kmeans(pts, 1 + rng.below(8), rng.next());
    for (std::size_t i = 1; i < r.sse_history.size(); ++i) {
      CHECK(r.sse_history[i] <= r.sse_history[i - 1] + 1e-12);
    }
  }
}

TEST_CASE("kmeans needs k distinct points") {
  const std::vector<Vec3> dup = {{1, 1, 1}, {1, 1, 1}, {2, 2, 2}, {2, 2, 2}, {3, 3, 3}};
  CHECK(code_of([&] { kmeans(dup, 5, 1); }) == Errc::TooFewPoints);
  CHECK(code_of([&] { kmeans(dup, 0, 1); }) == Errc::TooFewPoints);
  CHECK(kmeans(dup, 3, 1).centers.size() == 3);
}

TEST_CASE("rbf_width examples") {
  const std::vector<Vec3> two = {{0, 0, 0}, {3, 4, 0}};
  CHECK(std::abs(rbf_width(two) - 5.0 / std::sqrt(2.0)) <= 1e-12);
  const std::vector<Vec3> square = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}};
  CHECK(std::abs(rbf_width(square) - std::sqrt(2.0) / 2.0) <= 1e-12);
  const std::vector<Vec3> one = {{1, 2, 3}};
  CHECK(code_of([&] { rbf_width(one); }) == Errc::NeedTwoCenters);
}

TEST_CASE("one center per point interpolates the targets") {
  Rng rng(5);
  std::vector<Vec3> x, t;
  for (int i = 0; i < 8; ++i) {
    x.push_back({rng.uniform(0, 10), rng.uniform(0, 10), rng.uniform(0, 10)});
    t.push_back(target_code(kAllLabels[i % 3]));
  }
  RbfTrainConfig cfg;
  cfg.centers = x.size();
  cfg.ridge = 1e-12;
  const auto r = rbf_train(x, t, cfg);
  CHECK(r.report.final_mse <= 1e-6);

  // independent square solve with the trained centers and width
  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd phi(n, n);
  for (Eigen::Index i = 0; i < n; ++i) phi.row(i) = rbf_hidden(r.model, x[static_cast<std::size_t>(i)]).transpose();
  Eigen::MatrixXd targets(n, 3);
  for (Eigen::Index i = 0; i < n; ++i)
    for (int k = 0; k < 3; ++k) targets(i, k) = t[static_cast<std::size_t>(i)][k];
  const Eigen::MatrixXd w = phi.fullPivLu().solve(targets);
  CHECK((phi * w - targets).norm() <= 1e-8);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto y = rbf_forward(r.model, x[i]);
    for (int k = 0; k < 3; ++k) CHECK(std::abs(y[k] - t[i][k]) <= 1e-3);
  }
}

TEST_CASE("rbf with six centers learns three blobs") {
  const auto pts = blob_points(21, 20);
  LabeledDataset data;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    data.samples.push_back({FeatureVector::from_array(pts[i]), kAllLabels[i / 20]});
  }
  RbfTrainConfig cfg;
  cfg.centers = 6;
  const auto r = rbf_train(data, cfg);
  for (const auto& s : data.samples) CHECK(rbf_classify(r.model, s.features) == s.label);
}

TEST_CASE("rbf training errors") {
  const std::vector<Vec3> dup = {{1, 1, 1}, {1, 1, 1}, {1, 1, 1}};
  const std::vector<Vec3> t(3, Vec3{0, 0, 0});
  RbfTrainConfig cfg;
  cfg.centers = 2;
  CHECK(code_of([&] { rbf_train(dup, t, cfg); }) == Errc::TooFewPoints);
  cfg.centers = 1;
  CHECK(code_of([&] { rbf_train(dup, t, cfg); }) == Errc::NeedTwoCenters);
  CHECK(code_of([&] { rbf_train(LabeledDataset{}, RbfTrainConfig{}); }) == Errc::EmptyData);
}

TEST_CASE("rbf_classify decodes the output layer") {
  RbfModel m;
  m.centers = {{0, 0, 0}, {1, 1, 1}};
  m.output_weights = Eigen::MatrixXd::Zero(3, 2);
  m.output_bias = {0.1, 0.2, 0.9};
  CHECK(rbf_classify(m, {5, 5, 5}) == ClassLabel::DirectDoS);
  m.output_bias = {0.5, 0.5, 0.5};
  CHECK(rbf_classify(m, {5, 5, 5}) == ClassLabel::Normal);
  m.output_bias = {0.0, 0.9, 0.1};
  CHECK(rbf_classify(m, {5, 5, 5}) == ClassLabel::Amplification);
}
