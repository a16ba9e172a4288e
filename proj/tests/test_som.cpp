#include <doctest.h>

#include <cmath>
#include <set>

#include "dnsguard/error.hpp"
#include "dnsguard/random.hpp"
#include "dnsguard/som.hpp"

using namespace dnsguard;
using namespace dnsguard::classifiers;

namespace {

// All-pairs hop counts by Floyd-Warshall over the hexagonal layout.
std::array<std::array<int, kSomNeurons>, kSomNeurons> hop_oracle() {
  std::array<std::array<double, 2>, kSomNeurons> pos{};
  for (std::size_t r = 0; r < kSomRows; ++r) {
    for (std::size_t c = 0; c < kSomCols; ++c) {
      pos[r * kSomCols + c] = {double(c) + 0.5 * double(r % 2), double(r) * std::sqrt(3.0) / 2.0};
    }
  }
  constexpr int inf = 1000;
  std::array<std::array<int, kSomNeurons>, kSomNeurons> d{};
  for (std::size_t a = 0; a < kSomNeurons; ++a) {
    for (std::size_t b = 0; b < kSomNeurons; ++b) {
      const double e = std::hypot(pos[a][0] - pos[b][0], pos[a][1] - pos[b][1]);
      d[a][b] = a == b ? 0 : (e <= 1.001 ? 1 : inf);
    }
  }
  for (std::size_t k = 0; k < kSomNeurons; ++k)
    for (std::size_t a = 0; a < kSomNeurons; ++a)
      for (std::size_t b = 0; b < kSomNeurons; ++b) d[a][b] = std::min(d[a][b], d[a][k] + d[k][b]);
  return d;
}

// Codebook on a line so that feeding codebook[i] selects neuron i exactly.
SomModel line_model() {
  SomModel m;
  for (std::size_t i = 0; i < kSomNeurons; ++i) m.codebook[i] = {10.0 * double(i), 0, 0};
  return m;
}

Vec3 unit(Rng& rng) {
  return som_normalize({rng.uniform(0.01, 1), rng.uniform(0.01, 1), rng.uniform(0.01, 1)});
}

}  // namespace

TEST_CASE("hexagonal grid layout and link distances") {
  const auto p = grid_position(1, 0);
  CHECK(p[0] == doctest::Approx(0.5));
  CHECK(p[1] == doctest::Approx(0.866025).epsilon(1e-6));
  CHECK(grid_positions().size() == 25);
  CHECK(linkdist(7, 7) == 0);
  CHECK(linkdist(0, 1) == 1);
  CHECK(linkdist(11, 12) == 1);

  const auto oracle = hop_oracle();
  int diameter = 0;
  for (std::size_t a = 0; a < kSomNeurons; ++a) {
    for (std::size_t b = 0; b < kSomNeurons; ++b) {
      CHECK(linkdist(a, b) == oracle[a][b]);
      diameter = std::max(diameter, oracle[a][b]);
    }
  }
  CHECK(linkdist(0, 24) == oracle[0][24]);
  CHECK(linkdist(4, 20) == oracle[4][20]);
  CHECK(grid_diameter() == diameter);
}

TEST_CASE("som_init") {
  CHECK(som_init(3) == som_init(3));
  CHECK_FALSE(som_init(3) == som_init(4));
  for (const auto& w : som_init(5).codebook) {
    for (const double v : w) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }
  CHECK_FALSE(som_init(5).neuron_labels.has_value());
}

TEST_CASE("som_normalize") {
  const auto n = som_normalize({3, 4, 0});
  CHECK(n[0] == doctest::Approx(0.6));
  CHECK(n[1] == doctest::Approx(0.8));
  CHECK(som_normalize({0, 0, 0}) == Vec3{0, 0, 0});
}

TEST_CASE("zero presentations leave the codebook unchanged") {
  const auto m = som_init(1);
  const std::vector<Vec3> x = {som_normalize({1, 2, 3})};
  SomTrainConfig cfg;
  cfg.epochs = 0;
  const auto r = som_train(m, x, cfg);
  CHECK(r.model.codebook == m.codebook);
  CHECK_THROWS_AS(som_train(m, std::vector<Vec3>{}, SomTrainConfig{}), Error);
}

TEST_CASE("single training vector becomes its BMU's codebook vector") {
  const std::vector<Vec3> x = {som_normalize({0.2, 0.9, 0.4})};
  SomTrainConfig cfg;
  cfg.epochs = 3000;
  const auto r = som_train(som_init(2), x, cfg);
  const auto& w = r.model.codebook[best_matching_unit(r.model, x[0])];
  for (int k = 0; k < 3; ++k) CHECK(std::abs(w[k] - x[0][k]) <= 1e-3);
}

TEST_CASE("two far-apart clusters win disjoint neuron sets") {
  Rng rng(6);
  std::vector<Vec3> a, b, all;
  for (int i = 0; i < 30; ++i) {
    a.push_back(som_normalize({1, rng.uniform(0, 0.05), rng.uniform(0, 0.05)}));
    b.push_back(som_normalize({rng.uniform(0, 0.05), rng.uniform(0, 0.05), 1}));
  }
  all = a;
  all.insert(all.end(), b.begin(), b.end());
  SomTrainConfig cfg;
  cfg.epochs = 100;
  const auto r = som_train(som_init(7), all, cfg);
  std::set<std::size_t> sa, sb;
  for (const auto& x : a) sa.insert(best_matching_unit(r.model, x));
  for (const auto& x : b) sb.insert(best_matching_unit(r.model, x));
  for (const auto n : sa) CHECK(sb.count(n) == 0);
}

TEST_CASE("best matching unit ties go to the lowest index") {
  SomModel m;
  for (auto& w : m.codebook) w = {1, 1, 1};
  CHECK(best_matching_unit(m, {0, 0, 0}) == 0);
  m.codebook[3] = {0, 0, 0};
  m.codebook[9] = {0, 0, 0};
  CHECK(best_matching_unit(m, {0, 0, 0}) == 3);
}

TEST_CASE("labeling examples") {
  const auto m = line_model();

  std::vector<Vec3> x(m.codebook.begin(), m.codebook.end());
  std::vector<ClassLabel> normal(x.size(), ClassLabel::Normal);
  const auto all_normal = som_label(m, x, normal);
  for (const auto l : *all_normal.neuron_labels) CHECK(l == ClassLabel::Normal);

  // neuron 0 wins three DirectDoS and one Normal
  std::vector<Vec3> xs = {m.codebook[0], m.codebook[0], m.codebook[0], m.codebook[0]};
  std::vector<ClassLabel> ls = {ClassLabel::DirectDoS, ClassLabel::DirectDoS, ClassLabel::DirectDoS,
                                ClassLabel::Normal};
  for (std::size_t i = 1; i < kSomNeurons; ++i) {
    xs.push_back(m.codebook[i]);
    ls.push_back(ClassLabel::Normal);
  }
  CHECK((*som_label(m, xs, ls).neuron_labels)[0] == ClassLabel::DirectDoS);

  // the centre neuron never wins; all of its neighbors are Amplification
  const std::size_t centre = 12;
  xs.clear();
  ls.clear();
  for (std::size_t i = 0; i < kSomNeurons; ++i) {
    if (i == centre) continue;
    xs.push_back(m.codebook[i]);
    ls.push_back(linkdist(i, centre) == 1 ? ClassLabel::Amplification : ClassLabel::Normal);
  }
  const auto labeled = som_label(m, xs, ls);
  CHECK((*labeled.neuron_labels)[centre] == ClassLabel::Amplification);

  // tie inside a neuron resolves to the overall majority class
  xs = {m.codebook[0], m.codebook[0], m.codebook[1], m.codebook[2]};
  ls = {ClassLabel::Normal, ClassLabel::DirectDoS, ClassLabel::DirectDoS, ClassLabel::DirectDoS};
  CHECK((*som_label(m, xs, ls).neuron_labels)[0] == ClassLabel::DirectDoS);

  CHECK_THROWS_AS(som_label(m, std::vector<Vec3>{}, std::vector<ClassLabel>{}), Error);
  CHECK_THROWS_AS(som_label(m, xs, std::vector<ClassLabel>{ClassLabel::Normal}), Error);
}

TEST_CASE("classification needs labels and follows the BMU") {
  SomModel m = som_init(9);
  try {
    som_classify(m, {1, 2, 3});
    FAIL("expected Unlabeled");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::Unlabeled);
  }
  for (std::size_t i = 0; i < kSomNeurons; ++i) m.codebook[i] = som_normalize(m.codebook[i]);
  std::array<ClassLabel, kSomNeurons> labels{};
  for (std::size_t i = 0; i < kSomNeurons; ++i) labels[i] = kAllLabels[i % 3];
  m.neuron_labels = labels;
  for (std::size_t i = 0; i < kSomNeurons; ++i) {
    const auto& w = m.codebook[i];
    CHECK(som_classify(m, FeatureVector::from_array(w)) == labels[best_matching_unit(m, w)]);
  }
}

TEST_CASE("classification is invariant under positive scaling") {
  Rng rng(10);
  std::vector<Vec3> x;
  std::vector<ClassLabel> y;
  for (int i = 0; i < 90; ++i) {
    x.push_back(unit(rng));
    y.push_back(kAllLabels[static_cast<std::size_t>(i % 3)]);
  }
  SomTrainConfig cfg;
  cfg.epochs = 20;
  const auto m = som_label(som_train(som_init(1), x, cfg).model, x, y);
  for (int i = 0; i < 100; ++i) {
    const Vec3 raw{rng.uniform(0, 1e7), rng.uniform(0, 4000), rng.uniform(0, 100)};
    const auto base = som_classify(m, FeatureVector::from_array(raw));
    for (const double c : {0.1, 1.0, 1000.0}) {
      CHECK(som_classify(m, {c * raw[0], c * raw[1], c * raw[2]}) == base);
    }
  }
}

TEST_CASE("ordering phase does not raise quantization error") {
  Rng rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<Vec3> x;
    for (int i = 0; i < 40; ++i) x.push_back(unit(rng));
    SomTrainConfig cfg;
    cfg.epochs = 30;
    const auto r = som_train(som_init(rng.next()), x, cfg);
    CHECK(r.ordering_quantization_error <= r.initial_quantization_error);
    CHECK(std::isfinite(r.report.final_mse));
  }
}

TEST_CASE("training is deterministic per seed") {
  Rng rng(12);
  std::vector<Vec3> x;
  for (int i = 0; i < 30; ++i) x.push_back(unit(rng));
  SomTrainConfig cfg;
  cfg.epochs = 10;
  cfg.seed = 4;
  CHECK(som_train(som_init(1), x, cfg).model == som_train(som_init(1), x, cfg).model);
  SomTrainConfig bad;
  bad.ordering_lr = -1.0;
  CHECK_THROWS_AS(validate(bad), Error);
}
