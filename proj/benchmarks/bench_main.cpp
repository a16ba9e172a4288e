#include <benchmark/benchmark.h>

#include "dnsguard/crossval.hpp"
#include "dnsguard/mlp.hpp"
#include "dnsguard/preproc.hpp"
#include "dnsguard/random.hpp"
#include "dnsguard/rbf.hpp"
#include "dnsguard/simnet.hpp"
#include "dnsguard/som.hpp"

using namespace dnsguard;

namespace {

simnet::ScenarioConfig scenario(simnet::AttackKind kind, double duration) {
  simnet::ScenarioDraft d;
  d.attack_kind = kind;
  d.duration = duration;
  d.attack_start_min = 20.0;
  d.attack_start_max = 20.0;
  d.attack_duration = duration - 40.0;
  return simnet::make_scenario(d);
}

// Roughly the shape of the default dataset: three well-separated groups.
LabeledDataset synthetic(std::size_t per_class) {
  Rng rng(1);
  LabeledDataset d;
  for (std::size_t i = 0; i < 3 * per_class; ++i) {
    const auto c = i % 3;
    const double bps = c == 0 ? rng.uniform(40, 60) : rng.uniform(9e6, 1e7);
    const double size = c == 0 ? 60.0 : (c == 1 ? rng.uniform(500, 512) : rng.uniform(3900, 4000));
    d.samples.push_back({{bps, size, c == 0 ? 0.0 : double(rng.below(400))}, kAllLabels[c]});
  }
  return d;
}

void BM_SimulateDirect(benchmark::State& state) {
  const auto cfg = scenario(simnet::AttackKind::DirectDoS, static_cast<double>(state.range(0)));
  std::uint64_t seed = 0;
  std::size_t events = 0;
  for (auto _ : state) {
    const auto t = simnet::run(cfg, seed++);
    events += t.events.size();
    benchmark::DoNotOptimize(t.events.data());
  }
  state.counters["events/s"] = benchmark::Counter(static_cast<double>(events), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_SimulateDirect)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_SimulateAmplification(benchmark::State& state) {
  const auto cfg = scenario(simnet::AttackKind::Amplification, 400.0);
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(simnet::run(cfg, seed++).events.size());
}
BENCHMARK(BM_SimulateAmplification)->Unit(benchmark::kMillisecond);

void BM_WindowFeatures(benchmark::State& state) {
  const auto trace = simnet::run(scenario(simnet::AttackKind::DirectDoS, 400.0), 3);
  for (auto _ : state) {
    LabeledDataset d;
    preproc::append_trace(d, trace, 20.0, "bench");
    benchmark::DoNotOptimize(d.samples.data());
  }
}
BENCHMARK(BM_WindowFeatures)->Unit(benchmark::kMillisecond);

void BM_MlpJacobian(benchmark::State& state) {
  const auto data = synthetic(300);
  const auto x = classifiers::feature_arrays(data);
  const auto m = classifiers::mlp_init(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(classifiers::mlp_jacobian(m, x).data());
}
BENCHMARK(BM_MlpJacobian)->Arg(7)->Arg(21)->Unit(benchmark::kMicrosecond);

// One accepted-or-rejected LM step on a 900-sample set.
void BM_MlpOneEpoch(benchmark::State& state) {
  const auto data = synthetic(300);
  classifiers::MlpTrainConfig cfg;
  cfg.max_epochs = 1;
  const auto init = classifiers::mlp_init(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(classifiers::mlp_train_lm(init, data, cfg).report.final_mse);
}
BENCHMARK(BM_MlpOneEpoch)->Arg(7)->Arg(21)->Unit(benchmark::kMillisecond);

void BM_MlpTrain(benchmark::State& state) {
  const auto data = synthetic(300);
  const classifiers::MlpTrainConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(classifiers::mlp_train_lm(classifiers::mlp_init(7, 1), data, cfg).report.final_mse);
  }
}
BENCHMARK(BM_MlpTrain)->Unit(benchmark::kMillisecond);

void BM_RbfTrain(benchmark::State& state) {
  const auto data = synthetic(300);
  classifiers::RbfTrainConfig cfg;
  cfg.centers = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(classifiers::rbf_train(data, cfg).report.final_mse);
}
BENCHMARK(BM_RbfTrain)->Arg(10)->Arg(40)->Unit(benchmark::kMillisecond);

void BM_SomTrain(benchmark::State& state) {
  const auto data = synthetic(300);
  classifiers::SomTrainConfig cfg;
  cfg.epochs = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(classifiers::som_train(classifiers::som_init(1), data, cfg).report.final_mse);
  }
}
BENCHMARK(BM_SomTrain)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_CrossValidateRbf(benchmark::State& state) {
  const auto data = synthetic(300);
  const auto recipe = eval::rbf_recipe({});
  for (auto _ : state) benchmark::DoNotOptimize(eval::cross_validate(recipe, data, 10, 1).metrics.accuracy);
}
BENCHMARK(BM_CrossValidateRbf)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
