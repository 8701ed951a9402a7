// Microbenchmarks for the hot paths: raw RNG draws, simulator calls, one
// weight update per backend, and a full resample.

#include <cstdint>
#include <vector>

#include <benchmark/benchmark.h>

#include "lfpe/likelihood_free.hpp"
#include "lfpe/photodetector.hpp"
#include "lfpe/smc.hpp"

namespace {

const lfpe::PhotodetectorModel& model() {
  static const lfpe::PhotodetectorModel instance(0.9, 0.05);
  return instance;
}

lfpe::ParticleCloud make_cloud(std::size_t n, std::uint64_t seed) {
  lfpe::RngStream rng(seed);
  return lfpe::init_cloud(lfpe::uniform_parameter_prior(model()), n, rng);
}

void bm_rng_u64(benchmark::State& state) {
  lfpe::RngStream rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(rng.next_u64());
}
BENCHMARK(bm_rng_u64);

void bm_rng_normal(benchmark::State& state) {
  lfpe::RngStream rng(2);
  for (auto _ : state) benchmark::DoNotOptimize(rng.next_normal());
}
BENCHMARK(bm_rng_normal);

void bm_weak_sample(benchmark::State& state) {
  const lfpe::PhotodetectorWeak weak = lfpe::weak_interface(model());
  const lfpe::ParamVector params{0.5};
  lfpe::RngStream rng(3);
  for (auto _ : state) benchmark::DoNotOptimize(weak.sample(params, rng).label);
}
BENCHMARK(bm_weak_sample);

// One exact-likelihood weight update over n particles.
void bm_strong_datum(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const lfpe::PhotodetectorStrong strong = lfpe::strong_interface(model());
  const lfpe::ParticleCloud cloud = make_cloud(n, 4);
  std::vector<double> likelihoods(n);
  for (auto _ : state) {
    for (std::size_t k = 0; k < n; ++k) {
      likelihoods[k] = strong.likelihood(lfpe::kClick, cloud.positions()[k]);
    }
    benchmark::DoNotOptimize(lfpe::bayes_update(cloud, likelihoods));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(bm_strong_datum)->Arg(100)->Arg(1000);

// One single-draw likelihood-free update over n particles.
void bm_single_sample_datum(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const lfpe::PhotodetectorWeak weak = lfpe::weak_interface(model());
  const lfpe::ParticleCloud cloud = make_cloud(n, 5);
  lfpe::RngStream rng(6);
  lfpe::CallCounter counter;
  std::uint64_t datum = 0;
  for (auto _ : state) {
    lfpe::RngStream stream = rng.derive(datum++);
    benchmark::DoNotOptimize(
        lfpe::single_sample_likelihoods(weak, cloud, lfpe::kClick, stream, counter));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(bm_single_sample_datum)->Arg(100)->Arg(1000);

// One fixed-batch update (m draws per particle).
void bm_fixed_m_datum(benchmark::State& state) {
  const std::uint64_t m = static_cast<std::uint64_t>(state.range(0));
  const lfpe::PhotodetectorWeak weak = lfpe::weak_interface(model());
  const lfpe::ParticleCloud cloud = make_cloud(100, 7);
  lfpe::RngStream rng(8);
  lfpe::CallCounter counter;
  std::uint64_t datum = 0;
  for (auto _ : state) {
    lfpe::RngStream stream = rng.derive(datum++);
    benchmark::DoNotOptimize(
        lfpe::fixed_m_likelihoods(weak, cloud, lfpe::kClick, m, stream, counter));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(100 * m));
}
BENCHMARK(bm_fixed_m_datum)->Arg(10)->Arg(100);

// One adaptive update at a given tolerance.
void bm_ale_datum(benchmark::State& state) {
  const double epsilon = static_cast<double>(state.range(0)) / 1000.0;
  const lfpe::PhotodetectorWeak weak = lfpe::weak_interface(model());
  const lfpe::ParticleCloud cloud = make_cloud(100, 9);
  lfpe::RngStream rng(10);
  lfpe::CallCounter counter;
  std::uint64_t datum = 0;
  for (auto _ : state) {
    lfpe::RngStream stream = rng.derive(datum++);
    benchmark::DoNotOptimize(lfpe::ale_likelihoods(weak, cloud, lfpe::kClick, epsilon, 1.0,
                                                   1000000, stream, counter, nullptr));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(counter.total()));
}
BENCHMARK(bm_ale_datum)->Arg(100)->Arg(30)->Arg(10);

// One full moment-preserving resample of a weight-skewed cloud.
void bm_liu_west_resample(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const lfpe::UniformBoxPrior prior = lfpe::uniform_parameter_prior(model());
  lfpe::ParticleCloud cloud = make_cloud(n, 11);
  // Skew the weights the way a sharp datum would.
  std::vector<double> likelihoods(n);
  for (std::size_t k = 0; k < n; ++k) {
    likelihoods[k] = model().click_probability_unchecked(cloud.positions()[k][0]) > 0.9 ? 1.0 : 0.05;
  }
  cloud = lfpe::bayes_update(cloud, likelihoods);
  lfpe::RngStream rng(12);
  std::uint64_t round = 0;
  for (auto _ : state) {
    lfpe::RngStream stream = rng.derive(round++);
    benchmark::DoNotOptimize(lfpe::liu_west_resample(cloud, prior, {}, stream));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(bm_liu_west_resample)->Arg(100)->Arg(1000);

}  // namespace

BENCHMARK_MAIN();
