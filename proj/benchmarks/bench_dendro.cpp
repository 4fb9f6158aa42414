#include <benchmark/benchmark.h>

#include <dendro/estimator.hpp>
#include <dendro/likelihood.hpp>
#include <dendro/mh_pruning.hpp>
#include <dendro/samplers.hpp>

using namespace dendro;

namespace {

Dissimilarity random_dissimilarity(std::size_t n, Rng& rng) {
    std::vector<double> v(pair_count(n));
    for (double& x : v) {
        x = rng.uniform(0.05, 1.0);
    }
    return Dissimilarity{n, std::move(v)};
}

Ultrametric fixed_ultrametric(std::size_t n) {
    const StructureCatalog catalog{n};
    std::vector<double> heights;
    for (std::size_t k = 1; k < n; ++k) {
        heights.push_back(static_cast<double>(k) / static_cast<double>(n));
    }
    return compose(catalog[catalog.size() / 3], heights);
}

void BM_Slhc(benchmark::State& state) {
    Rng rng{1};
    const auto d = random_dissimilarity(static_cast<std::size_t>(state.range(0)), rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(slhc(d));
    }
}
BENCHMARK(BM_Slhc)->Arg(5)->Arg(7)->Arg(20);

void BM_MstSet(benchmark::State& state) {
    const auto u = fixed_ultrametric(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(mst_set(u));
    }
}
BENCHMARK(BM_MstSet)->Arg(4)->Arg(5)->Arg(6);

void BM_SampleFiber(benchmark::State& state) {
    const auto u = fixed_ultrametric(5);
    SamplerBudget budget;
    budget.proposal = static_cast<FiberProposal>(state.range(0));
    budget.proposals_per_cone = 1 << 20;
    Rng rng{2};
    for (auto _ : state) {
        benchmark::DoNotOptimize(sample_fiber(u, budget, rng));
    }
}
BENCHMARK(BM_SampleFiber)
    ->Arg(static_cast<int>(FiberProposal::shared_box))
    ->Arg(static_cast<int>(FiberProposal::cone_box))
    ->Arg(static_cast<int>(FiberProposal::sequential))
    ->Unit(benchmark::kMicrosecond);

void BM_MhStep(benchmark::State& state) {
    const LogNormalNoise model{NoiseSpec::from_std(0.1)};
    Rng rng{3};
    const auto x = sample_measurement(fixed_ultrametric(5).values(), model, rng);
    MetropolisChain chain{x, initial_state(x), model, 0.1, 10000};
    for (auto _ : state) {
        benchmark::DoNotOptimize(chain.step(rng));
    }
}
BENCHMARK(BM_MhStep);

void BM_StructureLikelihood(benchmark::State& state) {
    const LogNormalNoise model{NoiseSpec::from_std(0.1)};
    const auto u = fixed_ultrametric(5);
    Rng rng{4};
    const auto x = sample_measurement(u.values(), model, rng);
    const auto tau = decompose(u).structure;
    LikelihoodConfig cfg;
    cfg.n_omega = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(structure_log_likelihood(x, tau, model, cfg, rng));
    }
}
BENCHMARK(BM_StructureLikelihood)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_MleEstimate(benchmark::State& state) {
    const LogNormalNoise model{NoiseSpec::from_std(0.1)};
    Rng rng{5};
    const auto x = sample_measurement(fixed_ultrametric(5).values(), model, rng);
    EstimatorConfig cfg;
    cfg.rescale = false;
    for (auto _ : state) {
        benchmark::DoNotOptimize(mle_estimate(x, model.spec(), cfg, rng));
    }
}
BENCHMARK(BM_MleEstimate)->Unit(benchmark::kMillisecond)->Iterations(3);

}  // namespace

BENCHMARK_MAIN();
