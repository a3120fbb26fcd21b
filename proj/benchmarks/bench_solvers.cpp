#include <benchmark/benchmark.h>

#include "fuzzyseg/clustering.hpp"
#include "fuzzyseg/mfcm.hpp"
#include "fuzzyseg/phantom.hpp"

using namespace fuzzyseg;

namespace {

Phantom noisy_phantom(std::size_t size) {
    PhantomSpec spec;
    spec.width = size;
    spec.height = size;
    spec.background_intensity = 0.25;
    spec.object_intensity = 0.75;
    const double half = double(size) / 2.0;
    spec.disks = {{half, half, double(size) / 4.0}};
    spec.noise = {NoiseKind::Gaussian, 0.15, 0.0};
    spec.seed = 1;
    return generate(spec);
}

void BM_RunFcm(benchmark::State& state) {
    const Phantom ph = noisy_phantom(std::size_t(state.range(0)));
    const Dataset data = to_dataset(ph.image);
    SolverParams params;
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_fcm(data, params));
    }
}
BENCHMARK(BM_RunFcm)->Arg(64)->Arg(128);

void BM_RunFpcm(benchmark::State& state) {
    const Phantom ph = noisy_phantom(std::size_t(state.range(0)));
    const Dataset data = to_dataset(ph.image);
    FpcmParams params;
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_fpcm(data, params));
    }
}
BENCHMARK(BM_RunFpcm)->Arg(64)->Arg(128);

void BM_RunPcm(benchmark::State& state) {
    const Phantom ph = noisy_phantom(std::size_t(state.range(0)));
    const Dataset data = to_dataset(ph.image);
    PcmParams params;
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_pcm(data, params));
    }
}
BENCHMARK(BM_RunPcm)->Arg(64)->Arg(128);

void BM_PrecomputeWeights(benchmark::State& state) {
    const Phantom ph = noisy_phantom(std::size_t(state.range(0)));
    const NonLocalConfig cfg;
    for (auto _ : state) {
        benchmark::DoNotOptimize(precompute_weights(ph.image, cfg,
                                                    unsigned(state.range(1))));
    }
}
BENCHMARK(BM_PrecomputeWeights)->Args({64, 0})->Args({128, 0})->Args({128, 4});

void BM_RunMfcm(benchmark::State& state) {
    const Phantom ph = noisy_phantom(std::size_t(state.range(0)));
    MfcmParams params;
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_mfcm(ph.image, params, {},
                                          unsigned(state.range(1))));
    }
}
BENCHMARK(BM_RunMfcm)->Args({64, 0})->Args({128, 0})->Args({128, 4});

void BM_MixedMembershipUpdate(benchmark::State& state) {
    const Phantom ph = noisy_phantom(128);
    MfcmParams params;
    const WeightTables tables = precompute_weights(ph.image, params.nl);
    const Centroids v(1, {0.25, 0.75});
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            mfcm_memberships(ph.image, v, params, tables, unsigned(state.range(0))));
    }
}
BENCHMARK(BM_MixedMembershipUpdate)->Arg(0)->Arg(4);

}  // namespace

BENCHMARK_MAIN();
