// Microbenchmarks for the hot paths of a training rollout: primitive
// applications, policy decode, full program execution, feature extraction.

#include <benchmark/benchmark.h>

#include <cmath>

#include "hycop/dataset.hpp"
#include "hycop/executor.hpp"
#include "hycop/features.hpp"
#include "hycop/field_ops.hpp"

using namespace hycop;

namespace {

Field sine_field(const Grid& g, int channels) {
    Field f(g, channels);
    for (int c = 0; c < channels; ++c)
        for (int i = 0; i < g.total(); ++i)
            f.at(c, i) = (c == 0 ? 1.0 : 0.0) +
                         0.3 * std::sin(2.0 * M_PI * (i + c) / g.n[0]);
    return f;
}

void BM_FFT(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    fft::cvec v(n);
    for (int i = 0; i < n; ++i) v[i] = std::sin(0.1 * i);
    for (auto _ : state) {
        fft::transform(v, false);
        fft::transform(v, true);
        benchmark::DoNotOptimize(v.data());
    }
}
BENCHMARK(BM_FFT)->Arg(64)->Arg(128)->Arg(1024);

void BM_DiffusionPrimitive(benchmark::State& state) {
    PdeParams p;
    p.system = SystemTag::AD1D;
    p.d = 0.1;
    const Grid g = Grid::make1d(64, 10.0);
    const Field u0 = sine_field(g, 1);
    const PrimitiveSpec spec{SystemTag::AD1D, Mechanism::Diffusion, 10, Boundary::Periodic};
    for (auto _ : state) benchmark::DoNotOptimize(apply_primitive(spec, p, u0, 0.05));
}
BENCHMARK(BM_DiffusionPrimitive);

void BM_NonlinearAdvectionPrimitive(benchmark::State& state) {
    PdeParams p;
    p.system = SystemTag::Burgers1D;
    p.nu = 0.02;
    const Grid g = Grid::make1d(64, 2.0);
    const Field u0 = sine_field(g, 1);
    const PrimitiveSpec spec{SystemTag::Burgers1D, Mechanism::NonlinearAdvection, 3,
                             Boundary::Periodic};
    for (auto _ : state) benchmark::DoNotOptimize(apply_primitive(spec, p, u0, 0.05));
}
BENCHMARK(BM_NonlinearAdvectionPrimitive);

void BM_SweStepPrimitive(benchmark::State& state) {
    PdeParams p;
    p.system = SystemTag::SWE1D;
    const Grid g = Grid::make1d(64, 10.0);
    const Field u0 = sine_field(g, 2);
    const PrimitiveSpec spec{SystemTag::SWE1D, Mechanism::WaveAdvection, 3, Boundary::Periodic};
    for (auto _ : state) benchmark::DoNotOptimize(apply_primitive(spec, p, u0, 0.03));
}
BENCHMARK(BM_SweStepPrimitive);

void BM_PolicyDecode(benchmark::State& state) {
    PolicyArch arch;
    const Policy policy = init_policy(arch, 1);
    const std::vector<double> feats = {1.2, 0.5, 0.7, 0.5};
    for (auto _ : state) benchmark::DoNotOptimize(decode_program(policy, feats, 0.5));
}
BENCHMARK(BM_PolicyDecode);

void BM_BurgersRollout(benchmark::State& state) {
    // decode + execute: one ES fitness evaluation minus the loss reduction
    const PdeParams p = sample_params(SystemTag::Burgers1D, 3, false);
    const Field u0 = sample_ic(SystemTag::Burgers1D, 2, 3);
    const auto dict = dictionary(SystemTag::Burgers1D);
    PolicyArch arch;
    const Policy policy = init_policy(arch, 1);
    const auto feats = extract_features(SystemTag::Burgers1D, p, u0, 0.5);
    for (auto _ : state) {
        const Program prog = decode_program(policy, feats, 0.5);
        benchmark::DoNotOptimize(execute(dict, p, u0, prog));
    }
}
BENCHMARK(BM_BurgersRollout);

void BM_FeatureExtraction(benchmark::State& state) {
    const PdeParams p = sample_params(SystemTag::Burgers1D, 3, false);
    const Field u0 = sample_ic(SystemTag::Burgers1D, 2, 3);
    for (auto _ : state)
        benchmark::DoNotOptimize(extract_features(SystemTag::Burgers1D, p, u0, 0.5));
}
BENCHMARK(BM_FeatureExtraction);

}  // namespace

BENCHMARK_MAIN();
