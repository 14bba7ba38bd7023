#include <benchmark/benchmark.h>

#include <cmath>

#include "qnsk/diagnostics.hpp"
#include "qnsk/galerkin_solver.hpp"
#include "qnsk/initial_data.hpp"
#include "qnsk/lognls_solver.hpp"

using namespace qnsk;

namespace {

FluidState smooth_state(int d, int n) {
    const Grid g(d, 5.0, n);
    GeneratorSpec spec;
    spec.kind = GeneratorSpec::Kind::perturbed_gaussian;
    spec.amplitude = 0.2;
    spec.velocity = 0.3;
    return generate(g, spec);
}

ParamSet bench_params() {
    ParamSet p;
    p.nu = 0.5;
    p.eps = 0.5;
    p.r1 = 0.1;
    p.delta1 = 0.01;
    p.dt.kind = DtPolicy::Kind::fixed;
    p.dt.dt = 1e-3;
    return p;
}

void BM_Transform(benchmark::State& st) {
    const FluidState s = smooth_state(static_cast<int>(st.range(0)), static_cast<int>(st.range(1)));
    for (auto _ : st) benchmark::DoNotOptimize(transform_inverse(s.grid, transform_forward(s.sqrtR)));
}
BENCHMARK(BM_Transform)->Args({1, 256})->Args({1, 4096})->Args({2, 128})->Args({3, 32});

void BM_Rhs(benchmark::State& st) {
    const FluidState s = smooth_state(static_cast<int>(st.range(0)), static_cast<int>(st.range(1)));
    const ParamSet p = bench_params();
    for (auto _ : st) benchmark::DoNotOptimize(rhs(s, p, TauValue{1.0, 0.0}));
}
BENCHMARK(BM_Rhs)->Args({1, 256})->Args({2, 64});

void BM_Step(benchmark::State& st) {
    const FluidState s = smooth_state(static_cast<int>(st.range(0)), static_cast<int>(st.range(1)));
    const ParamSet p = bench_params();
    const TauSolution tau = tau_solve(1.0, 1e-12, 1e-14);
    for (auto _ : st) benchmark::DoNotOptimize(step(s, p, 1e-3, tau));
}
BENCHMARK(BM_Step)->Args({1, 128})->Args({1, 512})->Args({2, 64});

void BM_NlsStep(benchmark::State& st) {
    const Grid g(1, 8.0, static_cast<int>(st.range(0)));
    const WaveFunction psi = generate_wave(g, GeneratorSpec{}, 1.0);
    NlsParams p;
    p.dt = 1e-3;
    const double mu = resolve_mu(p, psi);
    for (auto _ : st) benchmark::DoNotOptimize(nls_step(psi, p, mu, TauValue{1.0, 0.0}));
}
BENCHMARK(BM_NlsStep)->Arg(256)->Arg(4096);

void BM_DiagnosticsRecord(benchmark::State& st) {
    const FluidState s = smooth_state(1, static_cast<int>(st.range(0)));
    const ParamSet p = bench_params();
    for (auto _ : st) benchmark::DoNotOptimize(compute_record(s, p, TauValue{1.0, 0.0}));
}
BENCHMARK(BM_DiagnosticsRecord)->Arg(128)->Arg(512);

void BM_TauSolve(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(tau_solve(100.0, 1e-10, 1e-12));
}
BENCHMARK(BM_TauSolve);

}  // namespace
BENCHMARK_MAIN();
