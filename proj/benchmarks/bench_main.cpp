#include <benchmark/benchmark.h>

#include <vector>

#include "ncihf/elliptic.hpp"
#include "ncihf/initialdata.hpp"
#include "ncihf/integrator.hpp"
#include "ncihf/pde_oracle.hpp"
#include "ncihf/spincm.hpp"

using namespace ncihf;

namespace {

const SpinCMState& breather() {
    static const SpinCMState st = jacobi_state(JacobiConfig::breather());
    return st;
}

void BM_EllipticEval(benchmark::State& state) {
    const EllipticParams p(1.0, state.range(0) / 10.0);
    cplx z(0.31, 0.17), acc = 0;
    for (auto _ : state) {
        acc += p.eval(z).zeta2;
        z += cplx(1e-7, 0);
    }
    benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_EllipticEval)->Arg(3)->Arg(10)->Arg(40);

void BM_SecondOrderRhs(benchmark::State& state) {
    const auto& st = breather();
    for (auto _ : state) {
        benchmark::DoNotOptimize(accel(st));
        benchmark::DoNotOptimize(spin_rhs(st));
        benchmark::DoNotOptimize(phi_rhs(st));
    }
}
BENCHMARK(BM_SecondOrderRhs);

void BM_BacklundVelocity(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(backlund_velocity(breather()));
}
BENCHMARK(BM_BacklundVelocity);

void BM_BreatherOnePeriod(benchmark::State& state) {
    IntegratorConfig c;
    c.real_mode = true;
    for (auto _ : state) benchmark::DoNotOptimize(integrate(breather(), 11.83, c).accepted);
}
BENCHMARK(BM_BreatherOnePeriod)->Unit(benchmark::kMillisecond);

void BM_OperatorApply(benchmark::State& state) {
    const auto method = state.range(1) ? OperatorMethod::SpectralMultiplier : OperatorMethod::PvQuadrature;
    const OperatorEvaluator ops(breather().params, static_cast<std::size_t>(state.range(0)), method);
    std::vector<cplx> f(ops.size());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::exp(cplx(0, ops.grid()[i]));
    for (auto _ : state) benchmark::DoNotOptimize(ops.apply_T(f));
}
BENCHMARK(BM_OperatorApply)->Args({256, 0})->Args({512, 0})->Args({256, 1})->Args({512, 1});

void BM_PdeResidual(benchmark::State& state) {
    const OperatorEvaluator ops(breather().params, 512, OperatorMethod::PvQuadrature);
    for (auto _ : state) benchmark::DoNotOptimize(pde_residual(breather(), ops).max_residual);
}
BENCHMARK(BM_PdeResidual)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
