// Serial reference vs OpenMP for the hot kernels.  Arg is the term count.
#include <benchmark/benchmark.h>

#include <random>

#include "lfkit/kernels.hpp"

using namespace lfkit;

namespace {

std::vector<cplx> coeffs(long n) {
    std::mt19937 rng(1);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<cplx> a(static_cast<std::size_t>(n + 1));
    for (auto& x : a) x = {u(rng), u(rng)};
    return a;
}

const cplx kS(0.5, 14.0);

template <auto Kernel>
void dirichlet(benchmark::State& st) {
    const long n = st.range(0);
    const auto a = coeffs(n);
    std::vector<cplx> out;
    for (auto _ : st) {
        Kernel(a, n, kS, out);
        benchmark::DoNotOptimize(out.data());
    }
    st.SetItemsProcessed(st.iterations() * n);
}

template <auto Kernel>
void theta(benchmark::State& st) {
    const long n = st.range(0);
    const auto b = coeffs(n);
    std::vector<cplx> out;
    for (auto _ : st) {
        Kernel(b, 1, n, kS, kS + 5.5, cplx(1e-3, 2e-3), out);
        benchmark::DoNotOptimize(out.data());
    }
    st.SetItemsProcessed(st.iterations() * n);
}

template <auto Kernel>
void qseries(benchmark::State& st) {
    const long n = st.range(0);
    const auto c = coeffs(n);
    std::vector<cplx> out;
    for (auto _ : st) {
        Kernel(c, n, 5.5, cplx(-1.0 / 3.0, 1.0 / 16.0), out);
        benchmark::DoNotOptimize(out.data());
    }
    st.SetItemsProcessed(st.iterations() * n);
}

}  // namespace

BENCHMARK(dirichlet<kernels::dirichlet_terms_serial>)->Name("dirichlet/serial")->Arg(1 << 12)->Arg(1 << 16);
BENCHMARK(dirichlet<kernels::dirichlet_terms_omp>)->Name("dirichlet/omp")->Arg(1 << 12)->Arg(1 << 16);
BENCHMARK(theta<kernels::theta_terms_serial>)->Name("theta/serial")->Arg(1 << 12)->Arg(1 << 16);
BENCHMARK(theta<kernels::theta_terms_omp>)->Name("theta/omp")->Arg(1 << 12)->Arg(1 << 16);
BENCHMARK(qseries<kernels::qseries_terms_serial>)->Name("qseries/serial")->Arg(1 << 12)->Arg(1 << 16);
BENCHMARK(qseries<kernels::qseries_terms_omp>)->Name("qseries/omp")->Arg(1 << 12)->Arg(1 << 16);

BENCHMARK_MAIN();
