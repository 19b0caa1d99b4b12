#include <benchmark/benchmark.h>

#include <random>

#include "qpack/fdtd.hpp"

using namespace qpack;

namespace {

SolverState make_state(int n) {
  Scene s;
  s.domain = Box{{0, 0, 0}, {n * 1e-3, n * 1e-3, n * 1e-3}, 0, 0, "box"};
  s.add_material(materials::vacuum());
  auto grid = std::make_shared<const MaterialGrid>(voxelize(s, GridSpec::for_domain(s.domain, {1e-3, 1e-3, 1e-3})));
  SolverState st = initialize(grid, {}, {}, {});
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  YeeFields& f = st.mutable_fields();
  for (int a = 0; a < 3; ++a) {
    for (std::size_t q = 0; q < f.e(a).size(); ++q) f.e(a).data()[q] = u(rng);
    for (std::size_t q = 0; q < f.h(a).size(); ++q) f.h(a).data()[q] = u(rng);
  }
  return st;
}

template <Execution X>
void BM_Step(benchmark::State& bs) {
  SolverState st = make_state(static_cast<int>(bs.range(0)));
  for (auto _ : bs) {
    kernels::update_h(X, st.mutable_fields(), st.coefficients());
    kernels::update_e(X, st.mutable_fields(), st.coefficients());
    benchmark::ClobberMemory();
  }
  bs.SetItemsProcessed(bs.iterations() * bs.range(0) * bs.range(0) * bs.range(0));
}

template <Execution X>
void BM_Energy(benchmark::State& bs) {
  SolverState st = make_state(static_cast<int>(bs.range(0)));
  std::vector<double> partials;
  for (auto _ : bs) {
    if (X == Execution::Serial) kernels::energy_partials_serial(st.fields(), st.coefficients(), st.dt(), partials);
    else kernels::energy_partials_parallel(st.fields(), st.coefficients(), st.dt(), partials);
    benchmark::DoNotOptimize(partials.data());
  }
}

template <Execution X>
void BM_Dft(benchmark::State& bs) {
  SolverState st = make_state(static_cast<int>(bs.range(0)));
  PhasorFields p(5e9, st.spec().dims);
  const std::complex<double> w{0.3, -0.4};
  for (auto _ : bs) {
    if (X == Execution::Serial) kernels::accumulate_dft_serial(st.fields(), p, w, w);
    else kernels::accumulate_dft_parallel(st.fields(), p, w, w);
    benchmark::DoNotOptimize(p.ex.data());
  }
}

}  // namespace

BENCHMARK(BM_Step<Execution::Serial>)->Arg(48)->Arg(96)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Step<Execution::Parallel>)->Arg(48)->Arg(96)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Energy<Execution::Serial>)->Arg(48)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Energy<Execution::Parallel>)->Arg(48)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Dft<Execution::Serial>)->Arg(48)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Dft<Execution::Parallel>)->Arg(48)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
