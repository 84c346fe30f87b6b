#include <benchmark/benchmark.h>

#include <bit>
#include <cmath>

#include "asdep/asdep.hpp"

namespace {

asdep::SymmetricMatrix random_spd(std::size_t d) {
  const asdep::Matrix p = asdep::random_orthogonal(d, 11);
  asdep::Vector lambda(d);
  for (std::size_t k = 0; k < d; ++k) lambda[k] = std::pow(0.5, static_cast<double>(k));
  return asdep::SymmetricMatrix::symmetrized(p * asdep::Matrix::diagonal(lambda) * asdep::transpose(p));
}

void BM_SymEig(benchmark::State& state) {
  const auto s = random_spd(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(asdep::sym_eig(s));
}
BENCHMARK(BM_SymEig)->Arg(2)->Arg(10)->Arg(40);

void BM_DirectEstimator(benchmark::State& state) {
  const asdep::TestFunction f = asdep::quadratic_type1(2024);
  asdep::EstimatorConfig cfg;
  cfg.n = static_cast<std::size_t>(state.range(0));
  cfg.h = std::pow(static_cast<double>(cfg.n), -0.5);
  cfg.sigma2 = 1e-3;
  cfg.threads = static_cast<std::size_t>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(asdep::estimate_C_direct(f.evaluate, cfg, f.law, 1));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_DirectEstimator)->Args({4096, 1})->Args({4096, 4})->Unit(benchmark::kMillisecond);

void BM_PickFreeze(benchmark::State& state) {
  const asdep::TestFunction f = asdep::g_sobol('B');
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(asdep::estimate_sigma_tot(f.evaluate, f.law, n, 3));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_PickFreeze)->Arg(4096)->Unit(benchmark::kMillisecond);

void BM_ExactShapley(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const asdep::CoalitionValue value = [](std::uint32_t mask) {
    const double c = static_cast<double>(std::popcount(mask));
    return c * c;
  };
  for (auto _ : state) benchmark::DoNotOptimize(asdep::exact_shapley(value, d));
}
BENCHMARK(BM_ExactShapley)->Arg(8)->Arg(16);

}  // namespace
BENCHMARK_MAIN();
