#include <benchmark/benchmark.h>

#include "pcs/estimator.hpp"
#include "pcs/experiment.hpp"
#include "pcs/feasible.hpp"
#include "pcs/likelihood.hpp"
#include "pcs/rng.hpp"
#include "pcs/sensing.hpp"

namespace {

pcs::Vector random_vector(std::size_t n, std::uint64_t seed, double scale) {
  pcs::CounterRng rng(seed);
  pcs::Vector v(n);
  for (auto& x : v) x = scale * rng.uniform();
  return v;
}

void BM_ApplyShifted(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto m = static_cast<std::size_t>(state.range(1));
  const auto sm = pcs::SensingMatrix::rademacher(n, m, 1);
  const auto f = random_vector(m, 2, 10.0);
  pcs::Vector out(n);
  for (auto _ : state) {
    sm.apply_shifted_into(f, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * m));
}
BENCHMARK(BM_ApplyShifted)->Args({64, 16})->Args({256, 64})->Args({1024, 256});

void BM_Rademacher(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto m = static_cast<std::size_t>(state.range(1));
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(pcs::SensingMatrix::rademacher(n, m, ++seed));
}
BENCHMARK(BM_Rademacher)->Args({200, 64})->Args({1024, 256});

void BM_ProjectOntoC(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  pcs::CounterRng rng(3);
  pcs::Vector f(m);
  for (auto& x : f) x = 100.0 * rng.normal();
  for (auto _ : state) benchmark::DoNotOptimize(pcs::project_onto_C(f, 0.5 / m, 100.0));
}
BENCHMARK(BM_ProjectOntoC)->Arg(8)->Arg(64)->Arg(1024);

void BM_SamplePoisson(benchmark::State& state) {
  const auto mean = random_vector(1024, 4, static_cast<double>(state.range(0)));
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(pcs::sample_poisson(mean, ++seed));
  state.SetItemsProcessed(state.iterations() * 1024);
}
BENCHMARK(BM_SamplePoisson)->Arg(10)->Arg(1000)->Arg(1000000);

void BM_SolveExact(benchmark::State& state) {
  pcs::ExperimentConfig cfg;
  cfg.m = static_cast<std::size_t>(state.range(0));
  cfg.n_meas = 64;
  cfg.k_max = static_cast<std::size_t>(state.range(1));
  cfg.rho = 0.3;
  cfg.basis_kind = pcs::BasisKind::dct;
  const auto inst = pcs::build_instance(cfg);
  const auto y = pcs::sample_poisson(inst.matrix.apply_shifted(inst.f_star.values()), inst.seeds.poisson(0));
  for (auto _ : state) benchmark::DoNotOptimize(pcs::solve_exact(y, inst.matrix, inst.spec));
}
BENCHMARK(BM_SolveExact)->Args({8, 2})->Args({16, 2})->Args({16, 3})->Unit(benchmark::kMillisecond);

void BM_SolveGreedy(benchmark::State& state) {
  pcs::ExperimentConfig cfg;
  cfg.m = static_cast<std::size_t>(state.range(0));
  cfg.n_meas = 128;
  cfg.k_max = 4;
  cfg.rho = 0.3;
  cfg.basis_kind = pcs::BasisKind::dct;
  const auto inst = pcs::build_instance(cfg);
  const auto y = pcs::sample_poisson(inst.matrix.apply_shifted(inst.f_star.values()), inst.seeds.poisson(0));
  for (auto _ : state) benchmark::DoNotOptimize(pcs::solve_greedy(y, inst.matrix, inst.spec));
}
BENCHMARK(BM_SolveGreedy)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_KraftSum(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const auto spec = pcs::FeasibleSetSpec::make(m, 1.0, 0.5 / m, pcs::BasisKind::identity, m);
  for (auto _ : state) benchmark::DoNotOptimize(pcs::kraft_sum(spec));
}
BENCHMARK(BM_KraftSum)->Arg(9)->Arg(16);

}  // namespace

BENCHMARK_MAIN();
