// Micro-benchmarks for the hot nonlocal kernels.

#include <benchmark/benchmark.h>

#include <cmath>
#include <memory>

#include "choqlab/bubble.hpp"
#include "choqlab/operators.hpp"
#include "choqlab/riesz.hpp"

using namespace choqlab;

namespace {

std::shared_ptr<const GridDomain> ball(int N, int nodes) {
  return std::make_shared<GridDomain>(
      make_domain(DomainKind::radial_ball, N, {0.0}, {4.0}, {nodes}));
}

void BM_KernelTableNewton(benchmark::State& state) {
  auto d = ball(4, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_radial_kernel_table(*d, 2.0));
  }
}
BENCHMARK(BM_KernelTableNewton)->Arg(256)->Arg(1024);

void BM_KernelTableQuadrature(benchmark::State& state) {
  auto d = ball(4, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_radial_kernel_table(*d, 1.3));
  }
}
BENCHMARK(BM_KernelTableQuadrature)->Arg(128);

void BM_RadialChoquardNewton(benchmark::State& state) {
  auto d = ball(4, static_cast<int>(state.range(0)));
  const auto exps = critical_exponents(4, 2.0);
  const GridFunction u = GridFunction::sample_radial(d, [](double r) {
    return 1.0 / (1.0 + r * r);
  });
  for (auto _ : state) {
    benchmark::DoNotOptimize(choquard_double_integral(u, exps.two_star_mu, exps));
  }
}
BENCHMARK(BM_RadialChoquardNewton)->Arg(1024)->Arg(4096);

void BM_BoxPairwise(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  auto d = std::make_shared<GridDomain>(make_domain(
      DomainKind::box, 2, {0.0, 0.0}, {1.0, 1.0}, {n, n}));
  const auto exps = critical_exponents(4, 0.8);
  const GridFunction u(d, 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(choquard_double_integral(u, 2.0, exps));
  }
}
BENCHMARK(BM_BoxPairwise)->Arg(16)->Arg(32);

void BM_DirichletEnergy(benchmark::State& state) {
  auto d = ball(4, static_cast<int>(state.range(0)));
  const GridFunction u = GridFunction::sample_radial(d, [](double r) {
    return std::exp(-r * r);
  });
  for (auto _ : state) {
    benchmark::DoNotOptimize(dirichlet_energy(u));
  }
}
BENCHMARK(BM_DirichletEnergy)->Arg(4096);

void BM_SobolevConstant(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(sobolev_constant_closed_form(4) +
                             hls_sharp_constant(critical_exponents(4, 2.0)));
  }
}
BENCHMARK(BM_SobolevConstant);

}  // namespace

BENCHMARK_MAIN();
