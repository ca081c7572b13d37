#include <benchmark/benchmark.h>

#include "apwb/scheme.hpp"

namespace {

apwb::State equilibrium(const apwb::Potential& phi, const apwb::ModelParams& p) {
  return apwb::State(apwb::build_discrete_equilibrium(phi.interior(), 1.0, p),
                     std::vector<double>(phi.n_cells(), 0.0));
}

void BM_Step(benchmark::State& bm, apwb::Reconstruction recon, double gamma) {
  const auto n = static_cast<std::size_t>(bm.range(0));
  const apwb::Grid grid(0.0, 1.0, n);
  const apwb::Potential phi = apwb::Potential::sample(apwb::PotentialKind::Sinusoidal, grid);
  apwb::ModelParams p;
  p.epsilon = 1e-2;
  p.gamma = gamma;
  apwb::SchemeOptions o;
  o.bc = apwb::BoundaryKind::HydrostaticGhost;
  o.reconstruction = recon;
  apwb::State s = equilibrium(phi, p);
  const double dt = apwb::stable_dt(grid, phi, p, s);
  apwb::Stepper stepper(p, o, grid.dx());
  for (auto _ : bm) {
    stepper.advance(s, phi, dt);
    benchmark::DoNotOptimize(s.rho.data());
  }
  bm.SetItemsProcessed(bm.iterations() * static_cast<std::int64_t>(n));
}

void BM_RusanovFlux(benchmark::State& bm) {
  apwb::ModelParams p;
  double rho = 1.0;
  for (auto _ : bm) {
    const apwb::FluxPair f = apwb::rusanov_flux({rho, 0.1}, {0.5, -0.2}, p);
    benchmark::DoNotOptimize(f);
    rho += 1e-12;
  }
}

}  // namespace

BENCHMARK_CAPTURE(BM_Step, p_isothermal, apwb::Reconstruction::P, 1.0)
    ->Arg(100)
    ->Arg(1000)
    ->Arg(10000);
BENCHMARK_CAPTURE(BM_Step, p_isentropic, apwb::Reconstruction::P, 1.4)
    ->Arg(100)
    ->Arg(1000)
    ->Arg(10000);
BENCHMARK_CAPTURE(BM_Step, e_isentropic, apwb::Reconstruction::E, 1.4)->Arg(1000);
BENCHMARK_CAPTURE(BM_Step, none_isentropic, apwb::Reconstruction::None, 1.4)->Arg(1000);
BENCHMARK(BM_RusanovFlux);

BENCHMARK_MAIN();
