#include <benchmark/benchmark.h>

#include <numbers>
#include <vector>

#include "tetra/dynamics.hpp"
#include "tetra/pb4.hpp"
#include "tetra/phase_core.hpp"
#include "tetra/scenarios.hpp"

using namespace tetra;

namespace {

void BM_Sgrad(benchmark::State& state) {
  const PhaseChart chart(static_cast<int>(state.range(0)));
  const auto h = saddle_hamiltonian(chart);
  std::vector<double> x(chart.dim(), 0.3), out(chart.dim());
  for (auto _ : state) {
    sgrad(h, x, 0.0, out);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_Sgrad)->Arg(1)->Arg(2)->Arg(3);

void BM_PoissonBracket(benchmark::State& state) {
  const PhaseChart chart(2);
  const auto f = saddle_hamiltonian(chart);
  const auto g = shifted(scaled(f, 2.0), 1.0);
  const std::vector<double> x{0.1, -0.4, 0.7, 0.2};
  for (auto _ : state) benchmark::DoNotOptimize(poisson_bracket(f, g, x, 0.0));
}
BENCHMARK(BM_PoissonBracket);

void BM_IntegrateSaddle(benchmark::State& state) {
  const PhaseChart chart(1);
  const auto h = saddle_hamiltonian(chart);
  const std::vector<double> x0{1.0, 0.5};
  for (auto _ : state) {
    auto tr = integrate(h, x0, 0.0, static_cast<double>(state.range(0)));
    benchmark::DoNotOptimize(tr.size());
  }
}
BENCHMARK(BM_IntegrateSaddle)->Arg(1)->Arg(4)->Unit(benchmark::kMicrosecond);

void BM_ScenarioRun(benchmark::State& state) {
  const auto id = static_cast<ScenarioId>(state.range(0));
  const auto cfg = default_scenario_config(id);
  state.SetLabel(to_string(id));
  for (auto _ : state) {
    auto r = run_scenario(cfg);
    benchmark::DoNotOptimize(r.pass);
  }
}
BENCHMARK(BM_ScenarioRun)
    ->Arg(static_cast<int>(ScenarioId::kUnstableEquilibrium))
    ->Arg(static_cast<int>(ScenarioId::kSuperconductivity))
    ->Arg(static_cast<int>(ScenarioId::kMechanical))
    ->Arg(static_cast<int>(ScenarioId::kReebChord))
    ->Unit(benchmark::kMillisecond);

void BM_BracketField(benchmark::State& state) {
  const auto p = prototype_problem(1.0, 2.0, 0.25, static_cast<int>(state.range(0)));
  const auto [f, g] = indicator_interpolants(p);
  for (auto _ : state) {
    auto j = bracket_field(p.window(), f, g);
    benchmark::DoNotOptimize(j(1, 1));
  }
  state.SetItemsProcessed(state.iterations() * p.window().nodes_u() * p.window().nodes_s());
}
BENCHMARK(BM_BracketField)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMicrosecond);

void BM_Pb4Estimate(benchmark::State& state) {
  const auto p = prototype_problem(1.0, 2.0, 0.25, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto rep = estimate_pb4_plus(p);
    benchmark::DoNotOptimize(rep.estimate);
  }
}
BENCHMARK(BM_Pb4Estimate)->Arg(64)->Unit(benchmark::kMillisecond)->Iterations(1);

}  // namespace

BENCHMARK_MAIN();
