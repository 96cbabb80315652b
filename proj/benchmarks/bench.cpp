#include <benchmark/benchmark.h>

#include <numbers>

#include "gifga/experiments.hpp"

using namespace gifga;

namespace {

const PeriodicPotential& bump() {
  static const auto V = make_lattice("gaussian-bump", 25.0, 16);
  return V;
}

void BM_AssembleHamiltonian(benchmark::State& state) {
  double xi = 0.1;
  for (auto _ : state) {
    auto H = assemble_hamiltonian(xi, bump());
    benchmark::DoNotOptimize(H.data());
    xi += 1e-4;
  }
}
BENCHMARK(BM_AssembleHamiltonian);

void BM_FullEigensolve(benchmark::State& state) {
  BlochSolver solver(bump());
  double xi = 0.1;
  for (auto _ : state) {
    auto e = solver.eigenpair_direct(xi, 1);
    benchmark::DoNotOptimize(e.energy);
    xi += 1e-4;
  }
}
BENCHMARK(BM_FullEigensolve);

void BM_TrackedEigenvector(benchmark::State& state) {
  BlochSolver solver(bump());
  const auto table = solver.solve_bands(2);
  BandPathTracker tracker(solver, table, 1, 0.1,
                          solver.eigenpair_at(0.1, 1).coeffs);
  double xi = 0.1;
  for (auto _ : state) {
    xi += 1e-4;
    benchmark::DoNotOptimize(tracker.advance(xi).data());
  }
  state.counters["fallbacks"] = static_cast<double>(tracker.fallback_count());
}
BENCHMARK(BM_TrackedEigenvector);

void BM_BandTableEval(benchmark::State& state) {
  BlochSolver solver(bump());
  const auto table = solver.solve_bands(2);
  double xi = 0.0, acc = 0.0;
  for (auto _ : state) {
    double e, de, dde;
    table.eval(1, xi, &e, &de, &dde);
    acc += e + de + dde;
    xi += 1e-3;
  }
  benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_BandTableEval);

void BM_TrajectoryStep(benchmark::State& state) {
  BlochSolver solver(bump());
  const auto table = solver.solve_bands(1);
  const auto U = make_external("harmonic");
  // one 150-step integration per iteration
  for (auto _ : state) {
    auto s = integrate_trajectory(0.2, 0.3, 1, table, U, {0.2, 150});
    benchmark::DoNotOptimize(s.S);
  }
}
BENCHMARK(BM_TrajectoryStep);

void BM_WindowedTransform(benchmark::State& state) {
  const double eps = 1.0 / 64.0;
  BlochSolver solver(bump());
  const auto mesh = PhaseSpaceMesh::standard(eps, 0.85);
  InitialData data;
  data.psi = [=](double x) {
    return std::exp(-50.0 * x * x) * std::polar(1.0, 0.3 * x / eps);
  };
  data.support = 0.85;
  data.eps = eps;
  const double dy = default_dy(eps, solver.effective_mode_count(8));
  for (auto _ : state) {
    auto c = windowed_transform(data, mesh, 8, solver, dy);
    benchmark::DoNotOptimize(c.w.data());
  }
}
BENCHMARK(BM_WindowedTransform)->Unit(benchmark::kMillisecond);

void BM_StrangStep(benchmark::State& state) {
  const double eps = 1.0 / 64.0;
  const auto U = make_external("harmonic");
  const auto cfg =
      SpectralConfig::standard(eps, 8.0 * std::numbers::pi, 1.0 / 4096.0);
  StrangPropagator prop(cfg, total_potential(bump(), U, eps));
  InitialData data;
  data.psi = [=](double x) { return std::exp(-50.0 * x * x); };
  data.support = 0.85;
  data.eps = eps;
  auto f = sample_initial(data, cfg);
  for (auto _ : state) prop.step(f);
  benchmark::DoNotOptimize(f.values.data());
}
BENCHMARK(BM_StrangStep)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
