#include <benchmark/benchmark.h>

#include "sltime/arc.hpp"
#include "sltime/figures.hpp"
#include "sltime/sweep.hpp"
#include "sltime/tdse.hpp"

using namespace sltime;

namespace {

const LayeredCell& cell() {
  static const LayeredCell c(representative_cell(), representative_outside());
  return c;
}

const BandInterval& band() {
  static const BandInterval b = first_band(cell());
  return b;
}

void transmission_serial(benchmark::State& st) {
  auto grid = EnergyGrid::uniform(1.0, 300.0, st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(serial::transmission_sweep(cell(), 5, grid));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void transmission_parallel(benchmark::State& st) {
  auto grid = EnergyGrid::uniform(1.0, 300.0, st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(parallel::transmission_sweep(cell(), 5, grid));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void timing_serial(benchmark::State& st) {
  auto grid = band_interior_grid(band(), st.range(0), 0.1);
  for (auto _ : st) benchmark::DoNotOptimize(serial::timing_curve(cell(), 5, grid, 1e-3));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void timing_parallel(benchmark::State& st) {
  auto grid = band_interior_grid(band(), st.range(0), 0.1);
  for (auto _ : st) benchmark::DoNotOptimize(parallel::timing_curve(cell(), 5, grid, 1e-3));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void arc_design(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(design_rule_of_thumb(representative_cell(), representative_outside(), band()));
}

void crank_nicolson_step(benchmark::State& st) {
  Grid1D g;
  g.x_min = 0.0;
  g.dx = 0.1;
  g.dt = 0.5;
  g.n_points = st.range(0);
  WavePacket pk{g.dx * g.n_points / 2, 60.0, 60.0};
  CrankNicolson cn(free_profile(0.067, g), g);
  auto psi = gaussian_packet(pk, 0.067, g);
  for (auto _ : st) {
    cn.step(psi);
    benchmark::DoNotOptimize(psi.data());
  }
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

}  // namespace

BENCHMARK(transmission_serial)->Arg(10000)->Arg(100000);
BENCHMARK(transmission_parallel)->Arg(10000)->Arg(100000);
BENCHMARK(timing_serial)->Arg(2000)->Arg(20000);
BENCHMARK(timing_parallel)->Arg(2000)->Arg(20000);
BENCHMARK(arc_design)->Unit(benchmark::kMillisecond);
BENCHMARK(crank_nicolson_step)->Arg(20000)->Arg(200000);

BENCHMARK_MAIN();
