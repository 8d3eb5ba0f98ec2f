// Serial reference vs OpenMP kernels on a relaxation-sized workload.
// TDQMC_THREADS (or OMP_NUM_THREADS) sets the parallel width.

#include <benchmark/benchmark.h>
#include <omp.h>

#include <cstdlib>
#include <random>

#include "tdqmc/kernels.hpp"
#include "tdqmc/potentials.hpp"

using namespace tdqmc;

namespace {

struct Workload {
  Grid grid;
  std::size_t M;
  std::vector<Position> walkers;
  std::vector<double> waves;

  Workload(int dim, int points, std::size_t m) : grid(dim, dim == 1 ? 18.0 : 12.0, points), M(m) {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> nd(0.0, 1.5);
    walkers.resize(M);
    for (auto& p : walkers) p = grid.wrap({nd(rng), dim == 2 ? nd(rng) : 0.0});
    waves.resize(M * grid.size());
    for (std::size_t k = 0; k < M; ++k)
      for (std::size_t r = 0; r < grid.size(); ++r) {
        const double d2 = grid.distance2(grid.node_position(r), walkers[k]);
        waves[k * grid.size() + r] = std::exp(-d2 / 2);
      }
  }
};

template <bool Parallel>
void direct_rows(benchmark::State& state) {
  const Workload w(1, 128, static_cast<std::size_t>(state.range(0)));
  const kernels::DirectRowsArgs args{&w.grid, w.walkers, 1.0, 1.0, 1.0};
  std::vector<double> rows(w.M * w.grid.size());
  for (auto _ : state) {
    if constexpr (Parallel)
      kernels::parallel::direct_rows(args, rows);
    else
      kernels::serial::direct_rows(args, rows);
    benchmark::DoNotOptimize(rows.data());
  }
}

template <bool Parallel>
void gridded_table(benchmark::State& state) {
  const Workload w(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)), 1000);
  const double a = 1.0;
  const PeriodicConvolution vee(w.grid, [a](const Position& d) { return coulomb_ee_r2(d[0] * d[0] + d[1] * d[1], a); });
  const auto h = kernels::deposit(w.grid, w.walkers);
  const auto koff = kernels::kernel_offsets(w.grid, 1.0);
  std::vector<unsigned char> needed(w.grid.size(), 0);
  for (const auto& p : w.walkers) {
    const Stencil s = interpolation_stencil(w.grid, p);
    for (int c = 0; c < s.count; ++c) needed[s.index[c]] = 1;
  }
  const kernels::GriddedTableArgs args{&w.grid, &vee, h, koff, needed};
  std::vector<double> table(w.grid.size() * w.grid.size()), z(w.grid.size());
  for (auto _ : state) {
    if constexpr (Parallel)
      kernels::parallel::gridded_table(args, table, z);
    else
      kernels::serial::gridded_table(args, table, z);
    benchmark::DoNotOptimize(table.data());
  }
}

template <bool Parallel>
void step_waves(benchmark::State& state) {
  Workload w(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)), 1000);
  const SpectralKinetic kin(w.grid);
  const auto factor = kin.propagator_factor(0.01);
  const Field v = [&] {
    LatticeSpec s;
    s.dim = w.grid.dim();
    s.sites = {{0, 0}, {1, 0}};
    return sample_on_grid(s, w.grid);
  }();
  const kernels::PotentialFill fill = [&](std::size_t, std::span<double> out) {
    std::copy(v.values().begin(), v.values().end(), out.begin());
  };
  const kernels::WaveStepArgs args{&kin, factor, w.waves, w.M, 0.01, w.grid.cell_volume(), &fill};
  for (auto _ : state) {
    if constexpr (Parallel)
      kernels::parallel::step_waves(args);
    else
      kernels::serial::step_waves(args);
    benchmark::DoNotOptimize(w.waves.data());
  }
}

template <bool Parallel>
void gram_moments(benchmark::State& state) {
  const Workload w(1, 128, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    const auto m = Parallel ? kernels::parallel::gram_moments(w.waves, w.M, w.grid.cell_volume())
                            : kernels::serial::gram_moments(w.waves, w.M, w.grid.cell_volume());
    benchmark::DoNotOptimize(m);
  }
}

}  // namespace

BENCHMARK(direct_rows<false>)->Name("direct_rows/serial")->Arg(250)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(direct_rows<true>)->Name("direct_rows/parallel")->Arg(250)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(gridded_table<false>)->Name("gridded_table/serial")->Args({1, 128})->Args({2, 32})->Unit(benchmark::kMillisecond);
BENCHMARK(gridded_table<true>)->Name("gridded_table/parallel")->Args({1, 128})->Args({2, 32})->Unit(benchmark::kMillisecond);
BENCHMARK(step_waves<false>)->Name("step_waves/serial")->Args({1, 128})->Args({2, 32})->Unit(benchmark::kMillisecond);
BENCHMARK(step_waves<true>)->Name("step_waves/parallel")->Args({1, 128})->Args({2, 32})->Unit(benchmark::kMillisecond);
BENCHMARK(gram_moments<false>)->Name("gram_moments/serial")->Arg(1000)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(gram_moments<true>)->Name("gram_moments/parallel")->Arg(1000)->Arg(2000)->Unit(benchmark::kMillisecond);

int main(int argc, char** argv) {
  if (const char* env = std::getenv("TDQMC_THREADS")) omp_set_num_threads(std::max(1, std::atoi(env)));
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
