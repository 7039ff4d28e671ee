// Microbenchmarks for the hot paths: exact composition and inversion at
// growing piece counts, evaluation, the exact and numeric integral metrics,
// dyadic power towers, and the straightening pipeline end to end.
#include <benchmark/benchmark.h>

#include "circleflow/flows.hpp"
#include "circleflow/metric.hpp"
#include "circleflow/pac_map.hpp"
#include "circleflow/random_maps.hpp"
#include "circleflow/straighten.hpp"

using namespace circleflow;

namespace {

PacMap random_with_pieces(std::uint64_t seed, int pieces) {
  Rng rng(seed);
  // random_aiet draws 2..max_pieces; retry until the draw saturates.
  for (;;) {
    PacMap m = random_aiet(rng, pieces, 1, 1 << 20);
    if (static_cast<int>(m.pieces().size()) >= pieces - 1) return m;
  }
}

void bm_compose(benchmark::State& state) {
  PacMap f = random_with_pieces(1, static_cast<int>(state.range(0)));
  PacMap g = random_with_pieces(2, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(compose(f, g));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(bm_compose)->RangeMultiplier(2)->Range(8, 256)->Complexity();

void bm_inverse(benchmark::State& state) {
  PacMap f = random_with_pieces(3, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(f.inverse());
  state.SetComplexityN(state.range(0));
}
BENCHMARK(bm_inverse)->RangeMultiplier(2)->Range(8, 256)->Complexity();

void bm_evaluate(benchmark::State& state) {
  PacMap f = random_with_pieces(4, 256);
  Rng rng(5);
  std::vector<DPoint> xs;
  for (int i = 0; i < 1024; ++i) xs.push_back(DPoint{0, random_rational(rng, 1 << 20)});
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(f.evaluate(xs[i]));
    i = (i + 1) % xs.size();
  }
}
BENCHMARK(bm_evaluate);

void bm_exact_distance(benchmark::State& state) {
  PacMap f = random_with_pieces(6, static_cast<int>(state.range(0)));
  PacMap g = random_with_pieces(7, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(d_tilde1(f, g));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(bm_exact_distance)->RangeMultiplier(2)->Range(8, 128)->Complexity();

void bm_numeric_distance(benchmark::State& state) {
  PacMap g = glued_flow61(Rat(1) / 4);
  PacMap id = PacMap::identity(g.source());
  for (auto _ : state) benchmark::DoNotOptimize(d_tilde1(g, id));
}
BENCHMARK(bm_numeric_distance);

void bm_super_level_measure(benchmark::State& state) {
  PacMap f = random_with_pieces(8, 64);
  PacMap g = random_with_pieces(9, 64);
  for (auto _ : state) benchmark::DoNotOptimize(measure_U_n(f, g, 10));
}
BENCHMARK(bm_super_level_measure);

void bm_dyadic_power(benchmark::State& state) {
  long m = state.range(0);
  for (auto _ : state) benchmark::DoNotOptimize(dyadic63(m, 4));
}
BENCHMARK(bm_dyadic_power)->Arg(4)->Arg(16)->Arg(64);

void bm_straighten_glued(benchmark::State& state) {
  Flow fam = glued61_flow();
  for (auto _ : state) benchmark::DoNotOptimize(straighten(fam));
}
BENCHMARK(bm_straighten_glued)->Unit(benchmark::kMillisecond);

void bm_straighten_torus(benchmark::State& state) {
  Flow fam = torus_flow(make_torus_params({Rat(1) / 3, Rat(1) / 3, Rat(1) / 3},
                                          {Rat(1) / 3, Rat(0), Rat(1) / 2}));
  for (auto _ : state) benchmark::DoNotOptimize(straighten(fam));
}
BENCHMARK(bm_straighten_torus)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
