#include <benchmark/benchmark.h>

#include "planettt/paratopism.hpp"
#include "planettt/solver.hpp"
#include "planettt/strategy.hpp"

using namespace planettt;

namespace {

void BM_BuildPi4(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_affine_plane(resolve_by_last_square(canonical_mols())));
  }
}
BENCHMARK(BM_BuildPi4);

void BM_ValidatePi4(benchmark::State& state) {
  const auto& plane = canonical_pi4();
  for (auto _ : state) benchmark::DoNotOptimize(validate_plane(plane).ok());
}
BENCHMARK(BM_ValidatePi4);

// Fresh solver each iteration so the table starts empty.
void BM_SolvePlane(benchmark::State& state) {
  const int order = static_cast<int>(state.range(0));
  const auto game = PositionalGame::from_plane(order == 4 ? canonical_pi4() : affine_plane_prime(order));
  std::uint64_t nodes = 0;
  for (auto _ : state) {
    const GameValue v = solve(game, GameState(game));
    nodes = v.stats.nodes;
  }
  state.counters["nodes"] = static_cast<double>(nodes);
}
BENCHMARK(BM_SolvePlane)->Arg(2)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_SolvePi4Symmetric(benchmark::State& state) {
  const auto game = PositionalGame::from_plane(canonical_pi4());
  SolveOptions opts;
  opts.use_symmetry = true;
  for (auto _ : state) benchmark::DoNotOptimize(solve(game, GameState(game), opts).value);
}
BENCHMARK(BM_SolvePi4Symmetric)->Unit(benchmark::kMillisecond)->Iterations(1);

void BM_Automorphisms(benchmark::State& state) {
  const auto game = PositionalGame::from_plane(canonical_pi4());
  for (auto _ : state) benchmark::DoNotOptimize(automorphisms(*game).size());
}
BENCHMARK(BM_Automorphisms)->Unit(benchmark::kMillisecond);

void BM_Stabilizer(benchmark::State& state) {
  const MolsSet pair{4, {canonical_mols().squares[0], canonical_mols().squares[1]}};
  for (auto _ : state) benchmark::DoNotOptimize(stabilizer(pair, {0, 2, 4}, {1, 3}).order());
}
BENCHMARK(BM_Stabilizer)->Unit(benchmark::kMillisecond);

void BM_ExtendLabeling(benchmark::State& state) {
  const AffinePlane shuffled = random_relabeling(canonical_pi4(), 7);
  LabelingState partial;
  partial.to_canonical.assign(16, std::nullopt);
  for (auto _ : state) benchmark::DoNotOptimize(extend_labeling(partial, shuffled));
}
BENCHMARK(BM_ExtendLabeling)->Unit(benchmark::kMicrosecond);

void BM_VerifyStrategy(benchmark::State& state) {
  const XenoStrategy strategy(canonical_pi4());
  std::uint64_t leaves = 0;
  for (auto _ : state) leaves = verify_strategy(strategy).leaves;
  state.counters["leaves"] = static_cast<double>(leaves);
}
BENCHMARK(BM_VerifyStrategy)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
