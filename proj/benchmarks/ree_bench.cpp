// Micro and macro benchmarks; the range argument is m, with q = 3^(2m+1).

#include <benchmark/benchmark.h>

#include "ree/conjugacy.hpp"
#include "ree/membership.hpp"

using namespace ree;

namespace {

void BM_FieldMul(benchmark::State& state) {
  Field f(static_cast<int>(state.range(0)));
  Rng rng(1);
  std::vector<Elem> xs(1024);
  for (auto& x : xs) x = static_cast<Elem>(uniform(rng, f.q()));
  Elem acc = 1;
  std::size_t i = 0;
  for (auto _ : state) {
    acc = f.mul(acc == 0 ? 1 : acc, xs[i++ & 1023]);
    benchmark::DoNotOptimize(acc);
  }
}
BENCHMARK(BM_FieldMul)->DenseRange(1, 3);

void BM_MatrixMul(benchmark::State& state) {
  auto ree = ReeStandard::make(static_cast<int>(state.range(0)));
  Rng rng(2);
  Matrix a = Matrix::random_invertible(ree->fp(), 7, rng), b = Matrix::random_invertible(ree->fp(), 7, rng);
  for (auto _ : state) benchmark::DoNotOptimize(a * b);
}
BENCHMARK(BM_MatrixMul)->DenseRange(1, 3);

void BM_StabilizerElement(benchmark::State& state) {
  auto ree = ReeStandard::make(static_cast<int>(state.range(0)));
  Rng rng(3);
  auto [gens, h] = random_conjugate(*ree, rng);
  Vec p = vec_mul(ree->field(), ree->p_infinity().coords, h);
  StabilizerFinder finder(gens, 4);
  for (auto _ : state) benchmark::DoNotOptimize(finder.random_stabilizer_element(p));
}
BENCHMARK(BM_StabilizerElement)->DenseRange(1, 3)->Unit(benchmark::kMillisecond);

void BM_ElementToSlp(benchmark::State& state) {
  auto ree = ReeStandard::make(static_cast<int>(state.range(0)));
  auto gens = ree->generators();
  MembershipTester mt(ree, gens, 5);
  mt.preprocess();
  ProductReplacement pr(track_generators(gens), 6);
  for (auto _ : state) {
    state.PauseTiming();
    Matrix g = pr.next().m;
    state.ResumeTiming();
    benchmark::DoNotOptimize(mt.element_to_slp(g));
  }
}
BENCHMARK(BM_ElementToSlp)->DenseRange(1, 3)->Unit(benchmark::kMillisecond);

void BM_Conjugate(benchmark::State& state) {
  auto ree = ReeStandard::make(static_cast<int>(state.range(0)));
  Rng rng(7);
  auto [gens, h] = random_conjugate(*ree, rng);
  std::uint64_t seed = 8;
  for (auto _ : state) benchmark::DoNotOptimize(conjugate_to_standard(*ree, gens, seed++));
}
BENCHMARK(BM_Conjugate)->DenseRange(1, 2)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
