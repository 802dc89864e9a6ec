#include <benchmark/benchmark.h>

#include <cmath>

#include "isolab/circle.hpp"
#include "isolab/crossratio.hpp"
#include "isolab/edelstein.hpp"
#include "isolab/funcspace.hpp"
#include "isolab/isometry.hpp"

using namespace isolab;

namespace {

const double kGolden = (std::sqrt(5.0) - 1.0) / 2.0;

Diffeo driving() { return conjugate(Diffeo::sine_shear(0.5, 1), Diffeo::rotation(kGolden)); }

SpaceTag tag_for(int k) { return k == 0 ? SpaceTag::c0() : k == 1 ? SpaceTag::l1() : SpaceTag::l2pair(); }

}  // namespace

// One application of I on a sampled vector.
static void BM_Transport(benchmark::State& state) {
  const SpaceTag tag = tag_for(static_cast<int>(state.range(0)));
  const std::size_t n = tag.arity() == 1 ? kDefaultN1 : kDefaultN2;
  const AffineIsometry iso{tag, driving()};
  const GridFunction v = standard_vector(tag, tag.arity() == 1 ? "sin" : "cosdiff", n);
  for (auto _ : state) benchmark::DoNotOptimize(apply_once(iso, v));
  state.SetLabel(tag.name());
}
BENCHMARK(BM_Transport)->Arg(0)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

static void BM_Recurrence(benchmark::State& state) {
  const SpaceTag tag = SpaceTag::c0();
  const AffineIsometry iso{tag, driving()};
  const GridFunction v = standard_vector(tag, "sin", kDefaultN1);
  std::vector<int> times;
  for (std::int64_t q : fibonacci_denominators(static_cast<int>(state.range(0)))) times.push_back(static_cast<int>(q));
  for (auto _ : state) benchmark::DoNotOptimize(recurrence_scan(iso, v, times));
}
BENCHMARK(BM_Recurrence)->Arg(6)->Arg(10)->Unit(benchmark::kMillisecond);

static void BM_CrossratioIntegral(benchmark::State& state) {
  const Quadruple q(0.1, 0.2, 0.45, normalize_d(0.1, 0.2, 0.45));
  const int order = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(crossratio_integral(q, order));
}
BENCHMARK(BM_CrossratioIntegral)->Arg(16)->Arg(64);

static void BM_EdelsteinApply(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  const EdelsteinIsometry e = EdelsteinIsometry::full(dim);
  SeqVector v(static_cast<std::size_t>(dim));
  for (int k = 0; k < dim; ++k) v[static_cast<std::size_t>(k)] = {std::cos(k), std::sin(k)};
  for (auto _ : state) benchmark::DoNotOptimize(apply_power(e, 5040, v));
  state.SetComplexityN(dim);
}
BENCHMARK(BM_EdelsteinApply)->RangeMultiplier(10)->Range(10, 10000)->Complexity();

BENCHMARK_MAIN();
