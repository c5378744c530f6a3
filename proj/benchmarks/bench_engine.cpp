#include <benchmark/benchmark.h>

#include <cmath>

#include "autorb/contour.hpp"
#include "autorb/identities.hpp"
#include "autorb/orbit.hpp"
#include "autorb/polynomial.hpp"

using autorb::Complex;
using autorb::EntireFunction;

static void BM_CircleIntegral(benchmark::State& state) {
  const double r = 0.5 + 0.49 * state.range(0) / 100.0;  // pole at 1 approached from inside
  for (auto _ : state) {
    auto res = autorb::circle_integral([](Complex w) { return 1.0 / (w - 1.0); }, r);
    benchmark::DoNotOptimize(res.value);
  }
}
BENCHMARK(BM_CircleIntegral)->Arg(0)->Arg(50)->Arg(90)->Arg(99);

static void BM_OrbitExp(benchmark::State& state) {
  const auto f = EntireFunction::exp();
  const double R = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(autorb::orbit(f, Complex(1.0, 0.0), R).points.size());
}
BENCHMARK(BM_OrbitExp)->Arg(20)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

static void BM_OrbitCosSqrt(benchmark::State& state) {
  const auto f = EntireFunction::cos_sqrt();
  const double R = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(autorb::orbit(f, Complex(1.0, 0.0), R).points.size());
}
BENCHMARK(BM_OrbitCosSqrt)->Arg(200)->Arg(2000)->Unit(benchmark::kMillisecond);

static void BM_PolynomialRoots(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::vector<Complex> a(n + 1);
  for (int k = 0; k <= n; ++k) a[k] = Complex(std::cos(1.3 * k), std::sin(0.7 * k + 0.2));
  for (auto _ : state) benchmark::DoNotOptimize(autorb::polynomial_roots(a).size());
}
BENCHMARK(BM_PolynomialRoots)->Arg(4)->Arg(8)->Arg(16)->Arg(32);

static void BM_DerivativeSums(benchmark::State& state) {
  const auto f = EntireFunction::exp();
  for (auto _ : state) benchmark::DoNotOptimize(autorb::verify_derivative_sums(f, Complex(0.7, 0.3), 10.0, 2).abs_err);
}
BENCHMARK(BM_DerivativeSums)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
