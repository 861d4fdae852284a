// Serial reference kernels against their OpenMP counterparts, and the QL
// eigensolver against Jacobi.

#include <benchmark/benchmark.h>

#include "treespark/kernels.hpp"
#include "treespark/rng.hpp"
#include "treespark/spectral.hpp"

using namespace treespark;

namespace {

Matrix random_symmetric(std::size_t n) {
  Philox4x32 rng(1, n);
  Matrix a(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) a(i, j) = a(j, i) = 2.0 * rng.uniform() - 1.0;
  return a;
}

Matrix random_spd(std::size_t n) {
  Matrix a = random_symmetric(n);
  for (std::size_t i = 0; i < n; ++i) a(i, i) += static_cast<double>(n);
  return a;
}

template <Matrix (*F)(const Matrix&, const Matrix&)>
void BM_multiply(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const Matrix a = random_symmetric(n), b = random_symmetric(n);
  for (auto _ : st) benchmark::DoNotOptimize(F(a, b));
  st.SetComplexityN(st.range(0));
}

template <Matrix (*F)(const Matrix&)>
void BM_unary(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const Matrix a = random_spd(n);
  for (auto _ : st) benchmark::DoNotOptimize(F(a));
}

template <SpectralDecomposition (*F)(const Matrix&)>
void BM_eig(benchmark::State& st) {
  const Matrix a = random_symmetric(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(F(a));
}

}  // namespace

BENCHMARK(BM_multiply<kernels::serial::multiply>)->Name("multiply/serial")->RangeMultiplier(2)->Range(64, 512);
BENCHMARK(BM_multiply<kernels::parallel::multiply>)->Name("multiply/parallel")->RangeMultiplier(2)->Range(64, 512);
BENCHMARK(BM_unary<kernels::serial::spd_inverse>)->Name("spd_inverse/serial")->RangeMultiplier(2)->Range(64, 512);
BENCHMARK(BM_unary<kernels::parallel::spd_inverse>)->Name("spd_inverse/parallel")->RangeMultiplier(2)->Range(64, 512);
BENCHMARK(BM_eig<eig_sym>)->Name("eig/ql")->RangeMultiplier(2)->Range(16, 256);
BENCHMARK(BM_eig<eig_sym_jacobi>)->Name("eig/jacobi")->RangeMultiplier(2)->Range(16, 128);

BENCHMARK_MAIN();
