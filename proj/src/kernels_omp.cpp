#include <cmath>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "treespark/error.hpp"
#include "treespark/kernels.hpp"

namespace treespark::kernels {

namespace {
// Below this many rows the fork/join cost dominates.
constexpr std::size_t kParallelMinRows = 96;

int g_threads = 0;
}  // namespace

int max_threads() {
#ifdef _OPENMP
  return g_threads > 0 ? g_threads : omp_get_max_threads();
#else
  return 1;
#endif
}

void set_threads(int n) { g_threads = n > 0 ? n : 0; }

namespace parallel {

Matrix multiply(const Matrix& a, const Matrix& b) {
  const std::size_t n = a.size();
  if (b.size() != n) throw InvalidParameter("multiply: dimension mismatch");
  Matrix c(n);
  const auto rows = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static) num_threads(max_threads()) if (n >= kParallelMinRows)
  for (std::ptrdiff_t i = 0; i < rows; ++i) {
    double* ci = c.row(static_cast<std::size_t>(i)).data();
    for (std::size_t k = 0; k < n; ++k) {
      const double aik = a(static_cast<std::size_t>(i), k);
      if (aik == 0.0) continue;
      const double* bk = b.row(k).data();
      for (std::size_t j = 0; j < n; ++j) ci[j] += aik * bk[j];
    }
  }
  return c;
}

void symv(const Matrix& a, std::size_t off, std::span<const double> x, std::span<double> y) {
  const std::size_t len = a.size() - off;
  const auto rows = static_cast<std::ptrdiff_t>(len);
#pragma omp parallel for schedule(static) num_threads(max_threads()) if (len >= kParallelMinRows)
  for (std::ptrdiff_t i = 0; i < rows; ++i) {
    const double* ai = a.row(off + static_cast<std::size_t>(i)).data() + off;
    double s = 0.0;
    for (std::size_t j = 0; j < len; ++j) s += ai[j] * x[j];
    y[static_cast<std::size_t>(i)] = s;
  }
}

void syr2(Matrix& a, std::size_t off, std::span<const double> v, std::span<const double> w) {
  const std::size_t len = a.size() - off;
  const auto rows = static_cast<std::ptrdiff_t>(len);
#pragma omp parallel for schedule(static) num_threads(max_threads()) if (len >= kParallelMinRows)
  for (std::ptrdiff_t ii = 0; ii < rows; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    double* ai = a.row(off + i).data() + off;
    const double vi = v[i];
    const double wi = w[i];
    for (std::size_t j = 0; j < len; ++j) ai[j] -= vi * w[j] + wi * v[j];
  }
}

void apply_reflector(Matrix& q, std::size_t off, std::span<const double> v, double beta) {
  const std::size_t len = q.size() - off;
  const std::size_t n = q.size();
  // u^T = beta v^T Q[off:, off:], accumulated row by row so the reduction
  // order per column is fixed.
  std::vector<double> u(len, 0.0);
  for (std::size_t i = 0; i < len; ++i) {
    const double vi = v[i];
    if (vi == 0.0) continue;
    const double* qi = q.row(off + i).data() + off;
    for (std::size_t j = 0; j < len; ++j) u[j] += vi * qi[j];
  }
  for (double& x : u) x *= beta;
  const auto rows = static_cast<std::ptrdiff_t>(len);
#pragma omp parallel for schedule(static) num_threads(max_threads()) if (n >= kParallelMinRows)
  for (std::ptrdiff_t ii = 0; ii < rows; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    double* qi = q.row(off + i).data() + off;
    const double vi = v[i];
    for (std::size_t j = 0; j < len; ++j) qi[j] -= vi * u[j];
  }
}

Matrix spd_inverse(const Matrix& a) {
  const std::size_t n = a.size();
  Matrix l(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double* lj = l.row(j).data();
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= lj[k] * lj[k];
    if (!(d > 0.0)) throw NotPsd("spd_inverse: matrix is not positive definite");
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    const auto rows = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static) num_threads(max_threads()) if (n - j >= kParallelMinRows)
    for (std::ptrdiff_t ii = static_cast<std::ptrdiff_t>(j) + 1; ii < rows; ++ii) {
      const auto i = static_cast<std::size_t>(ii);
      const double* li = l.row(i).data();
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= li[k] * lj[k];
      l(i, j) = s / ljj;
    }
  }

  // Lower-triangular inverse, one column per task.
  Matrix linv(n);
  const auto cols = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 8) num_threads(max_threads()) if (n >= kParallelMinRows)
  for (std::ptrdiff_t cc = 0; cc < cols; ++cc) {
    const auto c = static_cast<std::size_t>(cc);
    std::vector<double> col(n, 0.0);
    col[c] = 1.0 / l(c, c);
    for (std::size_t i = c + 1; i < n; ++i) {
      const double* li = l.row(i).data();
      double s = 0.0;
      for (std::size_t k = c; k < i; ++k) s -= li[k] * col[k];
      col[i] = s / li[i];
    }
    for (std::size_t i = c; i < n; ++i) linv(i, c) = col[i];
  }

  // A^{-1} = Linv^T Linv; X(i, j) = sum_{k >= max(i, j)} Linv(k, i) Linv(k, j).
  Matrix x(n);
  const auto rows = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 8) num_threads(max_threads()) if (n >= kParallelMinRows)
  for (std::ptrdiff_t ii = 0; ii < rows; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    double* xi = x.row(i).data();
    for (std::size_t k = i; k < n; ++k) {
      const double* lk = linv.row(k).data();
      const double lki = lk[i];
      if (lki == 0.0) continue;
      for (std::size_t j = 0; j <= k; ++j) xi[j] += lki * lk[j];
    }
  }
  return x;
}

}  // namespace parallel
}  // namespace treespark::kernels
