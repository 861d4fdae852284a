#include <cmath>

#include "treespark/error.hpp"
#include "treespark/kernels.hpp"

namespace treespark::kernels::serial {

Matrix multiply(const Matrix& a, const Matrix& b) {
  const std::size_t n = a.size();
  if (b.size() != n) throw InvalidParameter("multiply: dimension mismatch");
  Matrix c(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += a(i, k) * b(k, j);
      c(i, j) = s;
    }
  return c;
}

void symv(const Matrix& a, std::size_t off, std::span<const double> x, std::span<double> y) {
  const std::size_t len = a.size() - off;
  for (std::size_t i = 0; i < len; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < len; ++j) s += a(off + i, off + j) * x[j];
    y[i] = s;
  }
}

void syr2(Matrix& a, std::size_t off, std::span<const double> v, std::span<const double> w) {
  const std::size_t len = a.size() - off;
  for (std::size_t i = 0; i < len; ++i)
    for (std::size_t j = 0; j < len; ++j) a(off + i, off + j) -= v[i] * w[j] + w[i] * v[j];
}

void apply_reflector(Matrix& q, std::size_t off, std::span<const double> v, double beta) {
  const std::size_t len = q.size() - off;
  for (std::size_t j = 0; j < len; ++j) {
    double u = 0.0;
    for (std::size_t i = 0; i < len; ++i) u += v[i] * q(off + i, off + j);
    u *= beta;
    for (std::size_t i = 0; i < len; ++i) q(off + i, off + j) -= v[i] * u;
  }
}

Matrix spd_inverse(const Matrix& a) {
  const std::size_t n = a.size();
  Matrix l(n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > 0.0)) throw NotPsd("spd_inverse: matrix is not positive definite");
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / ljj;
    }
  }
  // Solve L L^T X = I one column at a time.
  Matrix x(n);
  std::vector<double> col(n);
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t i = 0; i < n; ++i) {
      double s = (i == c) ? 1.0 : 0.0;
      for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * col[k];
      col[i] = s / l(i, i);
    }
    for (std::size_t ii = n; ii-- > 0;) {
      double s = col[ii];
      for (std::size_t k = ii + 1; k < n; ++k) s -= l(k, ii) * col[k];
      col[ii] = s / l(ii, ii);
    }
    for (std::size_t i = 0; i < n; ++i) x(i, c) = col[i];
  }
  return x;
}

}  // namespace treespark::kernels::serial
