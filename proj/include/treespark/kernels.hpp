#pragma once

// Dense linear-algebra kernels used by the spectral layer.
//
// Every kernel has a straightforward serial reference in `serial::` and an
// OpenMP variant in `parallel::`. Parallel variants partition work by output
// row and keep a fixed per-element reduction order, so their results do not
// depend on the thread count. The serial versions exist for testing and for
// the kernel benchmark.

#include <cstddef>
#include <span>

#include "treespark/matrix.hpp"

namespace treespark::kernels {

namespace serial {

Matrix multiply(const Matrix& a, const Matrix& b);

// y = A[off:, off:] x, with x and y indexed from 0 over the trailing block.
void symv(const Matrix& a, std::size_t off, std::span<const double> x, std::span<double> y);

// A[off:, off:] -= v w^T + w v^T
void syr2(Matrix& a, std::size_t off, std::span<const double> v, std::span<const double> w);

// Q[off:, off:] <- (I - beta v v^T) Q[off:, off:]
void apply_reflector(Matrix& q, std::size_t off, std::span<const double> v, double beta);

// Inverse of a symmetric positive definite matrix via Cholesky.
// Throws NotPsd when a pivot is not positive.
Matrix spd_inverse(const Matrix& a);

}  // namespace serial

namespace parallel {

Matrix multiply(const Matrix& a, const Matrix& b);
void symv(const Matrix& a, std::size_t off, std::span<const double> x, std::span<double> y);
void syr2(Matrix& a, std::size_t off, std::span<const double> v, std::span<const double> w);
void apply_reflector(Matrix& q, std::size_t off, std::span<const double> v, double beta);
Matrix spd_inverse(const Matrix& a);

}  // namespace parallel

// Thread budget for the parallel kernels and for trial fan-out.
int max_threads();
void set_threads(int n);

}  // namespace treespark::kernels
