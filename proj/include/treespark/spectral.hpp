#pragma once

#include <cstddef>
#include <vector>

#include "treespark/matrix.hpp"

namespace treespark {

// Eigen-decomposition of a symmetric matrix: A = Q diag(eigenvalues) Q^T.
struct SpectralDecomposition {
  std::vector<double> eigenvalues;  // nondecreasing
  Matrix basis;                     // column j is the eigenvector of eigenvalues[j]
  double rank_tol = 0.0;            // relative zero threshold, scaled by lambda_max

  double lambda_max() const;
  // Absolute cutoff: rank_tol * max(|lambda|).
  double zero_cutoff() const;
};

// Default relative rank tolerance for an n x n matrix: n * 2.2e-16.
double default_rank_tol(std::size_t n);

// Householder tridiagonalization followed by implicit QL. Throws
// ContractViolation when A is not symmetric within 1e-12 relative.
SpectralDecomposition eig_sym(const Matrix& a);

// Eigenvalues only, nondecreasing. Same contract as eig_sym.
std::vector<double> eigvals_sym(const Matrix& a);

// Cyclic Jacobi rotations; the serial reference the fast path is tested
// against. Converges when the off-diagonal Frobenius mass is at most
// 1e-14 * ||A||_F.
SpectralDecomposition eig_sym_jacobi(const Matrix& a);

// Rebuild Q diag(f(lambda)) Q^T.
Matrix reconstruct(const SpectralDecomposition& dec);

// lambda^{-1/2} on the range, 0 below the rank cutoff. Throws NotPsd on a
// materially negative eigenvalue.
Matrix pinv_sqrt(const SpectralDecomposition& dec);
Matrix pinv(const SpectralDecomposition& dec);

// Spectral norm of a symmetric matrix.
double spectral_norm(const Matrix& a);

// (L^+)^{1/2} for the Laplacian of a connected graph. The all-ones null
// direction is removed exactly by shifting it into the range before the
// decomposition, so no eigenvalue threshold is involved.
Matrix laplacian_pinv_sqrt(const Matrix& laplacian);

// L^+ for a connected-graph Laplacian via (L + J/n)^{-1} - J/n.
Matrix laplacian_pinv(const Matrix& laplacian);

struct PencilExtremes {
  double lambda_min_pos = 0.0;
  double lambda_max = 0.0;

  bool within(double eps) const { return lambda_min_pos >= 1.0 - eps && lambda_max <= 1.0 + eps; }
};

// The frame x -> (L_G^+)^{1/2} x (L_G^+)^{1/2}, in which L_G becomes the
// centering projection. Holds the conjugating matrix so many candidate
// Laplacians can be measured against one graph.
class NormalizedFrame {
 public:
  explicit NormalizedFrame(const Matrix& laplacian_g);

  std::size_t size() const { return root_.size(); }
  const Matrix& pinv_sqrt() const { return root_; }

  // (L_G^+)^{1/2} M (L_G^+)^{1/2}
  Matrix apply(const Matrix& m) const;

  // Extreme eigenvalues of the normalized L_H restricted to the complement of
  // the all-ones vector. Both L_G and L_H must annihilate 1.
  PencilExtremes extremes(const Matrix& laplacian_h) const;

 private:
  Matrix root_;
};

// Remove the all-ones direction from a symmetric matrix whose null space
// contains it: returns the (n-1) x (n-1) block in an orthonormal basis of 1^perp.
Matrix deflate_ones(const Matrix& a);

PencilExtremes normalized_pencil(const Matrix& laplacian_g, const Matrix& laplacian_h);

struct PsdOrderVerdict {
  bool holds = false;
  double witness_gap = 0.0;  // most negative eigenvalue of B - A off the shared null space
  double tol = 0.0;
};

inline constexpr double kDefaultPsdTol = 1e-9;

// Decides A <= B in the Loewner order. The tolerance is relative to
// max(||A||, ||B||, 1).
PsdOrderVerdict psd_leq(const Matrix& a, const Matrix& b, double tol = kDefaultPsdTol);

// (A - B)^2 <= 2A^2 + 2B^2 for symmetric A, B.
PsdOrderVerdict symmetric_triangle_verdict(const Matrix& a, const Matrix& b);
bool check_symmetric_triangle(const Matrix& a, const Matrix& b);

}  // namespace treespark
