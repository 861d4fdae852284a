#include "treespark/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "treespark/error.hpp"
#include "treespark/kernels.hpp"

namespace treespark {

namespace kp = kernels::parallel;

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

Matrix symmetrized_checked(const Matrix& a) {
  const double scale = std::max(a.max_abs(), std::numeric_limits<double>::min());
  if (a.max_asymmetry() > 1e-12 * scale) throw ContractViolation("eigensolver input is not symmetric");
  Matrix s(a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j) s(i, j) = 0.5 * (a(i, j) + a(j, i));
  return s;
}

struct Tridiagonal {
  std::vector<double> diag;
  std::vector<double> sub;  // sub[i] couples i and i+1; sub[n-1] = 0
  Matrix qt;                // Q^T, rows are the basis vectors; empty unless requested
};

// Householder reduction A = Q T Q^T.
Tridiagonal tridiagonalize(Matrix a, bool want_basis) {
  const std::size_t n = a.size();
  Tridiagonal t{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), Matrix{}};
  std::vector<std::vector<double>> reflectors;
  std::vector<double> betas;
  std::vector<double> p(n);
  std::vector<double> w(n);

  for (std::size_t k = 0; k + 2 < n; ++k) {
    const std::size_t off = k + 1;
    const std::size_t len = n - off;
    std::vector<double> v(len);
    double tail = 0.0;
    for (std::size_t i = 0; i < len; ++i) {
      v[i] = a(off + i, k);
      if (i > 0) tail += v[i] * v[i];
    }
    if (tail == 0.0) {
      t.sub[k] = v[0];
      if (want_basis) {
        reflectors.emplace_back();
        betas.push_back(0.0);
      }
      continue;
    }
    const double x0 = v[0];
    const double norm = std::sqrt(x0 * x0 + tail);
    const double alpha = x0 > 0.0 ? -norm : norm;
    v[0] = x0 - alpha;
    const double beta = 2.0 / (v[0] * v[0] + tail);

    std::span<double> ps(p.data(), len);
    kp::symv(a, off, v, ps);
    double pv = 0.0;
    for (std::size_t i = 0; i < len; ++i) {
      ps[i] *= beta;
      pv += ps[i] * v[i];
    }
    const double kcoef = 0.5 * beta * pv;
    std::span<double> ws(w.data(), len);
    for (std::size_t i = 0; i < len; ++i) ws[i] = ps[i] - kcoef * v[i];
    kp::syr2(a, off, v, ws);

    t.sub[k] = alpha;
    if (want_basis) {
      reflectors.push_back(std::move(v));
      betas.push_back(beta);
    }
  }
  if (n >= 2) t.sub[n - 2] = a(n - 1, n - 2);
  for (std::size_t i = 0; i < n; ++i) t.diag[i] = a(i, i);

  if (want_basis) {
    Matrix q = Matrix::identity(n);
    for (std::size_t r = reflectors.size(); r-- > 0;) {
      if (betas[r] == 0.0) continue;
      kp::apply_reflector(q, r + 1, reflectors[r], betas[r]);
    }
    t.qt = q.transposed();
  }
  return t;
}

// Implicit QL with Wilkinson-style shifts on a symmetric tridiagonal matrix.
// Rotations are applied to the rows of qt when it is non-empty.
void tridiagonal_ql(std::vector<double>& d, std::vector<double>& e, Matrix& qt) {
  const std::size_t n = d.size();
  const bool vectors = qt.size() == n && n > 0;
  for (std::size_t l = 0; l < n; ++l) {
    int iterations = 0;
    std::size_t m = l;
    do {
      for (m = l; m + 1 < n; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= kEps * dd) break;
      }
      if (m == l) break;
      if (++iterations > 60) throw ContractViolation("tridiagonal QL failed to converge");
      double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
      double r = std::hypot(g, 1.0);
      g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
      double s = 1.0;
      double c = 1.0;
      double p = 0.0;
      bool underflow = false;
      for (std::size_t i = m; i-- > l;) {
        double f = s * e[i];
        const double b = c * e[i];
        r = std::hypot(f, g);
        e[i + 1] = r;
        if (r == 0.0) {
          d[i + 1] -= p;
          e[m] = 0.0;
          underflow = true;
          break;
        }
        s = f / r;
        c = g / r;
        g = d[i + 1] - p;
        r = (d[i] - g) * s + 2.0 * c * b;
        p = s * r;
        d[i + 1] = g + p;
        g = c * r - b;
        if (vectors) {
          double* zi = qt.row(i).data();
          double* zj = qt.row(i + 1).data();
          for (std::size_t k = 0; k < n; ++k) {
            f = zj[k];
            zj[k] = s * zi[k] + c * f;
            zi[k] = c * zi[k] - s * f;
          }
        }
      }
      if (underflow) continue;
      d[l] -= p;
      e[l] = g;
      e[m] = 0.0;
    } while (m != l);
  }
}

SpectralDecomposition sorted_decomposition(std::vector<double> values, const Matrix& rows_are_vectors,
                                           bool rows) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return values[x] < values[y]; });
  SpectralDecomposition dec;
  dec.eigenvalues.resize(n);
  dec.basis = Matrix(n);
  dec.rank_tol = default_rank_tol(n);
  for (std::size_t j = 0; j < n; ++j) {
    dec.eigenvalues[j] = values[order[j]];
    for (std::size_t i = 0; i < n; ++i)
      dec.basis(i, j) = rows ? rows_are_vectors(order[j], i) : rows_are_vectors(i, order[j]);
  }
  return dec;
}

template <class F>
Matrix spectral_function(const SpectralDecomposition& dec, F f) {
  const std::size_t n = dec.eigenvalues.size();
  Matrix scaled(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) scaled(i, j) = dec.basis(i, j) * f(dec.eigenvalues[j]);
  return kp::multiply(scaled, dec.basis.transposed());
}

double trace(const Matrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a(i, i);
  return s;
}

}  // namespace

double default_rank_tol(std::size_t n) { return static_cast<double>(n) * 2.2e-16; }

double SpectralDecomposition::lambda_max() const { return eigenvalues.empty() ? 0.0 : eigenvalues.back(); }

double SpectralDecomposition::zero_cutoff() const {
  double m = 0.0;
  for (double x : eigenvalues) m = std::max(m, std::abs(x));
  return rank_tol * m;
}

SpectralDecomposition eig_sym(const Matrix& a) {
  Tridiagonal t = tridiagonalize(symmetrized_checked(a), true);
  tridiagonal_ql(t.diag, t.sub, t.qt);
  return sorted_decomposition(std::move(t.diag), t.qt, true);
}

std::vector<double> eigvals_sym(const Matrix& a) {
  Tridiagonal t = tridiagonalize(symmetrized_checked(a), false);
  Matrix none;
  tridiagonal_ql(t.diag, t.sub, none);
  std::sort(t.diag.begin(), t.diag.end());
  return t.diag;
}

SpectralDecomposition eig_sym_jacobi(const Matrix& input) {
  Matrix a = symmetrized_checked(input);
  const std::size_t n = a.size();
  Matrix v = Matrix::identity(n);
  const double target = 1e-14 * a.frobenius_norm();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) off += a(i, j) * a(i, j);
    if (std::sqrt(off) <= target) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        double t = 0.0;
        if (std::abs(theta) > 1e150) {
          t = 0.5 / theta;
        } else {
          t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        }
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) values[i] = a(i, i);
  return sorted_decomposition(std::move(values), v, false);
}

Matrix reconstruct(const SpectralDecomposition& dec) {
  return spectral_function(dec, [](double x) { return x; });
}

Matrix pinv_sqrt(const SpectralDecomposition& dec) {
  const double cutoff = dec.zero_cutoff();
  if (!dec.eigenvalues.empty() && dec.eigenvalues.front() < -cutoff)
    throw NotPsd("pinv_sqrt: matrix has a materially negative eigenvalue");
  return spectral_function(dec, [cutoff](double x) { return x > cutoff ? 1.0 / std::sqrt(x) : 0.0; });
}

Matrix pinv(const SpectralDecomposition& dec) {
  const double cutoff = dec.zero_cutoff();
  return spectral_function(dec, [cutoff](double x) { return std::abs(x) > cutoff ? 1.0 / x : 0.0; });
}

double spectral_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  const auto ev = eigvals_sym(a);
  return std::max(std::abs(ev.front()), std::abs(ev.back()));
}

namespace {

// L + s * 11^T / n, with s the mean nonzero eigenvalue of L.
std::pair<Matrix, double> shift_ones(const Matrix& l) {
  const std::size_t n = l.size();
  if (n < 2) throw InvalidParameter("Laplacian must be at least 2 x 2");
  const double s = trace(l) / static_cast<double>(n - 1);
  if (!(s > 0.0)) throw NotPsd("Laplacian has no positive spectrum");
  Matrix a = l;
  const double add = s / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) += add;
  return {std::move(a), s};
}

}  // namespace

Matrix laplacian_pinv_sqrt(const Matrix& laplacian) {
  auto [shifted, s] = shift_ones(laplacian);
  const auto dec = eig_sym(shifted);
  if (!(dec.eigenvalues.front() > dec.zero_cutoff()))
    throw NotPsd("laplacian_pinv_sqrt: Laplacian is singular beyond the all-ones direction");
  Matrix root = spectral_function(dec, [](double x) { return 1.0 / std::sqrt(x); });
  const double sub = 1.0 / (std::sqrt(s) * static_cast<double>(root.size()));
  for (std::size_t i = 0; i < root.size(); ++i)
    for (std::size_t j = 0; j < root.size(); ++j) root(i, j) -= sub;
  return root;
}

Matrix laplacian_pinv(const Matrix& laplacian) {
  auto [shifted, s] = shift_ones(laplacian);
  Matrix inv = kp::spd_inverse(shifted);
  const double sub = 1.0 / (s * static_cast<double>(inv.size()));
  for (std::size_t i = 0; i < inv.size(); ++i)
    for (std::size_t j = 0; j < inv.size(); ++j) inv(i, j) -= sub;
  return inv;
}

Matrix deflate_ones(const Matrix& a) {
  const std::size_t n = a.size();
  if (n < 2) return Matrix(0);
  const double inv_root = 1.0 / std::sqrt(static_cast<double>(n));
  std::vector<double> u(n, inv_root);
  u[0] -= 1.0;
  double utu = 0.0;
  for (double x : u) utu += x * x;
  const double beta = 2.0 / utu;
  std::vector<double> p(n);
  kp::symv(a, 0, u, p);
  double pu = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    p[i] *= beta;
    pu += p[i] * u[i];
  }
  const double kcoef = 0.5 * beta * pu;
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = p[i] - kcoef * u[i];
  Matrix out(n - 1);
  for (std::size_t i = 1; i < n; ++i)
    for (std::size_t j = 1; j < n; ++j) out(i - 1, j - 1) = a(i, j) - u[i] * w[j] - w[i] * u[j];
  return out;
}

NormalizedFrame::NormalizedFrame(const Matrix& laplacian_g) : root_(laplacian_pinv_sqrt(laplacian_g)) {}

Matrix NormalizedFrame::apply(const Matrix& m) const {
  Matrix out = kp::multiply(kp::multiply(root_, m), root_);
  // R M R is symmetric for symmetric M; remove the rounding skew.
  for (std::size_t i = 0; i < out.size(); ++i)
    for (std::size_t j = i + 1; j < out.size(); ++j) out(i, j) = out(j, i) = 0.5 * (out(i, j) + out(j, i));
  return out;
}

PencilExtremes NormalizedFrame::extremes(const Matrix& laplacian_h) const {
  if (laplacian_h.size() != root_.size()) throw InvalidParameter("normalized_pencil: dimension mismatch");
  const auto ev = eigvals_sym(deflate_ones(apply(laplacian_h)));
  PencilExtremes out{ev.front(), ev.back()};
  const double cutoff = default_rank_tol(root_.size()) * std::max(std::abs(out.lambda_max), 1.0);
  if (out.lambda_min_pos < cutoff) out.lambda_min_pos = 0.0;
  return out;
}

PencilExtremes normalized_pencil(const Matrix& laplacian_g, const Matrix& laplacian_h) {
  return NormalizedFrame(laplacian_g).extremes(laplacian_h);
}

PsdOrderVerdict psd_leq(const Matrix& a, const Matrix& b, double tol) {
  const std::size_t n = a.size();
  if (b.size() != n) throw InvalidParameter("psd_leq: dimension mismatch");
  PsdOrderVerdict verdict;
  verdict.tol = tol;
  if (n == 0) {
    verdict.holds = true;
    return verdict;
  }
  const auto dec_a = eig_sym(a);
  const double norm_a = std::max(std::abs(dec_a.eigenvalues.front()), std::abs(dec_a.eigenvalues.back()));
  const double norm_b = spectral_norm(b);
  const double scale = std::max({norm_a, norm_b, 1.0});
  const double null_cut_a = 16.0 * default_rank_tol(n) * norm_a;
  const double null_cut_b = 16.0 * default_rank_tol(n) * norm_b;

  // Shared null space: null vectors of B inside the null space of A.
  std::vector<std::vector<double>> null_a;
  for (std::size_t j = 0; j < n; ++j)
    if (std::abs(dec_a.eigenvalues[j]) <= null_cut_a) {
      std::vector<double> col(n);
      for (std::size_t i = 0; i < n; ++i) col[i] = dec_a.basis(i, j);
      null_a.push_back(std::move(col));
    }
  std::vector<std::vector<double>> shared;
  if (!null_a.empty()) {
    const std::size_t r = null_a.size();
    Matrix br(r);
    std::vector<double> tmp(n);
    for (std::size_t q = 0; q < r; ++q) {
      kp::symv(b, 0, null_a[q], tmp);
      for (std::size_t p = 0; p < r; ++p) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += null_a[p][i] * tmp[i];
        br(p, q) = s;
      }
    }
    const auto dec_b = eig_sym(br);
    for (std::size_t j = 0; j < r; ++j)
      if (std::abs(dec_b.eigenvalues[j]) <= null_cut_b) {
        std::vector<double> col(n, 0.0);
        for (std::size_t q = 0; q < r; ++q)
          for (std::size_t i = 0; i < n; ++i) col[i] += null_a[q][i] * dec_b.basis(q, j);
        shared.push_back(std::move(col));
      }
  }

  if (shared.size() == n) {
    verdict.witness_gap = 0.0;
    verdict.holds = true;
    return verdict;
  }

  Matrix diff = b - a;
  if (!shared.empty()) {
    // P (B - A) P + c N N^T: the shared null directions are lifted to c,
    // above the rest of the spectrum, so the minimum is taken off them.
    Matrix proj = Matrix::identity(n);
    for (const auto& col : shared)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) proj(i, j) -= col[i] * col[j];
    diff = kp::multiply(kp::multiply(proj, diff), proj);
    const double lift = 2.0 * (norm_a + norm_b) + 1.0;
    for (const auto& col : shared)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) diff(i, j) += lift * col[i] * col[j];
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        const double m = 0.5 * (diff(i, j) + diff(j, i));
        diff(i, j) = m;
        diff(j, i) = m;
      }
  }
  verdict.witness_gap = eigvals_sym(diff).front();
  verdict.holds = verdict.witness_gap >= -tol * scale;
  return verdict;
}

PsdOrderVerdict symmetric_triangle_verdict(const Matrix& a, const Matrix& b) {
  const Matrix d = a - b;
  const Matrix lhs = kp::multiply(d, d);
  Matrix rhs = kp::multiply(a, a) + kp::multiply(b, b);
  rhs *= 2.0;
  return psd_leq(lhs, rhs);
}

bool check_symmetric_triangle(const Matrix& a, const Matrix& b) { return symmetric_triangle_verdict(a, b).holds; }

}  // namespace treespark
