#include "choqlab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace choqlab {

EigenDecomposition jacobi_eigen(const std::vector<double>& A_in, std::size_t n,
                                double tol) {
  if (A_in.size() != n * n) throw std::invalid_argument("jacobi_eigen: bad size");
  std::vector<double> a = A_in;
  std::vector<double> v(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;

  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::fabs(a[i * n + i]));
  for (double x : a) scale = std::max(scale, std::fabs(x));
  if (scale == 0.0) scale = 1.0;

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off_norm = 0.0;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) off_norm += a[p * n + q] * a[p * n + q];
    }
    if (std::sqrt(off_norm) <= tol * scale * n) break;

    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a[p * n + q];
        if (std::fabs(apq) <= 1e-300) continue;
        const double app = a[p * n + p];
        const double aqq = a[q * n + q];
        const double theta = 0.5 * (aqq - app) / apq;
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k * n + p];
          const double akq = a[k * n + q];
          a[k * n + p] = c * akp - s * akq;
          a[k * n + q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p * n + k];
          const double aqk = a[q * n + k];
          a[p * n + k] = c * apk - s * aqk;
          a[q * n + k] = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v[p * n + k];
          const double vkq = v[q * n + k];
          v[p * n + k] = c * vkp - s * vkq;
          v[q * n + k] = s * vkp + c * vkq;
        }
      }
    }
  }

  EigenDecomposition out;
  out.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.values[i] = a[i * n + i];
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return out.values[i] < out.values[j]; });
  std::vector<double> vals(n), vecs(n * n);
  for (std::size_t k = 0; k < n; ++k) {
    vals[k] = out.values[order[k]];
    for (std::size_t j = 0; j < n; ++j) vecs[k * n + j] = v[order[k] * n + j];
  }
  out.values = std::move(vals);
  out.vectors = std::move(vecs);
  return out;
}

int tridiag_negative_inertia(const std::vector<double>& diag,
                             const std::vector<double>& off) {
  const std::size_t n = diag.size();
  double scale = 0.0;
  for (double x : diag) scale = std::max(scale, std::fabs(x));
  for (double x : off) scale = std::max(scale, std::fabs(x));
  const double tiny = std::max(scale, 1.0) * 1e-300;

  int neg = 0;
  double d = diag[0];
  if (std::fabs(d) < tiny) d = tiny;
  if (d < 0.0) ++neg;
  for (std::size_t i = 1; i < n; ++i) {
    d = diag[i] - off[i - 1] * off[i - 1] / d;
    if (std::fabs(d) < tiny) d = tiny;
    if (d < 0.0) ++neg;
  }
  return neg;
}

bool tridiag_solve(std::vector<double> diag, std::vector<double> lower,
                   std::vector<double> upper, std::vector<double> b,
                   std::vector<double>& x) {
  const std::size_t n = diag.size();
  // Banded Gaussian elimination with partial pivoting: row i may swap with
  // i+1, creating a second superdiagonal.
  std::vector<double> super2(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (std::fabs(lower[i]) > std::fabs(diag[i])) {
      std::swap(diag[i], lower[i]);
      const double u2 = (i + 2 < n) ? upper[i + 1] : 0.0;
      const double tmp_up = upper[i];
      upper[i] = diag[i + 1];
      diag[i + 1] = tmp_up;
      super2[i] = u2;
      if (i + 2 < n) upper[i + 1] = 0.0;
      std::swap(b[i], b[i + 1]);
    }
    if (diag[i] == 0.0) return false;
    const double m = lower[i] / diag[i];
    diag[i + 1] -= m * upper[i];
    if (i + 2 < n) upper[i + 1] -= m * super2[i];
    b[i + 1] -= m * b[i];
    lower[i] = 0.0;
  }
  if (diag[n - 1] == 0.0) return false;

  x.assign(n, 0.0);
  for (std::size_t ii = n; ii-- > 0;) {
    double s = b[ii];
    if (ii + 1 < n) s -= upper[ii] * x[ii + 1];
    if (ii + 2 < n) s -= super2[ii] * x[ii + 2];
    x[ii] = s / diag[ii];
  }
  return true;
}

double SymBand::at(std::size_t i, std::size_t j) const {
  if (i > j) std::swap(i, j);
  const std::size_t k = j - i;
  if (k > static_cast<std::size_t>(bw)) return 0.0;
  return data[i * (bw + 1) + k];
}

void SymBand::add(std::size_t i, std::size_t j, double v) {
  if (i > j) std::swap(i, j);
  const std::size_t k = j - i;
  if (k > static_cast<std::size_t>(bw)) throw std::invalid_argument("SymBand::add: outside band");
  data[i * (bw + 1) + k] += v;
}

int band_negative_inertia(const SymBand& M, double shift) {
  const std::size_t n = M.n;
  const int bw = M.bw;
  // Working copy of the band of (M - shift I), lower-triangular LDL^T in place.
  std::vector<double> a(M.data);
  for (std::size_t i = 0; i < n; ++i) a[i * (bw + 1)] -= shift;

  double scale = 0.0;
  for (double x : a) scale = std::max(scale, std::fabs(x));
  const double tiny = std::max(scale, 1.0) * 1e-300;

  int neg = 0;
  std::vector<double> col(bw + 1);
  for (std::size_t j = 0; j < n; ++j) {
    double d = a[j * (bw + 1)];
    if (std::fabs(d) < tiny) d = tiny;
    if (d < 0.0) ++neg;
    const std::size_t jmax = std::min(n - 1, j + bw);
    for (std::size_t i = j + 1; i <= jmax; ++i) col[i - j] = a[j * (bw + 1) + (i - j)] / d;
    for (std::size_t i = j + 1; i <= jmax; ++i) {
      for (std::size_t k = i; k <= jmax; ++k) {
        a[i * (bw + 1) + (k - i)] -= col[i - j] * d * col[k - j];
      }
    }
    a[j * (bw + 1)] = d;
  }
  return neg;
}

int dense_negative_inertia(std::vector<double> A, std::size_t n) {
  double scale = 0.0;
  for (double x : A) scale = std::max(scale, std::fabs(x));
  const double tiny = std::max(scale, 1.0) * 1e-300;

  int neg = 0;
  for (std::size_t k = 0; k < n; ++k) {
    double d = A[k * n + k];
    if (std::fabs(d) < tiny) d = tiny;
    if (d < 0.0) ++neg;
    for (std::size_t i = k + 1; i < n; ++i) {
      const double m = A[i * n + k] / d;
      if (m == 0.0) continue;
      for (std::size_t j = k + 1; j < n; ++j) {
        A[i * n + j] -= m * A[k * n + j];
      }
    }
  }
  return neg;
}

bool dense_lu_solve(std::vector<double> A, std::size_t n, std::vector<double> b,
                    std::vector<double>& x) {
  std::vector<std::size_t> piv(n);
  for (std::size_t i = 0; i < n; ++i) piv[i] = i;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    double best = std::fabs(A[k * n + k]);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double v = std::fabs(A[i * n + k]);
      if (v > best) {
        best = v;
        p = i;
      }
    }
    if (best == 0.0) return false;
    if (p != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(A[k * n + j], A[p * n + j]);
      std::swap(b[k], b[p]);
    }
    const double d = A[k * n + k];
    for (std::size_t i = k + 1; i < n; ++i) {
      const double m = A[i * n + k] / d;
      if (m == 0.0) continue;
      A[i * n + k] = 0.0;
      for (std::size_t j = k + 1; j < n; ++j) A[i * n + j] -= m * A[k * n + j];
      b[i] -= m * b[k];
    }
  }
  x.assign(n, 0.0);
  for (std::size_t ii = n; ii-- > 0;) {
    double s = b[ii];
    for (std::size_t j = ii + 1; j < n; ++j) s -= A[ii * n + j] * x[j];
    x[ii] = s / A[ii * n + ii];
  }
  return true;
}

bool band_ldlt_factor(const SymBand& M, BandFactor& out) {
  // right-looking band LDL^T; after the sweep data[j][0] = d_j and
  // data[j][k] = L(j+k, j)
  const std::size_t n = M.n;
  const int bw = M.bw;
  out.n = n;
  out.bw = bw;
  out.data = M.data;
  auto at = [&](std::size_t i, std::size_t k) -> double& {
    return out.data[i * (bw + 1) + k];
  };
  for (std::size_t j = 0; j < n; ++j) {
    const double d = at(j, 0);
    if (!(d > 0.0)) return false;
    for (int k = 1; k <= bw && j + k < n; ++k) at(j, k) /= d;
    for (int a = 1; a <= bw && j + a < n; ++a) {
      for (int b = a; b <= bw && j + b < n; ++b) {
        at(j + a, b - a) -= at(j, a) * d * at(j, b);
      }
    }
  }
  return true;
}

void band_ldlt_solve(const BandFactor& F, std::vector<double> rhs,
                     std::vector<double>& x) {
  const std::size_t n = F.n;
  const int bw = F.bw;
  auto L = [&](std::size_t i, std::size_t j) {
    return F.data[j * (bw + 1) + (i - j)];  // L(i,j) for i > j
  };
  for (std::size_t i = 0; i < n; ++i) {
    double s = rhs[i];
    const std::size_t jmin = i >= static_cast<std::size_t>(bw) ? i - bw : 0;
    for (std::size_t j = jmin; j < i; ++j) s -= L(i, j) * rhs[j];
    rhs[i] = s;
  }
  for (std::size_t i = 0; i < n; ++i) rhs[i] /= F.data[i * (bw + 1)];
  x = std::move(rhs);
  for (std::size_t ii = n; ii-- > 0;) {
    double s = x[ii];
    const std::size_t jmax = std::min(n - 1, ii + bw);
    for (std::size_t j = ii + 1; j <= jmax; ++j) s -= L(j, ii) * x[j];
    x[ii] = s;
  }
}

double band_smallest_eigenvalue(const SymBand& M, double lo, double hi, double tol) {
  // establish a bracket [lo, hi] with inertia(lo) == 0 < inertia(hi)
  while (band_negative_inertia(M, lo) > 0) {
    const double span = hi - lo;
    lo -= span;
  }
  while (band_negative_inertia(M, hi) == 0) {
    const double span = hi - lo;
    hi += span;
  }
  while (hi - lo > tol * std::max(1.0, std::fabs(lo) + std::fabs(hi))) {
    const double mid = 0.5 * (lo + hi);
    if (band_negative_inertia(M, mid) == 0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace choqlab
