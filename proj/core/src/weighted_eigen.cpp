#include "choqlab/weighted_eigen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "choqlab/linalg.hpp"
#include "choqlab/operators.hpp"

namespace choqlab {

WeightSpec admissibility_check(const GridFunction& alpha) {
  WeightSpec s{alpha, integrate(alpha),
               alpha.min_value() < 0.0 && alpha.max_value() > 0.0};
  return s;
}

namespace {

struct Pencil {
  FluxStiffness A;
  std::vector<double> Bdiag;  // alpha_i * w_i

  std::size_t size() const { return A.size(); }

  int negative_inertia(double lambda) const {
    if (A.tridiagonal) {
      std::vector<double> diag = A.diag;
      for (std::size_t i = 0; i < diag.size(); ++i) diag[i] -= lambda * Bdiag[i];
      return tridiag_negative_inertia(diag, A.off);
    }
    std::vector<double> M = A.dense;
    const std::size_t n = size();
    for (std::size_t i = 0; i < n; ++i) M[i * n + i] -= lambda * Bdiag[i];
    return dense_negative_inertia(std::move(M), n);
  }

  void shifted_apply(double sigma, const std::vector<double>& u,
                     std::vector<double>& out) const {
    A.apply(u, out);
    for (std::size_t i = 0; i < size(); ++i) out[i] -= sigma * Bdiag[i] * u[i];
  }

  bool shifted_solve_once(double sigma, const std::vector<double>& rhs,
                          std::vector<double>& x) const {
    const std::size_t n = size();
    if (A.tridiagonal) {
      std::vector<double> diag = A.diag;
      for (std::size_t i = 0; i < n; ++i) diag[i] -= sigma * Bdiag[i];
      return tridiag_solve(diag, A.off, A.off, rhs, x);
    }
    std::vector<double> M = A.dense;
    for (std::size_t i = 0; i < n; ++i) M[i * n + i] -= sigma * Bdiag[i];
    return dense_lu_solve(std::move(M), n, rhs, x);
  }

  // Solve with two rounds of iterative refinement: strongly graded meshes mix
  // row scales across many orders of magnitude, and a single backward-stable
  // solve leaves the smallest rows relatively inaccurate.
  bool shifted_solve(double sigma, const std::vector<double>& rhs,
                     std::vector<double>& x) const {
    if (!shifted_solve_once(sigma, rhs, x)) return false;
    const std::size_t n = size();
    std::vector<double> res(n), dx(n), Ax(n);
    for (int round = 0; round < 2; ++round) {
      shifted_apply(sigma, x, Ax);
      for (std::size_t i = 0; i < n; ++i) res[i] = rhs[i] - Ax[i];
      if (!shifted_solve_once(sigma, res, dx)) return true;
      for (std::size_t i = 0; i < n; ++i) x[i] += dx[i];
    }
    return true;
  }

  void apply_A(const std::vector<double>& u, std::vector<double>& out) const {
    A.apply(u, out);
  }
};

// k-th positive pencil eigenvalue by inertia bisection (count is monotone for
// lambda > 0 because A >= 0 forces every positive eigenvalue to cross down).
double kth_positive_eigenvalue(const Pencil& p, int k, double tol, double cap) {
  double hi = 1.0;
  while (p.negative_inertia(hi) < k) {
    hi *= 2.0;
    if (hi > cap) {
      throw std::runtime_error(
          "weighted_neumann_eigenvalue: spectral window exhausted");
    }
  }
  double lo = 0.0;
  while (hi - lo > tol * hi) {
    const double mid = 0.5 * (lo + hi);
    if (p.negative_inertia(mid) < k) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Inverse iteration at a shift just below the target eigenvalue, then a
// Rayleigh-quotient polish.
struct PencilPair {
  double lambda;
  std::vector<double> vec;
};

PencilPair eigenpair_near(const Pencil& p, double lambda_hat) {
  const std::size_t n = p.size();
  std::vector<double> x(n, 1.0), y, Bx(n);
  double sigma = lambda_hat * (1.0 - 1e-9);
  double lambda = lambda_hat;
  for (int it = 0; it < 60; ++it) {
    for (std::size_t i = 0; i < n; ++i) Bx[i] = p.Bdiag[i] * x[i];
    if (!p.shifted_solve(sigma, Bx, y)) {
      sigma *= (1.0 - 1e-10);
      continue;
    }
    double norm = 0.0;
    for (double v : y) norm += v * v;
    norm = std::sqrt(norm);
    for (std::size_t i = 0; i < n; ++i) x[i] = y[i] / norm;

    // Rayleigh quotient x'Ax / x'Bx
    std::vector<double> Ax;
    p.apply_A(x, Ax);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      num += x[i] * Ax[i];
      den += x[i] * p.Bdiag[i] * x[i];
    }
    if (den != 0.0) lambda = num / den;
    if (it >= 2) {
      // residual small enough to stop early
      double rn = 0.0, xn = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double r = Ax[i] - lambda * p.Bdiag[i] * x[i];
        rn += r * r;
        xn += x[i] * x[i];
      }
      if (rn <= 1e-28 * xn * lambda * lambda + 1e-280) break;
    }
  }
  return {lambda, std::move(x)};
}

bool one_signed(const std::vector<double>& v, double rel_tol = 1e-10) {
  double mx = 0.0;
  for (double x : v) mx = std::max(mx, std::fabs(x));
  double pos_max = 0.0, neg_max = 0.0;
  for (double x : v) {
    if (x > 0) pos_max = std::max(pos_max, x);
    if (x < 0) neg_max = std::max(neg_max, -x);
  }
  // one-signed when the minority side is rounding noise
  return std::min(pos_max, neg_max) <= rel_tol * mx;
}

}  // namespace

EigenResult weighted_neumann_eigenvalue(const WeightSpec& spec,
                                        const EigenOptions& options) {
  if (!spec.admissible()) {
    throw std::invalid_argument(
        "weighted_neumann_eigenvalue: weight must change sign with negative mean");
  }
  const GridDomain& d = spec.alpha.domain();
  Pencil p;
  p.A = build_flux_stiffness(d);
  p.Bdiag.resize(d.n_nodes());
  const auto& w = d.weights();
  for (std::size_t i = 0; i < d.n_nodes(); ++i) p.Bdiag[i] = spec.alpha[i] * w[i];

  const double lam1 = kth_positive_eigenvalue(p, 1, options.tol, options.lambda_cap);
  PencilPair pair = eigenpair_near(p, lam1);

  // orient positive
  double s = 0.0;
  for (double v : pair.vec) s += v;
  if (s < 0.0) {
    for (double& v : pair.vec) v = -v;
  }

  const double mx = *std::max_element(pair.vec.begin(), pair.vec.end());
  const double mn = *std::min_element(pair.vec.begin(), pair.vec.end());
  if (!(mx > 0.0) || mn <= 1e-12 * mx) {
    throw std::runtime_error(
        "weighted_neumann_eigenvalue: no positive eigenfunction at the first "
        "spectral crossing");
  }

  EigenResult res{pair.lambda, GridFunction(spec.alpha.domain_ptr(), pair.vec),
                  0.0, 0.0, {}, {}};

  // weighted residual of -Delta phi = lambda alpha phi
  std::vector<double> Ax;
  p.apply_A(pair.vec, Ax);
  double rn = 0.0, xn = 0.0;
  for (std::size_t i = 0; i < d.n_nodes(); ++i) {
    const double r = (Ax[i] - pair.lambda * p.Bdiag[i] * pair.vec[i]) / w[i];
    rn += w[i] * r * r;
    xn += w[i] * pair.vec[i] * pair.vec[i];
  }
  // scale: lambda |alpha| phi sets the natural size of each term
  double alpha_scale = std::max(std::fabs(spec.alpha.min_value()),
                                std::fabs(spec.alpha.max_value()));
  res.residual = std::sqrt(rn) /
                 (std::sqrt(xn) * std::max(1.0, pair.lambda * alpha_scale));
  if (res.residual > options.residual_tol) {
    throw std::runtime_error("weighted_neumann_eigenvalue: residual too large");
  }
  res.positivity_margin = mn / mx;

  res.window_values.push_back(pair.lambda);
  res.window_one_signed.push_back(true);
  for (int k = 2; k <= options.window; ++k) {
    double lam_k;
    try {
      lam_k = kth_positive_eigenvalue(p, k, options.tol, options.lambda_cap);
    } catch (const std::runtime_error&) {
      break;
    }
    PencilPair pk = eigenpair_near(p, lam_k);
    res.window_values.push_back(pk.lambda);
    res.window_one_signed.push_back(one_signed(pk.vec));
  }
  return res;
}

}  // namespace choqlab
