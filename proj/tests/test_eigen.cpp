#include <doctest.h>

#include <cmath>
#include <memory>

#include "choqlab/linalg.hpp"
#include "choqlab/operators.hpp"
#include "choqlab/quotient.hpp"
#include "choqlab/weighted_eigen.hpp"

using namespace choqlab;

namespace {

std::shared_ptr<const GridDomain> interval(int res) {
  return std::make_shared<GridDomain>(
      make_domain(DomainKind::box, 1, {0.0}, {1.0}, {res}));
}

// piecewise weight: a on (0, 1/2), -b on (1/2, 1)
GridFunction step_alpha(std::shared_ptr<const GridDomain> d, double a, double b) {
  return GridFunction::sample(d, [&](const std::vector<double>& x) {
    return x[0] < 0.5 ? a : -b;
  });
}

// Dense oracle: assemble the pencil (A, B) and enumerate the first positive
// eigenvalues by inertia bisection with a full Jacobi eigensolver per probe,
// entirely independent of the production tridiagonal path.
double dense_first_positive_eigenvalue(const GridFunction& alpha) {
  const GridDomain& d = alpha.domain();
  const std::size_t n = d.n_nodes();
  const FluxStiffness A = build_flux_stiffness(d);
  std::vector<double> Adense(n * n, 0.0);
  if (A.tridiagonal) {
    for (std::size_t i = 0; i < n; ++i) {
      Adense[i * n + i] = A.diag[i];
      if (i + 1 < n) {
        Adense[i * n + i + 1] = A.off[i];
        Adense[(i + 1) * n + i] = A.off[i];
      }
    }
  } else {
    Adense = A.dense;
  }
  std::vector<double> Bdiag(n);
  for (std::size_t i = 0; i < n; ++i) Bdiag[i] = alpha[i] * d.weight(i);

  auto negatives = [&](double lam) {
    std::vector<double> M = Adense;
    for (std::size_t i = 0; i < n; ++i) M[i * n + i] -= lam * Bdiag[i];
    const EigenDecomposition e = jacobi_eigen(M, n);
    int neg = 0;
    for (double v : e.values) {
      if (v < 0.0) ++neg;
    }
    return neg;
  };

  double hi = 1.0;
  while (negatives(hi) < 1) hi *= 2.0;
  double lo = 0.0;
  for (int it = 0; it < 120 && (hi - lo) > 1e-14 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (negatives(mid) < 1 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("admissibility flags") {
  auto d = interval(50);

  const WeightSpec all_neg = admissibility_check(GridFunction(d, -1.0));
  CHECK_FALSE(all_neg.sign_change);
  CHECK(all_neg.mean < 0.0);
  CHECK_FALSE(all_neg.admissible());

  const WeightSpec ok = admissibility_check(GridFunction::sample(
      d, [](const std::vector<double>& x) { return x[0] - 0.6; }));
  CHECK(ok.sign_change);
  CHECK(ok.mean == doctest::Approx(-0.1).epsilon(1e-12));
  CHECK(ok.admissible());

  // zero-mean boundary case is excluded (exact cancellation: +-1 weight on a
  // power-of-two grid)
  auto d64 = interval(64);
  const WeightSpec zero_mean = admissibility_check(GridFunction::sample(
      d64, [](const std::vector<double>& x) { return x[0] < 0.5 ? 1.0 : -1.0; }));
  CHECK(zero_mean.sign_change);
  CHECK(zero_mean.mean == 0.0);
  CHECK_FALSE(zero_mean.admissible());

  CHECK_THROWS(weighted_neumann_eigenvalue(all_neg));
}

TEST_CASE("eigenvalue matches the dense oracle on a 200-node grid") {
  auto d = interval(200);
  const GridFunction alpha = step_alpha(d, 1.0, 2.0);
  const WeightSpec spec = admissibility_check(alpha);
  REQUIRE(spec.admissible());

  const EigenResult r = weighted_neumann_eigenvalue(spec);
  const double oracle = dense_first_positive_eigenvalue(alpha);
  CHECK(r.lambda_alpha == doctest::Approx(oracle).epsilon(1e-10));
  CHECK(r.lambda_alpha > 0.0);
  CHECK(r.positivity_margin > 1e-12);
  CHECK(r.residual <= 1e-8);
}

TEST_CASE("homogeneity lambda(c alpha) = lambda(alpha)/c") {
  auto d = interval(160);
  const GridFunction alpha = step_alpha(d, 1.0, 1.7);
  const EigenResult r1 = weighted_neumann_eigenvalue(admissibility_check(alpha));
  const EigenResult r2 =
      weighted_neumann_eigenvalue(admissibility_check(alpha.scaled(2.0)));
  CHECK(r2.lambda_alpha == doctest::Approx(0.5 * r1.lambda_alpha).epsilon(1e-10));
}

TEST_CASE("mirror image of the weight leaves lambda unchanged") {
  auto d = interval(160);
  const GridFunction alpha = GridFunction::sample(
      d, [](const std::vector<double>& x) { return 0.8 - x[0] - 0.45; });
  const GridFunction mirrored = GridFunction::sample(
      d, [](const std::vector<double>& x) { return 0.8 - (1.0 - x[0]) - 0.45; });
  const EigenResult r1 = weighted_neumann_eigenvalue(admissibility_check(alpha));
  const EigenResult r2 = weighted_neumann_eigenvalue(admissibility_check(mirrored));
  CHECK(r1.lambda_alpha == doctest::Approx(r2.lambda_alpha).epsilon(1e-10));
}

TEST_CASE("grid refinement: second-order eigenvalue convergence") {
  // smooth sign-changing weight with negative mean
  auto lam_at = [&](int res) {
    auto d = interval(res);
    const GridFunction alpha = GridFunction::sample(
        d, [](const std::vector<double>& x) {
          return std::cos(M_PI * x[0]) - 0.3;
        });
    return weighted_neumann_eigenvalue(admissibility_check(alpha)).lambda_alpha;
  };
  const double l1 = lam_at(50);
  const double l2 = lam_at(100);
  const double l3 = lam_at(200);
  const double ratio = (l1 - l2) / (l2 - l3);
  CHECK(ratio >= 3.5);
  CHECK(ratio <= 4.5);
}

TEST_CASE("only the principal eigenfunction is one-signed in the window") {
  auto d = interval(200);
  const GridFunction alpha = step_alpha(d, 1.0, 2.0);
  EigenOptions opts;
  opts.window = 4;
  const EigenResult r = weighted_neumann_eigenvalue(admissibility_check(alpha), opts);
  REQUIRE(r.window_values.size() >= 2);
  CHECK(r.window_one_signed[0]);
  for (std::size_t k = 1; k < r.window_values.size(); ++k) {
    CHECK(r.window_values[k] > r.window_values[k - 1]);
    CHECK_FALSE(r.window_one_signed[k]);
  }
}

TEST_CASE("2-d weight: eigenvalue and positivity") {
  auto d = std::make_shared<GridDomain>(
      make_domain(DomainKind::box, 2, {0.0, 0.0}, {1.0, 1.0}, {18, 18}));
  const GridFunction alpha = GridFunction::sample(
      d, [](const std::vector<double>& x) { return x[0] + 0.3 * x[1] - 0.75; });
  const WeightSpec spec = admissibility_check(alpha);
  REQUIRE(spec.admissible());
  const EigenResult r = weighted_neumann_eigenvalue(spec);
  CHECK(r.lambda_alpha > 0.0);
  CHECK(r.positivity_margin > 1e-12);
  CHECK(r.lambda_alpha == doctest::Approx(dense_first_positive_eigenvalue(alpha))
                              .epsilon(1e-9));
}

TEST_CASE("certificate holds below lambda(alpha) and fails above") {
  auto d = interval(120);
  const GridFunction alpha = step_alpha(d, 1.0, 2.0);
  const EigenResult r = weighted_neumann_eigenvalue(admissibility_check(alpha));

  NormCoefficients below = NormCoefficients::lambda_alpha(0.95 * r.lambda_alpha, alpha);
  NormCoefficients above = NormCoefficients::lambda_alpha(1.05 * r.lambda_alpha, alpha);
  CHECK(equivalence_certificate(*d, below));
  CHECK_FALSE(equivalence_certificate(*d, above));
}
