#include <doctest.h>

#include <cmath>
#include <vector>

#include "choqlab/linalg.hpp"
#include "choqlab/rng.hpp"

using namespace choqlab;

namespace {

// random symmetric band matrix made diagonally dominant (hence SPD)
SymBand random_spd_band(std::size_t n, int bw, std::uint64_t seed) {
  SymBand M;
  M.n = n;
  M.bw = bw;
  M.data.assign(n * (bw + 1), 0.0);
  SplitMix64 rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    for (int k = 1; k <= bw; ++k) {
      if (i + k < n) M.data[i * (bw + 1) + k] = rng.uniform01() - 0.5;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (int k = 1; k <= bw; ++k) {
      if (i + k < n) row += std::fabs(M.data[i * (bw + 1) + k]);
      if (i >= static_cast<std::size_t>(k)) row += std::fabs(M.data[(i - k) * (bw + 1) + k]);
    }
    M.data[i * (bw + 1)] = row + 0.5 + rng.uniform01();
  }
  return M;
}

std::vector<double> band_to_dense(const SymBand& M) {
  std::vector<double> A(M.n * M.n, 0.0);
  for (std::size_t i = 0; i < M.n; ++i) {
    for (std::size_t j = 0; j < M.n; ++j) A[i * M.n + j] = M.at(i, j);
  }
  return A;
}

}  // namespace

TEST_CASE("jacobi eigensolver on a known matrix") {
  // eigenvalues of [[2,-1,0],[-1,2,-1],[0,-1,2]] are 2 - sqrt(2), 2, 2 + sqrt(2)
  const std::vector<double> A = {2, -1, 0, -1, 2, -1, 0, -1, 2};
  const EigenDecomposition e = jacobi_eigen(A, 3);
  CHECK(e.values[0] == doctest::Approx(2.0 - std::sqrt(2.0)).epsilon(1e-12));
  CHECK(e.values[1] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(e.values[2] == doctest::Approx(2.0 + std::sqrt(2.0)).epsilon(1e-12));

  // residual of each eigenpair
  for (int k = 0; k < 3; ++k) {
    for (int i = 0; i < 3; ++i) {
      double av = 0.0;
      for (int j = 0; j < 3; ++j) av += A[i * 3 + j] * e.vectors[k * 3 + j];
      CHECK(av == doctest::Approx(e.values[k] * e.vectors[k * 3 + i]).epsilon(1e-10));
    }
  }
}

TEST_CASE("tridiagonal inertia counts eigenvalues below zero") {
  // shifted 1-d Laplacian: eigenvalues 2 - 2 cos(k pi / (n+1))
  const std::size_t n = 12;
  std::vector<double> off(n - 1, -1.0);
  for (double shift : {0.1, 0.5, 1.3, 3.0}) {
    std::vector<double> diag(n, 2.0 - shift);
    int expected = 0;
    for (std::size_t k = 1; k <= n; ++k) {
      if (2.0 - 2.0 * std::cos(k * M_PI / (n + 1.0)) < shift) ++expected;
    }
    CHECK(tridiag_negative_inertia(diag, off) == expected);
  }
}

TEST_CASE("tridiagonal solve with pivoting") {
  const std::size_t n = 40;
  SplitMix64 rng(5);
  std::vector<double> diag(n), lower(n - 1), upper(n - 1), xref(n);
  for (auto& v : diag) v = rng.uniform01() - 0.5;  // indefinite
  for (auto& v : lower) v = rng.uniform01();
  for (auto& v : upper) v = rng.uniform01();
  for (auto& v : xref) v = rng.uniform01() * 2.0 - 1.0;
  std::vector<double> b(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    b[i] = diag[i] * xref[i];
    if (i > 0) b[i] += lower[i - 1] * xref[i - 1];
    if (i + 1 < n) b[i] += upper[i] * xref[i + 1];
  }
  std::vector<double> x;
  REQUIRE(tridiag_solve(diag, lower, upper, b, x));
  for (std::size_t i = 0; i < n; ++i) {
    CHECK(x[i] == doctest::Approx(xref[i]).epsilon(1e-9));
  }
}

TEST_CASE("band LDLT solve matches dense LU") {
  const SymBand M = random_spd_band(30, 2, 9);
  SplitMix64 rng(11);
  std::vector<double> b(30);
  for (auto& v : b) v = rng.uniform01() - 0.3;

  BandFactor F;
  REQUIRE(band_ldlt_factor(M, F));
  std::vector<double> x_band;
  band_ldlt_solve(F, b, x_band);

  std::vector<double> x_dense;
  REQUIRE(dense_lu_solve(band_to_dense(M), 30, b, x_dense));
  for (std::size_t i = 0; i < 30; ++i) {
    CHECK(x_band[i] == doctest::Approx(x_dense[i]).epsilon(1e-11));
  }

  // indefinite matrix is rejected
  SymBand bad = M;
  bad.data[5 * 3] = -10.0;
  BandFactor F2;
  CHECK_FALSE(band_ldlt_factor(bad, F2));
}

TEST_CASE("band smallest eigenvalue agrees with jacobi") {
  const SymBand M = random_spd_band(24, 2, 21);
  const double lam = band_smallest_eigenvalue(M, -1.0, 10.0, 1e-12);
  const EigenDecomposition e = jacobi_eigen(band_to_dense(M), 24);
  CHECK(lam == doctest::Approx(e.values[0]).epsilon(1e-9));
}

TEST_CASE("dense negative inertia") {
  const SymBand M = random_spd_band(16, 2, 33);
  std::vector<double> A = band_to_dense(M);
  CHECK(dense_negative_inertia(A, 16) == 0);
  const EigenDecomposition e = jacobi_eigen(A, 16);
  // shift past the third eigenvalue
  const double shift = 0.5 * (e.values[2] + e.values[3]);
  for (std::size_t i = 0; i < 16; ++i) A[i * 16 + i] -= shift;
  CHECK(dense_negative_inertia(A, 16) == 3);
}
