#pragma once

#include <cstddef>
#include <vector>

namespace choqlab {

// Dense symmetric eigensolver (cyclic Jacobi). A is row-major n*n and is not
// modified. Eigenvalues ascend; eigenvectors[k*n..] is the k-th eigenvector.
struct EigenDecomposition {
  std::vector<double> values;
  std::vector<double> vectors;  // row-major, one eigenvector per row
};
EigenDecomposition jacobi_eigen(const std::vector<double>& A, std::size_t n,
                                double tol = 1e-13);

// Number of negative pivots of the LDL^T factorization of the symmetric
// tridiagonal matrix (diag, off). Zero pivots are nudged; the count equals the
// number of eigenvalues below zero (Sylvester).
int tridiag_negative_inertia(const std::vector<double>& diag,
                             const std::vector<double>& off);

// Solves T x = b for tridiagonal T with partial pivoting (T may be indefinite
// and near-singular). Returns false on exact breakdown.
bool tridiag_solve(std::vector<double> diag, std::vector<double> lower,
                   std::vector<double> upper, std::vector<double> b,
                   std::vector<double>& x);

// Symmetric band matrix: entry(i, i+k) = data[i*(bw+1)+k], 0 <= k <= bw.
struct SymBand {
  std::size_t n = 0;
  int bw = 0;
  std::vector<double> data;

  double at(std::size_t i, std::size_t j) const;
  void add(std::size_t i, std::size_t j, double v);
};

// Negative-pivot count of the band LDL^T of (M - shift I).
int band_negative_inertia(const SymBand& M, double shift);

// In-place LDL^T factorization of a positive definite band matrix, and the
// corresponding solve. Returns false on a nonpositive pivot.
struct BandFactor {
  std::size_t n = 0;
  int bw = 0;
  std::vector<double> data;  // unit lower band + diagonal pivots
};
bool band_ldlt_factor(const SymBand& M, BandFactor& out);
void band_ldlt_solve(const BandFactor& F, std::vector<double> rhs,
                     std::vector<double>& x);

// Smallest eigenvalue of a symmetric band matrix by inertia bisection.
double band_smallest_eigenvalue(const SymBand& M, double lo, double hi,
                                double tol);

// Negative-pivot count of a dense symmetric matrix (LDL^T with 1x1 pivots,
// zero pivots nudged). Spectrum-slicing helper.
int dense_negative_inertia(std::vector<double> A, std::size_t n);

// Dense LU solve with partial pivoting; returns false if singular.
bool dense_lu_solve(std::vector<double> A, std::size_t n, std::vector<double> b,
                    std::vector<double>& x);

}  // namespace choqlab
