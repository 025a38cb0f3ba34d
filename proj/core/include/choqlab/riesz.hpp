#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "choqlab/exponents.hpp"
#include "choqlab/grid_function.hpp"

namespace choqlab {

// Nonlocal Choquard machinery: angular-averaged radial kernels, the double
// Riesz integral, Riesz potentials and Hardy-Littlewood-Sobolev ratios.
//
// Convention for mirror kinds (half_pair, radial_half_ball): all nonlocal
// quantities are those of the even reflection, i.e. the double integral over a
// half domain is one quarter of the double integral of the mirror extension
// over the doubled domain, and potentials use the averaged image kernel
//   (|x-y|^{-mu} + |x-ybar|^{-mu}) / 2.
// For radial grids this reduces to the plain angular-averaged kernel against
// the half-domain weights.

// Angular average of |r e1 - s w|^{-mu} over w in S^{N-1} (surface measure,
// total |S^{N-1}|). Closed forms where available (mu=0, N=1, N=3, mu=N-2),
// double-exponential quadrature otherwise. Requires 0 <= mu < N; finite at
// r=s only when mu < N-1.
double angular_kernel(int N, double mu, double r, double s);

// Precomputed K(r_i, r_j) on the shells of a radial domain. Diagonal entries
// carry the cell-averaged kernel so that mu in [N-1, N) stays summable.
struct RadialKernelTable {
  int N = 0;
  double mu = 0.0;
  std::uint64_t grid_hash = 0;
  std::vector<double> nodes;
  std::vector<double> entries;  // row-major n*n, symmetric

  std::size_t size() const { return nodes.size(); }
  double value(std::size_t i, std::size_t j) const { return entries[i * size() + j]; }

  // Binary cache: header (magic, N, mu, node count, grid hash), then row-major
  // 64-bit floats.
  void save(const std::string& path) const;
  static std::optional<RadialKernelTable> load(const std::string& path);
};

// Builds (or loads from cache_dir, keyed by (N, mu, grid hash)) the kernel
// table of a radial domain. Honors CHOQLAB_THREADS for the row loop.
RadialKernelTable build_radial_kernel_table(const GridDomain& domain, double mu,
                                            const std::string& cache_dir = "");

struct ChoquardResult {
  double value = 0.0;
  double std_error = 0.0;  // zero for deterministic paths
  std::string method;      // "pairwise", "radial", "radial-newton", "monte-carlo"
};

struct ChoquardOptions {
  std::uint64_t seed = 1;
  std::size_t mc_samples = 200000;
  const RadialKernelTable* table = nullptr;  // reuse a prebuilt table
};

// The double Riesz integral  iint u(x)^p u(y)^p |x-y|^{-mu} dx dy  over the
// domain of u (mirror convention on half kinds). Deterministic pairwise for
// boxes with N <= 3, radial quadrature for radial kinds (any N), pair-sampled
// Monte Carlo with reported standard error for boxes with N >= 4.
ChoquardResult choquard_double_integral(const GridFunction& u, double p,
                                        const ChoquardExponents& exps,
                                        const ChoquardOptions& opts = {});

// ||u||_{0,Omega}^2 = (double integral at p = 2*_mu)^{1/2*_mu}.
double choquard_norm_sq(const GridFunction& u, const ChoquardExponents& exps,
                        const ChoquardOptions& opts = {});

// iint f(x) g(y) |x-y|^{-mu} dx dy (deterministic paths only).
double bilinear_riesz(const GridFunction& f, const GridFunction& g, double mu,
                      const ChoquardOptions& opts = {});

// Riesz potential of a nonnegative density against the domain kernel,
// evaluated at every node.
GridFunction riesz_potential(const GridFunction& density, double mu,
                             const ChoquardOptions& opts = {});

// Potential at an arbitrary point (box kinds; exact cell averages in 1-d).
double riesz_potential_at(const GridFunction& density, double mu,
                          const std::vector<double>& point);

// iint f h K / (|f|_t |h|_r); requires 1/t + mu/N + 1/r = 2 within 1e-9 and
// f, h >= 0. Zero by convention when either factor vanishes.
double hls_ratio(const GridFunction& f, const GridFunction& h, double t, double r,
                 const ChoquardExponents& exps);

// Monte Carlo estimate of the discrete pairwise sum (any box dimension);
// exposed so the deterministic value can be bracketed in tests.
ChoquardResult choquard_monte_carlo(const GridFunction& u, double p, double mu,
                                    std::uint64_t seed, std::size_t samples);

}  // namespace choqlab
