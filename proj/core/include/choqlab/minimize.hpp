#pragma once

#include <cstdint>
#include <vector>

#include "choqlab/quotient.hpp"

namespace choqlab {

struct MinimizerOptions {
  double step = 1.0;        // initial step size
  int max_iters = 2000;
  double grad_tol = 1e-8;   // stationarity tolerance on the dual gradient norm
  int restarts = 1;         // random restarts beyond the bubble start
  std::uint64_t seed = 1;
  const GridFunction* initial = nullptr;  // overrides the bubble start
};

struct TrajectoryPoint {
  int iter;
  double Q;
  double grad_norm;
};

struct MinimizeResult {
  MinimizeResult(GridFunction v_in) : v(std::move(v_in)) {}
  GridFunction v;        // nonnegative minimizer, Choquard-normalized
  double S_disc = 0.0;   // Q(v)
  bool converged = false;
  int best_restart = 0;
  std::vector<TrajectoryPoint> trajectory;  // of the best restart
};

// Projected gradient descent for S_H(Gamma0, a, b) = inf Q(u): iterates are
// replaced by |u| (Q is sign-insensitive) and renormalized onto the Choquard
// sphere; Armijo backtracking keeps Q monotone along accepted steps. Requires
// the equivalence certificate.
MinimizeResult minimize_quotient(const NormCoefficients& coeffs,
                                 const ChoquardExponents& exps,
                                 const MinimizerOptions& opts = {});

// u0 = S_disc^{1/(2 2*_mu - 2)} v, the Euler-Lagrange rescaling.
GridFunction ground_state_rescale(const GridFunction& v, double S_disc,
                                  const ChoquardExponents& exps);

// Nodal residual of  -Delta u - a u - (riesz_potential(u^{2*_mu})) u^{2*_mu-1}
// with the Neumann/Robin closure folded into the boundary stencils. Equals the
// energy gradient divided by the quadrature weights.
GridFunction pde_residual(const GridFunction& u, const NormCoefficients& coeffs,
                          const ChoquardExponents& exps,
                          const ChoquardOptions& copts = {});

struct ThresholdCheck {
  bool below = false;
  double J_value = 0.0;
  double bound = 0.0;
  double margin = 0.0;  // bound - J, positive when strictly below
};

// Ground-state energy gate: J(u0) against
// (1/2 - 1/(2 2*_mu)) S_H^{2*_mu/(2*_mu-1)} / 2^{(2*_mu-2)/(2*_mu-1)}.
ThresholdCheck energy_threshold_check(const GridFunction& u0,
                                      const NormCoefficients& coeffs,
                                      const ChoquardExponents& exps,
                                      const ChoquardOptions& copts = {});

}  // namespace choqlab
