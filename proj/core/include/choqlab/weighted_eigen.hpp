#pragma once

#include <vector>

#include "choqlab/grid_function.hpp"

namespace choqlab {

// Admissibility of a weight for the positive principal eigenvalue: alpha must
// change sign and have negative mean.
struct WeightSpec {
  GridFunction alpha;
  double mean = 0.0;
  bool sign_change = false;

  bool admissible() const { return sign_change && mean < 0.0; }
};

WeightSpec admissibility_check(const GridFunction& alpha);

struct EigenOptions {
  double tol = 1e-13;         // relative bisection tolerance on lambda
  int window = 4;             // how many positive pencil eigenvalues to scan
  double lambda_cap = 1e14;   // search ceiling before giving up
  double residual_tol = 1e-8; // post condition on the discrete residual
};

struct EigenResult {
  double lambda_alpha = 0.0;
  GridFunction phi;
  double residual = 0.0;          // ||A phi - lambda B phi||_w / ||phi||_w scale
  double positivity_margin = 0.0; // min phi / max phi
  // scan window: the first few positive pencil eigenvalues and whether the
  // associated eigenfunction is one-signed (only the first should be)
  std::vector<double> window_values;
  std::vector<bool> window_one_signed;
};

// lambda(alpha): the unique positive eigenvalue of -Delta phi = lambda alpha phi
// with homogeneous Neumann condition whose eigenfunction is positive. Solved
// by inertia bisection on the pencil (A - lambda B) — every positive pencil
// eigenvalue crosses downward since A is positive semidefinite — followed by
// inverse iteration. Throws std::runtime_error if no one-signed eigenfunction
// appears at the first crossing (discretization failure) or the search window
// is exhausted.
EigenResult weighted_neumann_eigenvalue(const WeightSpec& spec,
                                        const EigenOptions& options = {});

}  // namespace choqlab
