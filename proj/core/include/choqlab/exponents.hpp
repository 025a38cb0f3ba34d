#pragma once

namespace choqlab {

// Exponent algebra for the critical Choquard problem in dimension N with
// Riesz kernel power mu.
struct ChoquardExponents {
  int N = 0;             // spatial dimension, N >= 3 here
  double mu = 0.0;       // kernel power, 0 < mu < N
  double two_star = 0.0;     // 2N/(N-2)
  double two_star_mu = 0.0;  // (2N-mu)/(N-2)
};

// Builds the exponent set. Throws std::domain_error for N < 3 and
// std::invalid_argument when mu is outside (0, N).
ChoquardExponents critical_exponents(int N, double mu);

// Surface measure of the unit sphere S^{N-1} in R^N (N >= 1).
double unit_sphere_area(int N);

// Volume of the unit ball in R^N.
double unit_ball_volume(int N);

}  // namespace choqlab
