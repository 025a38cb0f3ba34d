#include "choqlab/exponents.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace choqlab {

ChoquardExponents critical_exponents(int N, double mu) {
  if (N < 3) {
    throw std::domain_error("critical_exponents: N must be >= 3, got " +
                            std::to_string(N));
  }
  if (!(mu > 0.0) || !(mu < static_cast<double>(N))) {
    throw std::invalid_argument("critical_exponents: mu must lie in (0,N), got " +
                                std::to_string(mu));
  }
  ChoquardExponents e;
  e.N = N;
  e.mu = mu;
  e.two_star = 2.0 * N / (N - 2.0);
  e.two_star_mu = (2.0 * N - mu) / (N - 2.0);
  return e;
}

double unit_sphere_area(int N) {
  if (N < 1) throw std::invalid_argument("unit_sphere_area: N < 1");
  // |S^{N-1}| = 2 pi^{N/2} / Gamma(N/2); |S^0| = 2 (two points).
  return 2.0 * std::pow(M_PI, 0.5 * N) / std::tgamma(0.5 * N);
}

double unit_ball_volume(int N) { return unit_sphere_area(N) / N; }

}  // namespace choqlab
