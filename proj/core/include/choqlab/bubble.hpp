#pragma once

#include <utility>
#include <vector>

#include "choqlab/exponents.hpp"

namespace choqlab {

// The extremal family: utilde(x) = alpha (beta^2 + |x|^2)^{-(N-2)/2},
// ubar = utilde / |utilde|_{2*}, ustar(x) = ubar(x / sqrt(S)), and
// U_eps(x) = eps^{-(N-2)/2} ustar(x/eps). Every member satisfies
// int |grad U_eps|^2 = int U_eps^{2*} = S^{N/2}.
struct BubbleSpec {
  int N = 4;
  double epsilon = 1.0;
  std::vector<double> center;
  double alpha = 1.0;             // free amplitude of utilde (fixed to 1)
  double beta = 1.0;              // free scale of utilde (fixed to 1)
  double l2star_norm = 0.0;       // |utilde|_{2*}
  double sobolev_S = 0.0;         // best Sobolev constant S(N)
};

BubbleSpec make_bubble_spec(int N, double epsilon,
                            std::vector<double> center = {});

// Value of U_eps at a point.
double bubble_eval(const BubbleSpec& spec, const std::vector<double>& x);
// Radial profile and its derivative at radius r from the center.
double bubble_profile(const BubbleSpec& spec, double r);
double bubble_profile_derivative(const BubbleSpec& spec, double r);

// Whole-space radial integrals of the bubble (high-resolution quadrature with
// controlled power-law tails).
double bubble_gradient_integral(const BubbleSpec& spec);  // int |grad U_eps|^2
double bubble_critical_integral(const BubbleSpec& spec);  // int U_eps^{2*}

// Best Sobolev constant from the bubble Rayleigh quotient; cross-checked
// against the closed form pi N(N-2) (Gamma(N/2)/Gamma(N))^{2/N} and flagged
// (std::runtime_error) if the quadrature disagrees beyond 1e-7.
double sobolev_constant(int N);
double sobolev_constant_closed_form(int N);

// Sharp diagonal Hardy-Littlewood-Sobolev constant C(N, mu).
double hls_sharp_constant(const ChoquardExponents& exps);

// S_H = S / C(N,mu)^{1/2*_mu}.
double s_h_constant(const ChoquardExponents& exps);

// Half-domain compactness threshold S_H / 2^{(2*_mu - 2)/2*_mu}.
double half_domain_threshold(const ChoquardExponents& exps);

// (head, tail) of int r^{N-1} (1+r^2)^{-N} dr split at the cutoff; the total
// equals Gamma(N/2)^2 / (2 Gamma(N)).
std::pair<double, double> beta_tail_integrals(const ChoquardExponents& exps,
                                              double cutoff);
double beta_integral_closed_form(int N);

// Memoized bundle of the derived constants for one (N, mu).
struct ConstantsRow {
  int N;
  double mu;
  double S;
  double C;
  double S_H;
  double threshold;
};
ConstantsRow derived_constants(const ChoquardExponents& exps);

}  // namespace choqlab
