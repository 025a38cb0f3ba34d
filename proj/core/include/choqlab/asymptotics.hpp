#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "choqlab/bubble.hpp"
#include "choqlab/domain.hpp"
#include "choqlab/grid_function.hpp"
#include "choqlab/riesz.hpp"

namespace choqlab {

// Concentration sweep at a flat boundary point: cut-off bubbles
// u_eps(x) = phi(x) (eps + |x|^2)^{-(N-2)/2} on the half-ball with boundary
// graph rho(x') = c |x'|^k, the Sigma sliver handled by thin-layer quadrature.
struct AsymptoticsSweep {
  ChoquardExponents exps;
  double lambda = 1.0;    // spectral parameter in front of alpha
  double alpha0 = 1.0;    // lower bound of the weight near the point
  FlatBoundarySpec flatness;
  std::vector<double> epsilons;  // strictly decreasing, > 0

  // discretization knobs (defaults cover eps down to 1e-6)
  int ball_nodes = 12000;
  double ball_stretch = 14.0;
  int plane_nodes = 800;
  int tail_nodes = 2000;
};

// 12 log-spaced epsilons in [1e-6, 1e-1].
AsymptoticsSweep make_default_sweep(const ChoquardExponents& exps, double lambda,
                                    double alpha0, double order_k,
                                    double coefficient, double radius_R);

// Prebuilt grids, kernel tables and whole-space bubble integrals for a sweep.
struct AsymptoticsContext {
  AsymptoticsSweep sweep;
  std::shared_ptr<const GridDomain> half_ball;  // user-facing domain
  std::shared_ptr<const GridDomain> ball;       // internal full-ball grid
  std::shared_ptr<const GridDomain> plane;      // (N-1)-dim chart disc
  std::shared_ptr<const GridDomain> tails;      // large ball for D/E
  RadialKernelTable ball_table;                 // only when mu != N-2
  RadialKernelTable plane_table;
  RadialKernelTable tails_table;
  bool newton = false;

  double grad_whole = 0.0;   // int_{R^N} |grad utilde|^2
  double l2_whole = 0.0;     // int utilde^2 (N >= 5)
  double choq_whole = 0.0;   // ||utilde||_0^{2 2*_mu}

  double cutoff(double r) const;             // radial profile phi
  double cutoff_derivative(double r) const;
  double profile(double eps, double r) const;             // u_eps(r)
  double profile_derivative(double eps, double r) const;  // u_eps'(r)
};

AsymptoticsContext make_asymptotics_context(const AsymptoticsSweep& sweep);

// Cut-off bubble sampled on the half-ball grid.
GridFunction cutoff_bubble(const AsymptoticsContext& ctx, double eps);

struct TermEstimate {
  double value = 0.0;             // Omega integral (half ball minus Sigma)
  double half_ball = 0.0;         // 1/2 of the full-ball integral
  double sigma_correction = 0.0;  // thin-layer Sigma integral
  double leading = 0.0;           // predicted leading term
};

TermEstimate gradient_term(const AsymptoticsContext& ctx, double eps);
TermEstimate l2_term(const AsymptoticsContext& ctx, double eps);

// The scaled tail integrals over the regions cut at M = R/(4 sqrt(eps)).
std::pair<double, double> tail_integrals_DE(const AsymptoticsContext& ctx,
                                            double eps);

struct ChoquardEstimate {
  double value = 0.0;         // ||u_eps||_{0,Omega}^{2 2*_mu} (mirror convention)
  double quarter_ball = 0.0;  // 1/4 of the full-ball double integral
  double cross_sigma = 0.0;   // iint over Sigma x B
  double sigma_sigma = 0.0;   // iint over the Sigma x Sigma pair
  double leading = 0.0;       // ||utilde||_0^{2 2*_mu} / (4 eps^{(2N-mu)/2})
};

ChoquardEstimate choquard_lower_bound(const AsymptoticsContext& ctx, double eps);

struct CurvePoint {
  double epsilon;
  double grad_term;
  double l2_term;
  double choquard;
  double D;
  double E;
  double Q;
  double threshold;
  double predicted_bound;
  bool below_gate;
};

// Full sweep: Q(u_eps) with a = lambda alpha0 near the point, against the
// half-domain threshold; predicted bound assembled from the case-dependent
// rates with least-squares fitted constants.
std::vector<CurvePoint> quotient_curve(const AsymptoticsContext& ctx);

struct RateFit {
  double slope = 0.0;
  double r_squared = 0.0;
};

// Log-log least squares slope of a positive series.
RateFit fit_rate(const std::vector<std::pair<double, double>>& series);

}  // namespace choqlab
