#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "choqlab/bubble.hpp"
#include "choqlab/grid_function.hpp"
#include "choqlab/linalg.hpp"
#include "choqlab/riesz.hpp"

namespace choqlab {

// Coefficients of the equivalent norm
//   ||u||^2 = int |grad u|^2 - int a u^2 + int_{Gamma1} b u^2.
// When built from (lambda, alpha), a = lambda * alpha pointwise.
struct NormCoefficients {
  GridFunction a;
  GridFunction b;
  double lambda = 0.0;
  std::optional<GridFunction> alpha;

  static NormCoefficients zero(std::shared_ptr<const GridDomain> domain);
  static NormCoefficients bulk(GridFunction a_in);
  static NormCoefficients lambda_alpha(double lambda, const GridFunction& alpha_in);
};

struct CertificateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Positive-definiteness certificate of the discrete quadratic form; smallest
// eigenvalue estimated by band/dense inertia bisection, tolerance 1e-9
// relative to the diagonal scale. Results are memoized per (domain, coeffs).
bool equivalence_certificate(const GridDomain& domain, const NormCoefficients& coeffs,
                             double* smallest_eigenvalue = nullptr);

// The quadratic form itself (no certificate check).
double norm_form_value(const GridFunction& u, const NormCoefficients& coeffs);
// Operator of the form: form_value(u) == u . form_operator_apply(u).
std::vector<double> norm_form_apply(const GridFunction& u,
                                    const NormCoefficients& coeffs);
// Assembled band matrix of the form (1-d boxes and radial kinds only).
SymBand norm_form_band(const GridDomain& domain, const NormCoefficients& coeffs);

// ||u||^2 with the certificate enforced (CertificateError otherwise).
double equivalent_norm_sq(const GridFunction& u, const NormCoefficients& coeffs);

struct QuotientReport {
  double norm_sq = 0.0;      // ||u||^2
  double choquard_sq = 0.0;  // ||u||_{0,Omega}^2
  double Q = 0.0;
  double J = 0.0;
};

// Q(u) = ||u||^2 / ||u||_{0,Omega}^2 plus the energy, as one report.
QuotientReport sobolev_quotient(const GridFunction& u, const NormCoefficients& coeffs,
                                const ChoquardExponents& exps,
                                const ChoquardOptions& opts = {});

// J(u) = 1/2 ||u||^2 - 1/(2 2*_mu) ||u||_{0,Omega}^{2 2*_mu}.
double energy(const GridFunction& u, const NormCoefficients& coeffs,
              const ChoquardExponents& exps, const ChoquardOptions& opts = {});

// Even reflection of a half_pair function onto the doubled box. The Dirichlet
// energy doubles and the Choquard double integral quadruples exactly under
// the mirror convention.
GridFunction reflect_halfspace(const GridFunction& v);

// Smallest C(eps) making
//   ||u||_0^2 <= (2^{(2*_mu-2)/2*_mu}/S_H + eps) int |grad u|^2 + C(eps) int u^2
// valid over the family: max over members of the defect / int u^2.
double cherrier_min_constant(const std::vector<GridFunction>& family, double eps,
                             const ChoquardExponents& exps,
                             const ChoquardOptions& opts = {});

}  // namespace choqlab
