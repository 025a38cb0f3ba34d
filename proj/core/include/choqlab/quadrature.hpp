#pragma once

#include <functional>

// One-dimensional quadrature building blocks shared by the radial reductions:
// adaptive Simpson for smooth integrands, tanh-sinh for endpoint singularities,
// and graded composite rules for semi-infinite radial integrals with power-law
// tails.

namespace choqlab {

using Integrand = std::function<double(double)>;

// Adaptive Simpson on [a,b]. eps is an absolute tolerance target.
double integrate_adaptive(const Integrand& f, double a, double b, double eps = 1e-12);

// tanh-sinh (double exponential) rule on (a,b). Tolerates integrable power
// singularities at either endpoint. max_level doublings from a coarse mesh.
double integrate_tanh_sinh(const Integrand& f, double a, double b,
                           double eps = 1e-12, int max_level = 12);

// Composite Gauss-Legendre with `panels` equal panels of fixed order 8.
double integrate_gauss_panels(const Integrand& f, double a, double b, int panels);

// Integral of f over [0, infinity) for integrands decaying like r^{-decay}
// (decay > 1). Uses graded panels on [0, cutoff] plus a cutoff chosen so the
// bound tail_coeff * cutoff^{1-decay}/(decay-1) is below eps_tail of the head.
// tail_coeff should bound |f(r)| * r^{decay} for large r.
double integrate_radial_tail(const Integrand& f, double scale, double decay,
                             double tail_coeff, double eps_tail = 1e-13);

// Log-spaced panel integral on [a,b], 0 < a < b; good for multi-scale radial
// profiles. panels_per_decade Gauss panels per decade.
double integrate_log_panels(const Integrand& f, double a, double b,
                            int panels_per_decade = 32);

}  // namespace choqlab
