#pragma once

#include <vector>

#include "choqlab/grid_function.hpp"

namespace choqlab {

// Discrete differential machinery on GridDomain meshes.
//
// Two discretizations coexist on purpose:
//  * nodal gradients (centered second order, one-sided second-order closure at
//    Neumann boundaries, even closure across mirror planes and the radial
//    origin) drive the energy/quotient functionals, and are exact on linears;
//  * a finite-volume flux stiffness (zero-flux Neumann faces) drives the
//    eigenvalue solver, where a symmetric tridiagonal/banded matrix is needed.

// Partial derivative field along one axis (radial kinds: derivative in r).
GridFunction nodal_partial(const GridFunction& u, int axis);

// Discrete integral of |grad u|^2, including Dirichlet face penalties on
// Gamma0 faces. Zero iff u is constant (connected domains, no Gamma0).
double dirichlet_energy(const GridFunction& u);

// Applies the symmetric nodal-gradient form operator: out = sum_a G_a^T W G_a u
// (+ Gamma0 face penalties). dirichlet_energy(u) == u . form_apply(u).
std::vector<double> gradient_form_apply(const GridFunction& u);

// integral over Gamma1 of b u^2 with (N-1)-dimensional face weights; the trace
// of u is its boundary-adjacent nodal value.
double trace_form(const GridFunction& u, const GridFunction& b);
// Adds the trace operator action: out_i += b_i * face_weight_i * u_i.
void trace_form_apply(const GridFunction& u, const GridFunction& b,
                      std::vector<double>& out);
// Per-node Gamma1 face weight (zero away from the boundary).
std::vector<double> gamma1_face_weights(const GridDomain& d);

// Finite-volume Neumann stiffness for -div(grad .): symmetric, kernel =
// constants. Tridiagonal for 1-d boxes and radial kinds; dense otherwise
// (small grids only).
struct FluxStiffness {
  bool tridiagonal = false;
  std::vector<double> diag;
  std::vector<double> off;    // sub/super diagonal (tridiagonal case)
  std::vector<double> dense;  // row-major n*n (small dense case)

  std::size_t size() const { return diag.size(); }
  void apply(const std::vector<double>& u, std::vector<double>& out) const;
};

FluxStiffness build_flux_stiffness(const GridDomain& d);

}  // namespace choqlab
