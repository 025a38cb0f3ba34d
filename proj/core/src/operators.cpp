#include "choqlab/operators.hpp"

#include <cmath>
#include <stdexcept>

namespace choqlab {

namespace {

// Three-point first-derivative coefficients at x1 from nodes (x0, x1, x2);
// exact on quadratics.
struct Stencil3 {
  double c0, c1, c2;
};

Stencil3 centered(double x0, double x1, double x2) {
  return {(x1 - x2) / ((x0 - x1) * (x0 - x2)),
          (2.0 * x1 - x0 - x2) / ((x1 - x0) * (x1 - x2)),
          (x1 - x0) / ((x2 - x0) * (x2 - x1))};
}

// Derivative at the first node of (x0, x1, x2).
Stencil3 one_sided(double x0, double x1, double x2) {
  return {(2.0 * x0 - x1 - x2) / ((x0 - x1) * (x0 - x2)),
          (x0 - x2) / ((x1 - x0) * (x1 - x2)),
          (x0 - x1) / ((x2 - x0) * (x2 - x1))};
}

// Per-axis nodal positions and end closures.
struct AxisGeometry {
  std::vector<double> x;
  bool mirror_lo = false;  // even closure at the low end (mirror plane / origin)
};

AxisGeometry axis_geometry(const GridDomain& d, int axis) {
  AxisGeometry g;
  if (d.is_radial()) {
    const std::size_t n = d.n_nodes();
    g.x.resize(n);
    for (std::size_t i = 0; i < n; ++i) g.x[i] = d.radius(i);
    g.mirror_lo = true;  // radial profiles extend evenly through the origin
    return g;
  }
  const int n = d.resolution()[axis];
  const double h = d.cell_size(axis);
  g.x.resize(n);
  for (int j = 0; j < n; ++j) g.x[j] = d.lo()[axis] + (j + 0.5) * h;
  g.mirror_lo = (d.kind() == DomainKind::half_pair && axis == d.dim() - 1);
  return g;
}

// Stencil (index offsets relative to j and coefficients) at position j.
void stencil_at(const AxisGeometry& g, int j, int n, int off[3], double c[3]) {
  if (n < 3) throw std::invalid_argument("nodal_partial: need >= 3 nodes per axis");
  if (j == 0) {
    if (g.mirror_lo) {
      // ghost at -x0 carrying the value at x0 (even extension)
      const Stencil3 s = centered(-g.x[0], g.x[0], g.x[1]);
      off[0] = 0; off[1] = 0; off[2] = 1;
      c[0] = s.c0 + s.c1; c[1] = 0.0; c[2] = s.c2;
    } else {
      const Stencil3 s = one_sided(g.x[0], g.x[1], g.x[2]);
      off[0] = 0; off[1] = 1; off[2] = 2;
      c[0] = s.c0; c[1] = s.c1; c[2] = s.c2;
    }
  } else if (j == n - 1) {
    // reversed one-sided closure
    const Stencil3 s = one_sided(g.x[j], g.x[j - 1], g.x[j - 2]);
    off[0] = 0; off[1] = -1; off[2] = -2;
    c[0] = s.c0; c[1] = s.c1; c[2] = s.c2;
  } else {
    const Stencil3 s = centered(g.x[j - 1], g.x[j], g.x[j + 1]);
    off[0] = -1; off[1] = 0; off[2] = 1;
    c[0] = s.c0; c[1] = s.c1; c[2] = s.c2;
  }
}

std::size_t axis_stride(const GridDomain& d, int axis) {
  std::size_t stride = 1;
  for (int a = d.dim() - 1; a > axis; --a) {
    stride *= static_cast<std::size_t>(d.resolution()[a]);
  }
  return stride;
}

// Gamma0 faces carry a Dirichlet penalty: the half-cell gradient of a function
// vanishing on the face contributes u^2 area / dist per boundary cell, with
// dist the node-to-face distance.
double gamma0_penalty_energy(const GridFunction& u) {
  const GridDomain& d = u.domain();
  if (d.options().gamma0_faces.empty()) return 0.0;
  if (d.is_radial()) {
    if (d.role(d.n_nodes() - 1) != NodeRole::gamma0) return 0.0;
    const std::size_t last = d.n_nodes() - 1;
    const double dist = d.outer_radius() - d.radius(last);
    return d.boundary_face_area(0) / dist * u[last] * u[last];
  }
  double total = 0.0;
  for (const auto& f : d.options().gamma0_faces) {
    const auto colon = f.find(':');
    const int axis = std::stoi(f.substr(0, colon));
    const bool hi_side = f.substr(colon + 1) == "hi";
    const int n = d.resolution()[axis];
    const double h = d.cell_size(axis);
    const double face_cell_area = d.boundary_face_area(axis) /
                                  (d.n_nodes() / static_cast<double>(n));
    const int target = hi_side ? n - 1 : 0;
    for (std::size_t node = 0; node < d.n_nodes(); ++node) {
      if (d.box_coord_index(node, axis) == target) {
        total += 2.0 * face_cell_area / h * u[node] * u[node];
      }
    }
  }
  return total;
}

void gamma0_penalty_apply(const GridFunction& u, std::vector<double>& out) {
  const GridDomain& d = u.domain();
  if (d.options().gamma0_faces.empty()) return;
  if (d.is_radial()) {
    if (d.role(d.n_nodes() - 1) != NodeRole::gamma0) return;
    const std::size_t last = d.n_nodes() - 1;
    const double dist = d.outer_radius() - d.radius(last);
    out[last] += d.boundary_face_area(0) / dist * u[last];
    return;
  }
  for (const auto& f : d.options().gamma0_faces) {
    const auto colon = f.find(':');
    const int axis = std::stoi(f.substr(0, colon));
    const bool hi_side = f.substr(colon + 1) == "hi";
    const int n = d.resolution()[axis];
    const double h = d.cell_size(axis);
    const double face_cell_area = d.boundary_face_area(axis) /
                                  (d.n_nodes() / static_cast<double>(n));
    const int target = hi_side ? n - 1 : 0;
    for (std::size_t node = 0; node < d.n_nodes(); ++node) {
      if (d.box_coord_index(node, axis) == target) {
        out[node] += 2.0 * face_cell_area / h * u[node];
      }
    }
  }
}

}  // namespace

GridFunction nodal_partial(const GridFunction& u, int axis) {
  const GridDomain& d = u.domain();
  if (axis < 0 || (!d.is_radial() && axis >= d.dim()) || (d.is_radial() && axis != 0)) {
    throw std::invalid_argument("nodal_partial: bad axis");
  }
  const AxisGeometry g = axis_geometry(d, axis);
  std::vector<double> out(d.n_nodes(), 0.0);

  if (d.is_radial()) {
    const int n = static_cast<int>(d.n_nodes());
    int off[3];
    double c[3];
    for (int j = 0; j < n; ++j) {
      stencil_at(g, j, n, off, c);
      out[j] = c[0] * u[j + off[0]] + c[1] * u[j + off[1]] + c[2] * u[j + off[2]];
    }
    return GridFunction(u.domain_ptr(), std::move(out));
  }

  const int n = d.resolution()[axis];
  const std::size_t stride = axis_stride(d, axis);
  int off[3];
  double c[3];
  for (std::size_t node = 0; node < d.n_nodes(); ++node) {
    const int j = d.box_coord_index(node, axis);
    stencil_at(g, j, n, off, c);
    out[node] = c[0] * u[node + off[0] * stride] + c[1] * u[node + off[1] * stride] +
                c[2] * u[node + off[2] * stride];
  }
  return GridFunction(u.domain_ptr(), std::move(out));
}

double dirichlet_energy(const GridFunction& u) {
  const GridDomain& d = u.domain();
  const int n_axes = d.is_radial() ? 1 : d.dim();
  double total = 0.0;
  for (int a = 0; a < n_axes; ++a) {
    const GridFunction du = nodal_partial(u, a);
    total += l2_norm_sq(du);
  }
  total += gamma0_penalty_energy(u);
  return total;
}

std::vector<double> gradient_form_apply(const GridFunction& u) {
  const GridDomain& d = u.domain();
  const int n_axes = d.is_radial() ? 1 : d.dim();
  const auto& w = d.weights();
  std::vector<double> out(d.n_nodes(), 0.0);

  for (int a = 0; a < n_axes; ++a) {
    const AxisGeometry g = axis_geometry(d, a);
    const int n = d.is_radial() ? static_cast<int>(d.n_nodes()) : d.resolution()[a];
    const std::size_t stride = d.is_radial() ? 1 : axis_stride(d, a);
    int off[3];
    double c[3];
    for (std::size_t node = 0; node < d.n_nodes(); ++node) {
      const int j = d.is_radial() ? static_cast<int>(node)
                                  : d.box_coord_index(node, a);
      stencil_at(g, j, n, off, c);
      const double du = c[0] * u[node + off[0] * stride] +
                        c[1] * u[node + off[1] * stride] +
                        c[2] * u[node + off[2] * stride];
      const double wdu = w[node] * du;
      out[node + off[0] * stride] += c[0] * wdu;
      out[node + off[1] * stride] += c[1] * wdu;
      out[node + off[2] * stride] += c[2] * wdu;
    }
  }
  gamma0_penalty_apply(u, out);
  return out;
}

std::vector<double> gamma1_face_weights(const GridDomain& d) {
  std::vector<double> fw(d.n_nodes(), 0.0);
  if (d.is_radial()) {
    if (d.role(d.n_nodes() - 1) == NodeRole::gamma1) {
      fw[d.n_nodes() - 1] = d.boundary_face_area(0);
    }
    return fw;
  }
  for (int axis = 0; axis < d.dim(); ++axis) {
    const int n = d.resolution()[axis];
    const double face_cell_area = d.boundary_face_area(axis) /
                                  (d.n_nodes() / static_cast<double>(n));
    const bool mirror_lo = (d.kind() == DomainKind::half_pair && axis == d.dim() - 1);
    for (std::size_t node = 0; node < d.n_nodes(); ++node) {
      const int j = d.box_coord_index(node, axis);
      if (j == 0 && !mirror_lo && d.role(node) != NodeRole::gamma0) {
        fw[node] += face_cell_area;
      }
      if (j == n - 1 && d.role(node) != NodeRole::gamma0) {
        fw[node] += face_cell_area;
      }
    }
  }
  return fw;
}

double trace_form(const GridFunction& u, const GridFunction& b) {
  require_same_domain(u, b);
  const auto fw = gamma1_face_weights(u.domain());
  double s = 0.0;
  for (std::size_t i = 0; i < fw.size(); ++i) {
    if (fw[i] != 0.0) s += fw[i] * b[i] * u[i] * u[i];
  }
  return s;
}

void trace_form_apply(const GridFunction& u, const GridFunction& b,
                      std::vector<double>& out) {
  require_same_domain(u, b);
  const auto fw = gamma1_face_weights(u.domain());
  for (std::size_t i = 0; i < fw.size(); ++i) {
    if (fw[i] != 0.0) out[i] += fw[i] * b[i] * u[i];
  }
}

void FluxStiffness::apply(const std::vector<double>& u, std::vector<double>& out) const {
  const std::size_t n = diag.size();
  out.assign(n, 0.0);
  if (tridiagonal) {
    for (std::size_t i = 0; i < n; ++i) {
      double v = diag[i] * u[i];
      if (i > 0) v += off[i - 1] * u[i - 1];
      if (i + 1 < n) v += off[i] * u[i + 1];
      out[i] = v;
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      double v = 0.0;
      const double* row = dense.data() + i * n;
      for (std::size_t j = 0; j < n; ++j) v += row[j] * u[j];
      out[i] = v;
    }
  }
}

FluxStiffness build_flux_stiffness(const GridDomain& d) {
  FluxStiffness A;
  const std::size_t n = d.n_nodes();

  if (d.is_radial()) {
    A.tridiagonal = true;
    A.diag.assign(n, 0.0);
    A.off.assign(n - 1, 0.0);
    const auto& g = d.shell_faces();
    const double area = d.boundary_face_area(0) / std::pow(d.outer_radius(), d.dim() - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double face = area * std::pow(g[i + 1], d.dim() - 1);
      const double c = face / (d.radius(i + 1) - d.radius(i));
      A.diag[i] += c;
      A.diag[i + 1] += c;
      A.off[i] -= c;
    }
    if (d.role(n - 1) == NodeRole::gamma0) {
      A.diag[n - 1] += d.boundary_face_area(0) / (d.outer_radius() - d.radius(n - 1));
    }
    return A;
  }

  if (d.dim() == 1) {
    A.tridiagonal = true;
    A.diag.assign(n, 0.0);
    A.off.assign(n - 1, 0.0);
    const double h = d.cell_size(0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double c = 1.0 / h;
      A.diag[i] += c;
      A.diag[i + 1] += c;
      A.off[i] -= c;
    }
    // Dirichlet faces
    for (const auto& f : d.options().gamma0_faces) {
      const bool hi_side = f.substr(f.find(':') + 1) == "hi";
      A.diag[hi_side ? n - 1 : 0] += 2.0 / h;
    }
    return A;
  }

  if (n > 4096) {
    throw std::invalid_argument("build_flux_stiffness: dense stiffness capped at 4096 nodes");
  }
  A.tridiagonal = false;
  A.diag.assign(n, 0.0);
  A.dense.assign(n * n, 0.0);
  for (int axis = 0; axis < d.dim(); ++axis) {
    const int m = d.resolution()[axis];
    const double h = d.cell_size(axis);
    const std::size_t stride = axis_stride(d, axis);
    double face = 1.0;
    for (int a = 0; a < d.dim(); ++a) {
      if (a != axis) face *= d.cell_size(a);
    }
    const double c = face / h;
    for (std::size_t node = 0; node < n; ++node) {
      const int j = d.box_coord_index(node, axis);
      if (j + 1 < m) {
        const std::size_t nb = node + stride;
        A.dense[node * n + node] += c;
        A.dense[nb * n + nb] += c;
        A.dense[node * n + nb] -= c;
        A.dense[nb * n + node] -= c;
      }
    }
    for (const auto& f : d.options().gamma0_faces) {
      const auto colon = f.find(':');
      if (std::stoi(f.substr(0, colon)) != axis) continue;
      const bool hi_side = f.substr(colon + 1) == "hi";
      const int target = hi_side ? m - 1 : 0;
      for (std::size_t node = 0; node < n; ++node) {
        if (d.box_coord_index(node, axis) == target) {
          A.dense[node * n + node] += 2.0 * c;
        }
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) A.diag[i] = A.dense[i * n + i];
  return A;
}

}  // namespace choqlab
