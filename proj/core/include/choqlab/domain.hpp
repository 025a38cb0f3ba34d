#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace choqlab {

// Monomial boundary graph x_N = c |x'|^k inside a chart of radius R.
// rho(0)=0 and grad rho(0)=0 hold by construction for this family.
struct FlatBoundarySpec {
  double order_k = 2.0;     // flatness order, > 1
  double coefficient = 0.0; // amplitude c in rho(x') = c |x'|^k
  double radius_R = 1.0;    // chart radius, > 0

  double rho(double xprime_norm) const;
};

enum class DomainKind {
  box,              // cell-centered tensor grid on a box
  box_graph,        // box whose x_N=0 face carries the graph boundary; Sigma nodes tagged
  half_pair,        // x_N >= 0 half of a mirror-symmetric box (even-reflection semantics)
  radial_ball,      // radial shells on a ball of radius R, any N
  radial_half_ball, // radial shells on a half-ball (even-reflection semantics)
};

enum class NodeRole : std::uint8_t { interior, gamma0, gamma1, sigma_layer };

std::string to_string(DomainKind k);
DomainKind domain_kind_from_string(const std::string& s);

struct DomainOptions {
  // Boundary faces forced to Dirichlet (Gamma0), as "axis:side" with side in
  // {lo,hi}; everything else is Gamma1 (Neumann). Box kinds only.
  std::vector<std::string> gamma0_faces;
  // Grading strength of the radial mesh; 0 = uniform shells.
  double radial_stretch = 8.0;
};

// Immutable discretized domain: node coordinates, positive quadrature weights
// summing to the domain measure, and per-node roles. Half kinds (half_pair,
// radial_half_ball) carry even-reflection semantics: nonlocal quantities on
// them are defined through the mirror extension (see riesz.hpp).
class GridDomain {
 public:
  static GridDomain make(DomainKind kind, int dim,
                         const std::vector<double>& lo,
                         const std::vector<double>& hi,
                         const std::vector<int>& resolution,
                         std::optional<FlatBoundarySpec> flatness = {},
                         DomainOptions options = {});

  DomainKind kind() const { return kind_; }
  int dim() const { return dim_; }
  std::size_t n_nodes() const { return weights_.size(); }
  bool is_radial() const {
    return kind_ == DomainKind::radial_ball || kind_ == DomainKind::radial_half_ball;
  }
  bool is_half() const {
    return kind_ == DomainKind::half_pair || kind_ == DomainKind::radial_half_ball;
  }

  double coord(std::size_t node, int axis) const {
    if (is_radial()) return axis == 0 ? coords_[node] : 0.0;
    return coords_[node * dim_ + axis];
  }
  // Radial kinds: shell center radius.
  double radius(std::size_t node) const { return coords_[node]; }
  double weight(std::size_t node) const { return weights_[node]; }
  NodeRole role(std::size_t node) const { return roles_[node]; }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<NodeRole>& roles() const { return roles_; }

  double measure() const { return measure_; }
  // Analytic measure of the Sigma sliver (zero without flatness).
  double sigma_measure_analytic() const;

  const std::vector<double>& lo() const { return lo_; }
  const std::vector<double>& hi() const { return hi_; }
  const std::vector<int>& resolution() const { return res_; }
  const std::optional<FlatBoundarySpec>& flatness() const { return flatness_; }
  const DomainOptions& options() const { return options_; }

  // Box kinds: lexicographic indexing helpers.
  std::size_t box_index(const std::vector<int>& idx) const;
  int box_coord_index(std::size_t node, int axis) const;
  double cell_size(int axis) const { return h_[axis]; }

  // Radial kinds: shell interfaces g_0=0 < ... < g_n = R.
  const std::vector<double>& shell_faces() const { return faces_; }
  double outer_radius() const { return hi_[0]; }

  // Face area between boundary cell and the boundary, per axis (box kinds);
  // for radial kinds, area of the outer sphere (halved on half domains).
  double boundary_face_area(int axis) const;

  // Key/value document round-trip (kind, extents, resolution, flatness.*).
  std::string serialize() const;
  static GridDomain deserialize(const std::string& text);

  // Stable content hash; keys kernel caches.
  std::uint64_t hash() const;

  bool same_layout(const GridDomain& other) const;

 private:
  GridDomain() = default;
  void build_box_nodes();
  void build_radial_nodes();

  DomainKind kind_ = DomainKind::box;
  int dim_ = 1;
  std::vector<double> lo_, hi_;
  std::vector<int> res_;
  std::optional<FlatBoundarySpec> flatness_;
  DomainOptions options_;

  std::vector<double> coords_;
  std::vector<double> weights_;
  std::vector<NodeRole> roles_;
  std::vector<double> h_;      // box cell sizes per axis
  std::vector<double> faces_;  // radial shell interfaces
  double measure_ = 0.0;
};

// Spec-facing constructor (named after the operation it implements).
GridDomain make_domain(DomainKind kind, int dim, const std::vector<double>& lo,
                       const std::vector<double>& hi,
                       const std::vector<int>& resolution,
                       std::optional<FlatBoundarySpec> flatness = {},
                       DomainOptions options = {});

}  // namespace choqlab
