#include "choqlab/domain.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <sstream>
#include <stdexcept>

#include "choqlab/exponents.hpp"

namespace choqlab {

double FlatBoundarySpec::rho(double xprime_norm) const {
  return coefficient * std::pow(xprime_norm, order_k);
}

std::string to_string(DomainKind k) {
  switch (k) {
    case DomainKind::box: return "box";
    case DomainKind::box_graph: return "box-graph";
    case DomainKind::half_pair: return "half-pair";
    case DomainKind::radial_ball: return "radial-ball";
    case DomainKind::radial_half_ball: return "radial-half-ball";
  }
  return "?";
}

DomainKind domain_kind_from_string(const std::string& s) {
  if (s == "box") return DomainKind::box;
  if (s == "box-graph") return DomainKind::box_graph;
  if (s == "half-pair") return DomainKind::half_pair;
  if (s == "radial-ball") return DomainKind::radial_ball;
  if (s == "radial-half-ball") return DomainKind::radial_half_ball;
  throw std::invalid_argument("unknown domain kind: " + s);
}

GridDomain GridDomain::make(DomainKind kind, int dim,
                            const std::vector<double>& lo,
                            const std::vector<double>& hi,
                            const std::vector<int>& resolution,
                            std::optional<FlatBoundarySpec> flatness,
                            DomainOptions options) {
  GridDomain d;
  d.kind_ = kind;
  d.dim_ = dim;
  d.lo_ = lo;
  d.hi_ = hi;
  d.res_ = resolution;
  d.flatness_ = std::move(flatness);
  d.options_ = std::move(options);

  if (dim < 1) throw std::invalid_argument("make_domain: dim < 1");

  const bool radial = (kind == DomainKind::radial_ball ||
                       kind == DomainKind::radial_half_ball);
  if (radial) {
    if (lo.size() != 1 || hi.size() != 1 || resolution.size() != 1) {
      throw std::invalid_argument("make_domain: radial kinds take one extent/resolution");
    }
    if (lo[0] != 0.0 || !(hi[0] > 0.0)) {
      throw std::invalid_argument("make_domain: radial extents must be [0,R], R>0");
    }
    if (resolution[0] < 3) throw std::invalid_argument("make_domain: resolution < 3");
  } else {
    if (static_cast<int>(lo.size()) != dim || static_cast<int>(hi.size()) != dim ||
        static_cast<int>(resolution.size()) != dim) {
      throw std::invalid_argument("make_domain: extents/resolution size mismatch");
    }
    for (int a = 0; a < dim; ++a) {
      if (!(hi[a] > lo[a])) throw std::invalid_argument("make_domain: inconsistent extents");
      if (resolution[a] < 3) throw std::invalid_argument("make_domain: resolution < 3 per axis");
    }
    if (kind == DomainKind::half_pair || kind == DomainKind::box_graph) {
      if (lo[dim - 1] != 0.0) {
        throw std::invalid_argument("make_domain: half kinds need x_N extents [0,H]");
      }
    }
  }

  if (d.flatness_) {
    if (kind != DomainKind::radial_half_ball && kind != DomainKind::box_graph) {
      throw std::invalid_argument("make_domain: flatness only on radial-half-ball or box-graph");
    }
    if (!(d.flatness_->order_k > 1.0)) throw std::invalid_argument("flatness: order_k <= 1");
    if (!(d.flatness_->radius_R > 0.0)) throw std::invalid_argument("flatness: radius_R <= 0");
    const double domain_scale = radial ? hi[0] : *std::min_element(hi.begin(), hi.end() - 1);
    if (d.flatness_->radius_R > 2.0 * domain_scale + 1e-12) {
      throw std::invalid_argument("flatness: chart radius exceeds domain");
    }
  }

  if (radial) {
    d.build_radial_nodes();
  } else {
    d.build_box_nodes();
  }
  return d;
}

void GridDomain::build_box_nodes() {
  h_.resize(dim_);
  std::size_t n = 1;
  for (int a = 0; a < dim_; ++a) {
    h_[a] = (hi_[a] - lo_[a]) / res_[a];
    n *= static_cast<std::size_t>(res_[a]);
  }
  coords_.resize(n * dim_);
  weights_.resize(n);
  roles_.assign(n, NodeRole::interior);

  double cell_w = 1.0;
  for (int a = 0; a < dim_; ++a) cell_w *= h_[a];
  measure_ = cell_w * static_cast<double>(n);

  // Dirichlet faces requested by the caller; everything else Neumann.
  std::map<std::pair<int, int>, bool> g0;  // (axis, side 0|1) -> true
  for (const auto& f : options_.gamma0_faces) {
    const auto colon = f.find(':');
    if (colon == std::string::npos) throw std::invalid_argument("bad gamma0 face: " + f);
    const int axis = std::stoi(f.substr(0, colon));
    const std::string side = f.substr(colon + 1);
    if (axis < 0 || axis >= dim_ || (side != "lo" && side != "hi")) {
      throw std::invalid_argument("bad gamma0 face: " + f);
    }
    g0[{axis, side == "hi" ? 1 : 0}] = true;
  }

  std::vector<int> idx(dim_, 0);
  for (std::size_t node = 0; node < n; ++node) {
    bool on_g0 = false, on_g1 = false;
    for (int a = 0; a < dim_; ++a) {
      coords_[node * dim_ + a] = lo_[a] + (idx[a] + 0.5) * h_[a];
      const bool mirror_face = (kind_ == DomainKind::half_pair && a == dim_ - 1);
      if (idx[a] == 0 && !mirror_face) {
        (g0.count({a, 0}) ? on_g0 : on_g1) = true;
      }
      if (idx[a] == res_[a] - 1) {
        (g0.count({a, 1}) ? on_g0 : on_g1) = true;
      }
    }
    weights_[node] = cell_w;

    // Sigma sliver: 0 < x_N < rho(x') inside the half-chart ball. Takes
    // precedence near the graph face, where the true boundary is the graph.
    bool in_sigma = false;
    if (flatness_ && kind_ == DomainKind::box_graph) {
      const double xn = coords_[node * dim_ + (dim_ - 1)];
      double xp2 = 0.0, x2 = 0.0;
      for (int a = 0; a < dim_; ++a) {
        const double c = coords_[node * dim_ + a];
        x2 += c * c;
        if (a < dim_ - 1) xp2 += c * c;
      }
      const double half_chart = 0.5 * flatness_->radius_R;
      in_sigma = x2 < half_chart * half_chart && xn > 0.0 &&
                 xn < flatness_->rho(std::sqrt(xp2));
    }

    if (in_sigma) {
      roles_[node] = NodeRole::sigma_layer;
    } else if (on_g0) {
      roles_[node] = NodeRole::gamma0;  // Gamma0 dominates at junctions
    } else if (on_g1) {
      roles_[node] = NodeRole::gamma1;
    }

    for (int a = dim_ - 1; a >= 0; --a) {
      if (++idx[a] < res_[a]) break;
      idx[a] = 0;
    }
  }
}

void GridDomain::build_radial_nodes() {
  const int n = res_[0];
  const double R = hi_[0];
  const double gamma = options_.radial_stretch;
  faces_.resize(n + 1);
  for (int j = 0; j <= n; ++j) {
    const double t = static_cast<double>(j) / n;
    faces_[j] = (gamma > 0.0) ? R * std::expm1(gamma * t) / std::expm1(gamma) : R * t;
  }
  faces_[0] = 0.0;
  faces_[n] = R;

  const double area = unit_sphere_area(dim_);
  const double half = is_half() ? 0.5 : 1.0;

  coords_.resize(n);
  weights_.resize(n);
  roles_.assign(n, NodeRole::interior);
  for (int i = 0; i < n; ++i) {
    coords_[i] = 0.5 * (faces_[i] + faces_[i + 1]);
    // exact shell volume; the sum telescopes to the ball measure
    weights_[i] = half * area *
                  (std::pow(faces_[i + 1], dim_) - std::pow(faces_[i], dim_)) / dim_;
  }
  bool outer_dirichlet = false;
  for (const auto& f : options_.gamma0_faces) {
    if (f == "0:hi") outer_dirichlet = true;
  }
  roles_[n - 1] = outer_dirichlet ? NodeRole::gamma0 : NodeRole::gamma1;
  measure_ = half * area * std::pow(R, dim_) / dim_;
}

double GridDomain::sigma_measure_analytic() const {
  if (!flatness_ || flatness_->coefficient == 0.0) return 0.0;
  // integral of c |x'|^k over the (N-1)-dim chart disc of radius R/2
  const double c = flatness_->coefficient;
  const double k = flatness_->order_k;
  const double half_R = 0.5 * flatness_->radius_R;
  const int np = dim_ - 1;
  if (np == 0) return c;  // degenerate 1-d case: rho(0) only
  const double ang = (np == 1) ? 2.0 : unit_sphere_area(np);
  return c * ang * std::pow(half_R, k + np) / (k + np);
}

std::size_t GridDomain::box_index(const std::vector<int>& idx) const {
  std::size_t node = 0;
  for (int a = 0; a < dim_; ++a) {
    node = node * static_cast<std::size_t>(res_[a]) + static_cast<std::size_t>(idx[a]);
  }
  return node;
}

int GridDomain::box_coord_index(std::size_t node, int axis) const {
  std::size_t rest = node;
  for (int a = dim_ - 1; a > axis; --a) {
    rest /= static_cast<std::size_t>(res_[a]);
  }
  return static_cast<int>(rest % static_cast<std::size_t>(res_[axis]));
}

double GridDomain::boundary_face_area(int axis) const {
  if (is_radial()) {
    const double half = is_half() ? 0.5 : 1.0;
    return half * unit_sphere_area(dim_) * std::pow(hi_[0], dim_ - 1);
  }
  double area = 1.0;
  for (int a = 0; a < dim_; ++a) {
    if (a != axis) area *= (hi_[a] - lo_[a]);
  }
  return area;
}

std::string GridDomain::serialize() const {
  std::ostringstream os;
  os.precision(17);
  os << "kind = " << to_string(kind_) << "\n";
  os << "dim = " << dim_ << "\n";
  os << "extents =";
  for (std::size_t a = 0; a < lo_.size(); ++a) os << " " << lo_[a] << ":" << hi_[a];
  os << "\n";
  os << "resolution =";
  for (int r : res_) os << " " << r;
  os << "\n";
  if (flatness_) {
    os << "flatness.k = " << flatness_->order_k << "\n";
    os << "flatness.c = " << flatness_->coefficient << "\n";
    os << "flatness.R = " << flatness_->radius_R << "\n";
  }
  if (options_.radial_stretch != 8.0) {
    os << "stretch = " << options_.radial_stretch << "\n";
  }
  for (const auto& f : options_.gamma0_faces) os << "gamma0 = " << f << "\n";
  return os.str();
}

GridDomain GridDomain::deserialize(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  std::map<std::string, std::vector<std::string>> kv;
  while (std::getline(is, line)) {
    const auto hash_pos = line.find('#');
    if (hash_pos != std::string::npos) line = line.substr(0, hash_pos);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    kv[trim(line.substr(0, eq))].push_back(trim(line.substr(eq + 1)));
  }
  auto need = [&](const std::string& k) -> std::string {
    auto it = kv.find(k);
    if (it == kv.end()) throw std::invalid_argument("domain spec missing key: " + k);
    return it->second.front();
  };

  const DomainKind kind = domain_kind_from_string(need("kind"));
  const int dim = std::stoi(need("dim"));
  std::vector<double> lo, hi;
  {
    std::istringstream es(need("extents"));
    std::string tok;
    while (es >> tok) {
      const auto colon = tok.find(':');
      if (colon == std::string::npos) throw std::invalid_argument("bad extents token");
      lo.push_back(std::stod(tok.substr(0, colon)));
      hi.push_back(std::stod(tok.substr(colon + 1)));
    }
  }
  std::vector<int> res;
  {
    std::istringstream rs(need("resolution"));
    int r;
    while (rs >> r) res.push_back(r);
  }
  std::optional<FlatBoundarySpec> flat;
  if (kv.count("flatness.k")) {
    FlatBoundarySpec f;
    f.order_k = std::stod(need("flatness.k"));
    f.coefficient = std::stod(need("flatness.c"));
    f.radius_R = std::stod(need("flatness.R"));
    flat = f;
  }
  DomainOptions opt;
  if (kv.count("stretch")) opt.radial_stretch = std::stod(need("stretch"));
  if (kv.count("gamma0")) opt.gamma0_faces = kv["gamma0"];
  return make(kind, dim, lo, hi, res, flat, opt);
}

std::uint64_t GridDomain::hash() const {
  const std::string doc = serialize();
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a
  for (unsigned char c : doc) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

bool GridDomain::same_layout(const GridDomain& other) const {
  return hash() == other.hash();
}

GridDomain make_domain(DomainKind kind, int dim, const std::vector<double>& lo,
                       const std::vector<double>& hi,
                       const std::vector<int>& resolution,
                       std::optional<FlatBoundarySpec> flatness,
                       DomainOptions options) {
  return GridDomain::make(kind, dim, lo, hi, resolution, std::move(flatness),
                          std::move(options));
}

}  // namespace choqlab
