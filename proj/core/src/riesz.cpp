#include "choqlab/riesz.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "choqlab/quadrature.hpp"
#include "choqlab/rng.hpp"

namespace choqlab {

namespace {

void require_mu(int N, double mu) {
  if (!(mu >= 0.0) || mu >= static_cast<double>(N)) {
    throw std::invalid_argument("riesz: mu must lie in [0, N)");
  }
}

bool is_newton_case(int N, double mu) {
  return N >= 3 && std::fabs(mu - (N - 2.0)) < 1e-12;
}

// ---------------------------------------------------------------------------
// Angular kernel
// ---------------------------------------------------------------------------

// Polar-angle integral on dyadic panels graded into theta = 0, where the
// integrand is near-singular for r close to s. Gauss panels never touch the
// endpoint, so integrable singularities cost only extra depth.
double angular_kernel_numeric(int N, double mu, double r, double s) {
  const double dd = (r - s) * (r - s);
  const double rs4 = 4.0 * r * s;
  auto f = [&](double th) {
    // |r e1 - s w|^2 = (r-s)^2 + 4 r s sin^2(theta/2), stable for tiny theta
    const double sh = std::sin(0.5 * th);
    const double v = dd + rs4 * sh * sh;
    return std::pow(v, -0.5 * mu) * std::pow(std::sin(th), N - 2.0);
  };
  const int depth = (r == s) ? 140 : 54;
  double total = 0.0;
  double hi = M_PI;
  for (int k = 0; k < depth; ++k) {
    const double lo = 0.5 * hi;
    total += integrate_gauss_panels(f, lo, hi, 2);
    hi = lo;
  }
  return unit_sphere_area(N - 1) * total;
}

}  // namespace

double angular_kernel(int N, double mu, double r, double s) {
  require_mu(N, mu);
  if (mu == 0.0) return unit_sphere_area(N);
  if (r < 0.0 || s < 0.0) throw std::invalid_argument("angular_kernel: negative radius");
  if (r == 0.0 && s == 0.0) return std::numeric_limits<double>::infinity();
  if (r == 0.0 || s == 0.0) {
    return unit_sphere_area(N) * std::pow(std::max(r, s), -mu);
  }
  if (N == 1) {
    // S^0 = two points
    const double d = std::fabs(r - s);
    const double near = (d == 0.0) ? std::numeric_limits<double>::infinity()
                                   : std::pow(d, -mu);
    return near + std::pow(r + s, -mu);
  }
  if (is_newton_case(N, mu)) {
    // spherical mean of the |x|^{2-N} potential: value at the larger radius
    return unit_sphere_area(N) * std::pow(std::max(r, s), -(N - 2.0));
  }
  if (N == 3) {
    const double rs = r * s;
    if (std::fabs(mu - 2.0) < 1e-12) {
      const double d = std::fabs(r - s);
      if (d == 0.0) return std::numeric_limits<double>::infinity();
      return 2.0 * M_PI * (std::log(r + s) - std::log(d)) / rs;
    }
    const double q = 2.0 - mu;
    return 2.0 * M_PI *
           (std::pow(r + s, q) - std::pow(std::fabs(r - s), q)) / (rs * q);
  }
  return angular_kernel_numeric(N, mu, r, s);
}

// ---------------------------------------------------------------------------
// Radial kernel table
// ---------------------------------------------------------------------------

namespace {

// Cell average of K over the diagonal (r,s) square; used when K blows up on
// the diagonal (mu >= N-1).
double diagonal_cell_average(int N, double mu, double a, double b) {
  auto inner = [&](double r) {
    auto f = [&](double s) { return angular_kernel(N, mu, r, s); };
    double v = 0.0;
    if (r - a > 0.0) v += integrate_tanh_sinh(f, a, r, 1e-10, 10);
    if (b - r > 0.0) v += integrate_tanh_sinh(f, r, b, 1e-10, 10);
    return v;
  };
  const double cell = b - a;
  return integrate_gauss_panels(inner, a, b, 2) / (cell * cell);
}

int env_thread_count() {
  const char* env = std::getenv("CHOQLAB_THREADS");
  if (!env) return 1;
  const int n = std::atoi(env);
  return std::max(1, n);
}

}  // namespace

RadialKernelTable build_radial_kernel_table(const GridDomain& domain, double mu,
                                            const std::string& cache_dir) {
  if (!domain.is_radial()) {
    throw std::invalid_argument("build_radial_kernel_table: domain is not radial");
  }
  require_mu(domain.dim(), mu);

  std::string cache_path;
  if (!cache_dir.empty()) {
    std::ostringstream name;
    name.precision(17);
    name << "kernel_N" << domain.dim() << "_mu" << mu << "_h" << std::hex
         << domain.hash() << ".bin";
    cache_path = cache_dir + "/" + name.str();
    if (auto cached = RadialKernelTable::load(cache_path)) {
      if (cached->N == domain.dim() && cached->mu == mu &&
          cached->grid_hash == domain.hash()) {
        return std::move(*cached);
      }
    }
  }

  RadialKernelTable t;
  t.N = domain.dim();
  t.mu = mu;
  t.grid_hash = domain.hash();
  const std::size_t n = domain.n_nodes();
  t.nodes.resize(n);
  for (std::size_t i = 0; i < n; ++i) t.nodes[i] = domain.radius(i);
  t.entries.assign(n * n, 0.0);

  const bool singular_diag = (mu >= t.N - 1.0 - 1e-9);

  auto fill_rows = [&](std::size_t row_begin, std::size_t row_end) {
    for (std::size_t i = row_begin; i < row_end; ++i) {
      for (std::size_t j = 0; j <= i; ++j) {
        double v;
        if (i == j && singular_diag) {
          const auto& faces = domain.shell_faces();
          v = diagonal_cell_average(t.N, mu, faces[i], faces[i + 1]);
        } else {
          v = angular_kernel(t.N, mu, t.nodes[i], t.nodes[j]);
        }
        t.entries[i * n + j] = v;
        t.entries[j * n + i] = v;
      }
    }
  };

  const int threads = env_thread_count();
  if (threads <= 1 || n < 256) {
    fill_rows(0, n);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (n + threads - 1) / threads;
    for (int k = 0; k < threads; ++k) {
      const std::size_t b = std::min(n, k * chunk);
      const std::size_t e = std::min(n, b + chunk);
      if (b < e) pool.emplace_back(fill_rows, b, e);
    }
    for (auto& th : pool) th.join();
  }

  if (!cache_path.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(cache_dir, ec);
    t.save(cache_path);
  }
  return t;
}

void RadialKernelTable::save(const std::string& path) const {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("RadialKernelTable::save: cannot open " + path);
  const char magic[8] = {'C', 'H', 'Q', 'K', 'R', 'N', 'L', '1'};
  os.write(magic, 8);
  const std::uint64_t count = nodes.size();
  os.write(reinterpret_cast<const char*>(&N), sizeof(N));
  os.write(reinterpret_cast<const char*>(&mu), sizeof(mu));
  os.write(reinterpret_cast<const char*>(&count), sizeof(count));
  os.write(reinterpret_cast<const char*>(&grid_hash), sizeof(grid_hash));
  os.write(reinterpret_cast<const char*>(nodes.data()),
           static_cast<std::streamsize>(nodes.size() * sizeof(double)));
  os.write(reinterpret_cast<const char*>(entries.data()),
           static_cast<std::streamsize>(entries.size() * sizeof(double)));
}

std::optional<RadialKernelTable> RadialKernelTable::load(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) return std::nullopt;
  char magic[8];
  is.read(magic, 8);
  if (!is || std::memcmp(magic, "CHQKRNL1", 8) != 0) return std::nullopt;
  RadialKernelTable t;
  std::uint64_t count = 0;
  is.read(reinterpret_cast<char*>(&t.N), sizeof(t.N));
  is.read(reinterpret_cast<char*>(&t.mu), sizeof(t.mu));
  is.read(reinterpret_cast<char*>(&count), sizeof(count));
  is.read(reinterpret_cast<char*>(&t.grid_hash), sizeof(t.grid_hash));
  if (!is) return std::nullopt;
  t.nodes.resize(count);
  t.entries.resize(count * count);
  is.read(reinterpret_cast<char*>(t.nodes.data()),
          static_cast<std::streamsize>(count * sizeof(double)));
  is.read(reinterpret_cast<char*>(t.entries.data()),
          static_cast<std::streamsize>(count * count * sizeof(double)));
  if (!is) return std::nullopt;
  return t;
}

// ---------------------------------------------------------------------------
// Box pairwise kernel
// ---------------------------------------------------------------------------

namespace {

// Mean of |x-y|^{-mu} over two unit-separated cells, dimensionless constants.
// c_N(mu) = int over the unit-cube difference density of |t|^{-mu}.
double coincident_cell_constant(int N, double mu) {
  static std::mutex m;
  static std::map<std::pair<int, double>, double> cache;
  std::lock_guard<std::mutex> lock(m);
  auto it = cache.find({N, mu});
  if (it != cache.end()) return it->second;

  double c = 0.0;
  if (N == 1) {
    c = 2.0 / ((1.0 - mu) * (2.0 - mu));
  } else if (N == 2) {
    auto inner = [&](double a) {
      auto f = [&](double b) {
        return (1.0 - b) * std::pow(a * a + b * b, -0.5 * mu);
      };
      return (1.0 - a) * integrate_tanh_sinh(f, 0.0, 1.0, 1e-10, 10);
    };
    c = 4.0 * integrate_tanh_sinh(inner, 0.0, 1.0, 1e-10, 10);
  } else if (N == 3) {
    auto inner2 = [&](double a, double b) {
      auto f = [&](double cc) {
        return (1.0 - cc) * std::pow(a * a + b * b + cc * cc, -0.5 * mu);
      };
      return (1.0 - b) * integrate_tanh_sinh(f, 0.0, 1.0, 1e-9, 9);
    };
    auto inner1 = [&](double a) {
      auto f = [&](double b) { return inner2(a, b); };
      return (1.0 - a) * integrate_tanh_sinh(f, 0.0, 1.0, 1e-9, 9);
    };
    c = 8.0 * integrate_tanh_sinh(inner1, 0.0, 1.0, 1e-9, 9);
  } else {
    throw std::invalid_argument("coincident_cell_constant: N > 3 unsupported");
  }
  cache[{N, mu}] = c;
  return c;
}

// Exact mean of |x-y|^{-mu} over two cells of size h at center distance m*h
// (one dimension). F is the double antiderivative of d^{-mu}.
double cell_pair_average_1d(double mu, double h, long m) {
  auto F = [&](double d) {
    return std::pow(d, 2.0 - mu) / ((1.0 - mu) * (2.0 - mu));
  };
  const double d = std::fabs(static_cast<double>(m)) * h;
  return (F(d + h) - 2.0 * F(d) + F(std::fabs(d - h))) / (h * h);
}

struct BoxKernel {
  const GridDomain* d = nullptr;
  double mu = 0.0;
  bool image = false;   // half_pair mirror convention
  bool exact_1d = false;
  double diag_const = 0.0;  // coincident-cell average

  void init(const GridDomain& dom, double mu_in) {
    d = &dom;
    mu = mu_in;
    image = (dom.kind() == DomainKind::half_pair);
    exact_1d = (dom.dim() == 1);
    if (dom.dim() <= 3) {
      double h_min = dom.cell_size(0);
      for (int a = 1; a < dom.dim(); ++a) h_min = std::min(h_min, dom.cell_size(a));
      // anisotropy is mild in practice; scale the unit-cube constant by h_min
      diag_const = coincident_cell_constant(dom.dim(), mu) * std::pow(h_min, -mu);
    }
  }

  double plain(std::size_t i, std::size_t j) const {
    if (exact_1d) {
      const long mi = d->box_coord_index(i, 0);
      const long mj = d->box_coord_index(j, 0);
      return cell_pair_average_1d(mu, d->cell_size(0), mi - mj);
    }
    if (i == j) return diag_const;
    double dist2 = 0.0;
    for (int a = 0; a < d->dim(); ++a) {
      const double t = d->coord(i, a) - d->coord(j, a);
      dist2 += t * t;
    }
    return std::pow(dist2, -0.5 * mu);
  }

  double mirrored(std::size_t i, std::size_t j) const {
    const int last = d->dim() - 1;
    double dist2 = 0.0;
    for (int a = 0; a < last; ++a) {
      const double t = d->coord(i, a) - d->coord(j, a);
      dist2 += t * t;
    }
    const double t = d->coord(i, last) + d->coord(j, last);
    dist2 += t * t;
    if (exact_1d) {
      // 1-d mirror: exact average against the reflected cell
      const long mi = d->box_coord_index(i, 0);
      const long mj = d->box_coord_index(j, 0);
      return cell_pair_average_1d(mu, d->cell_size(0), mi + mj + 1);
    }
    return std::pow(dist2, -0.5 * mu);
  }

  double operator()(std::size_t i, std::size_t j) const {
    if (!image) return plain(i, j);
    return 0.5 * (plain(i, j) + mirrored(i, j));
  }
};

constexpr std::size_t kPairwiseNodeCap = 20000;

double pairwise_double_sum(const std::vector<double>& a, const BoxKernel& ker) {
  const std::size_t n = a.size();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i] == 0.0) continue;
    double row = 0.0;
    for (std::size_t j = 0; j < i; ++j) row += a[j] * ker(i, j);
    total += 2.0 * a[i] * row + a[i] * a[i] * ker(i, i);
  }
  return total;
}

// Radial double sum via the kernel table.
double radial_double_sum(const GridDomain& d, const std::vector<double>& fa,
                         const std::vector<double>& ga, const RadialKernelTable& t) {
  const std::size_t n = d.n_nodes();
  const double inv_area = 1.0 / unit_sphere_area(d.dim());
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (fa[i] == 0.0) continue;
    const double* row = t.entries.data() + i * n;
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += ga[j] * row[j];
    total += fa[i] * s;
  }
  return total * inv_area;
}

// Newton case mu = N-2: K/|S^{N-1}| = max(r,s)^{2-N}; prefix sums give the
// exact same discrete sum in O(n) without the table.
double radial_double_sum_newton(const GridDomain& d, const std::vector<double>& fa,
                                const std::vector<double>& ga) {
  const std::size_t n = d.n_nodes();
  const double m = d.dim() - 2.0;
  std::vector<double> pf(n + 1, 0.0), pg(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    pf[i + 1] = pf[i] + fa[i];
    pg[i + 1] = pg[i] + ga[i];
  }
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double k = std::pow(d.radius(i), -m);
    // pairs with max radius r_i (j <= i for g against f_i, j < i for f against g_i)
    total += k * (fa[i] * pg[i + 1] + ga[i] * pf[i]);
  }
  return total;
}

std::vector<double> radial_potential_newton(const GridDomain& d,
                                            const std::vector<double>& da) {
  const std::size_t n = d.n_nodes();
  const double m = d.dim() - 2.0;
  std::vector<double> out(n, 0.0);
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + da[i];
  double suffix = 0.0;
  for (std::size_t ii = n; ii-- > 0;) {
    out[ii] = std::pow(d.radius(ii), -m) * prefix[ii + 1] + suffix;
    suffix += da[ii] * std::pow(d.radius(ii), -m);
  }
  return out;
}

// |u|^p against the quadrature weights. Integer powers also use |u| so the
// double integral is sign-insensitive (the no-loss |u| projection of the
// minimizer relies on this).
std::vector<double> weighted_power(const GridFunction& u, double p) {
  const bool integral_p = (p == std::floor(p));
  const auto& w = u.domain().weights();
  std::vector<double> a(u.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!integral_p && u[i] < 0.0) {
      throw std::domain_error("choquard: negative function with fractional power");
    }
    a[i] = w[i] * std::pow(std::fabs(u[i]), p);
  }
  return a;
}

}  // namespace

// ---------------------------------------------------------------------------
// Public entry points
// ---------------------------------------------------------------------------

ChoquardResult choquard_double_integral(const GridFunction& u, double p,
                                        const ChoquardExponents& exps,
                                        const ChoquardOptions& opts) {
  const GridDomain& d = u.domain();
  require_mu(d.dim(), exps.mu);

  ChoquardResult res;
  if (d.is_radial()) {
    std::vector<double> a = weighted_power(u, p);
    if (is_newton_case(d.dim(), exps.mu)) {
      res.value = radial_double_sum_newton(d, a, a);
      res.method = "radial-newton";
    } else if (opts.table) {
      res.value = radial_double_sum(d, a, a, *opts.table);
      res.method = "radial";
    } else {
      const RadialKernelTable t = build_radial_kernel_table(d, exps.mu);
      res.value = radial_double_sum(d, a, a, t);
      res.method = "radial";
    }
    return res;
  }

  if (d.dim() <= 3) {
    if (d.n_nodes() > kPairwiseNodeCap) {
      throw std::invalid_argument("choquard: box too large for pairwise summation");
    }
    std::vector<double> a = weighted_power(u, p);
    BoxKernel ker;
    ker.init(d, exps.mu);
    res.value = pairwise_double_sum(a, ker);
    res.method = "pairwise";
    return res;
  }

  return choquard_monte_carlo(u, p, exps.mu, opts.seed, opts.mc_samples);
}

double choquard_norm_sq(const GridFunction& u, const ChoquardExponents& exps,
                        const ChoquardOptions& opts) {
  const double c = choquard_double_integral(u, exps.two_star_mu, exps, opts).value;
  return std::pow(c, 1.0 / exps.two_star_mu);
}

double bilinear_riesz(const GridFunction& f, const GridFunction& g, double mu,
                      const ChoquardOptions& opts) {
  require_same_domain(f, g);
  const GridDomain& d = f.domain();
  require_mu(d.dim(), mu);

  const auto& w = d.weights();
  std::vector<double> fa(f.size()), ga(g.size());
  for (std::size_t i = 0; i < fa.size(); ++i) {
    fa[i] = w[i] * f[i];
    ga[i] = w[i] * g[i];
  }

  if (d.is_radial()) {
    if (is_newton_case(d.dim(), mu)) return radial_double_sum_newton(d, fa, ga);
    if (opts.table) return radial_double_sum(d, fa, ga, *opts.table);
    const RadialKernelTable t = build_radial_kernel_table(d, mu);
    return radial_double_sum(d, fa, ga, t);
  }
  if (d.dim() > 3 || d.n_nodes() > kPairwiseNodeCap) {
    throw std::invalid_argument("bilinear_riesz: deterministic path needs N<=3 box");
  }
  BoxKernel ker;
  ker.init(d, mu);
  double total = 0.0;
  for (std::size_t i = 0; i < fa.size(); ++i) {
    if (fa[i] == 0.0) continue;
    double row = 0.0;
    for (std::size_t j = 0; j < ga.size(); ++j) row += ga[j] * ker(i, j);
    total += fa[i] * row;
  }
  return total;
}

GridFunction riesz_potential(const GridFunction& density, double mu,
                             const ChoquardOptions& opts) {
  const GridDomain& d = density.domain();
  require_mu(d.dim(), mu);
  if (density.min_value() < 0.0) {
    throw std::domain_error("riesz_potential: density must be nonnegative");
  }

  const auto& w = d.weights();
  std::vector<double> da(density.size());
  for (std::size_t i = 0; i < da.size(); ++i) da[i] = w[i] * density[i];

  std::vector<double> out(density.size(), 0.0);
  if (d.is_radial()) {
    if (is_newton_case(d.dim(), mu)) {
      // the max-kernel form is already normalized by |S^{N-1}|
      out = radial_potential_newton(d, da);
    } else {
      const RadialKernelTable* tp = opts.table;
      RadialKernelTable local;
      if (!tp) {
        local = build_radial_kernel_table(d, mu);
        tp = &local;
      }
      const double inv_area = 1.0 / unit_sphere_area(d.dim());
      const std::size_t n = d.n_nodes();
      for (std::size_t i = 0; i < n; ++i) {
        const double* row = tp->entries.data() + i * n;
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += da[j] * row[j];
        out[i] = s * inv_area;
      }
    }
    return GridFunction(density.domain_ptr(), std::move(out));
  }

  if (d.dim() > 3 || d.n_nodes() > kPairwiseNodeCap) {
    throw std::invalid_argument("riesz_potential: box too large / N >= 4");
  }
  BoxKernel ker;
  ker.init(d, mu);
  for (std::size_t i = 0; i < da.size(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < da.size(); ++j) s += da[j] * ker(i, j);
    out[i] = s;
  }
  return GridFunction(density.domain_ptr(), std::move(out));
}

double riesz_potential_at(const GridFunction& density, double mu,
                          const std::vector<double>& point) {
  const GridDomain& d = density.domain();
  require_mu(d.dim(), mu);
  if (d.is_radial()) {
    throw std::invalid_argument("riesz_potential_at: box kinds only");
  }
  if (static_cast<int>(point.size()) != d.dim()) {
    throw std::invalid_argument("riesz_potential_at: point dimension mismatch");
  }
  const auto& w = d.weights();
  double total = 0.0;
  if (d.dim() == 1) {
    // exact segment averages make this quadrature-exact for piecewise-constant
    // densities
    const double h = d.cell_size(0);
    const double inv1m = 1.0 / (1.0 - mu);
    const double x0 = point[0];
    for (std::size_t j = 0; j < density.size(); ++j) {
      const double a = d.coord(j, 0) - 0.5 * h;
      const double b = a + h;
      double seg;
      if (x0 <= a) {
        seg = (std::pow(b - x0, 1.0 - mu) - std::pow(a - x0, 1.0 - mu)) * inv1m;
      } else if (x0 >= b) {
        seg = (std::pow(x0 - a, 1.0 - mu) - std::pow(x0 - b, 1.0 - mu)) * inv1m;
      } else {
        seg = (std::pow(x0 - a, 1.0 - mu) + std::pow(b - x0, 1.0 - mu)) * inv1m;
      }
      total += density[j] * seg;
    }
    return total;
  }
  for (std::size_t j = 0; j < density.size(); ++j) {
    double dist2 = 0.0;
    for (int a = 0; a < d.dim(); ++a) {
      const double t = point[a] - d.coord(j, a);
      dist2 += t * t;
    }
    const double h = d.cell_size(0);
    dist2 = std::max(dist2, 1e-6 * h * h);
    total += w[j] * density[j] * std::pow(dist2, -0.5 * mu);
  }
  return total;
}

double hls_ratio(const GridFunction& f, const GridFunction& h, double t, double r,
                 const ChoquardExponents& exps) {
  if (std::fabs(1.0 / t + exps.mu / exps.N + 1.0 / r - 2.0) > 1e-9) {
    throw std::invalid_argument("hls_ratio: exponent relation 1/t + mu/N + 1/r = 2 violated");
  }
  if (f.min_value() < 0.0 || h.min_value() < 0.0) {
    throw std::domain_error("hls_ratio: f, h must be nonnegative");
  }
  const double nf = std::pow(integrate_pow(f, t), 1.0 / t);
  const double nh = std::pow(integrate_pow(h, r), 1.0 / r);
  if (nf == 0.0 || nh == 0.0) return 0.0;
  const double num = bilinear_riesz(f, h, exps.mu);
  return num / (nf * nh);
}

ChoquardResult choquard_monte_carlo(const GridFunction& u, double p, double mu,
                                    std::uint64_t seed, std::size_t samples) {
  const GridDomain& d = u.domain();
  if (d.is_radial()) {
    throw std::invalid_argument("choquard_monte_carlo: box kinds only");
  }
  require_mu(d.dim(), mu);
  std::vector<double> a = weighted_power(u, p);
  const std::size_t n = a.size();

  BoxKernel ker;
  ker.init(d, mu);

  // geometric mirror (per-axis index reversal) for the antithetic partner
  auto mirror = [&](std::size_t node) {
    std::vector<int> idx(d.dim());
    for (int ax = 0; ax < d.dim(); ++ax) {
      idx[ax] = d.resolution()[ax] - 1 - d.box_coord_index(node, ax);
    }
    return d.box_index(idx);
  };

  // exact diagonal + stratified estimate of the off-diagonal ordered pairs
  double diag = 0.0;
  for (std::size_t i = 0; i < n; ++i) diag += a[i] * a[i] * ker(i, i);

  const std::size_t total_pairs = n * (n - 1);
  const std::size_t strata = 64;
  const std::size_t per_stratum = std::max<std::size_t>(2, samples / strata);

  SplitMix64 root(seed);
  double estimate = 0.0;
  double variance = 0.0;
  for (std::size_t b = 0; b < strata; ++b) {
    const std::size_t lo = b * total_pairs / strata;
    const std::size_t hi = (b + 1) * total_pairs / strata;
    const double size = static_cast<double>(hi - lo);
    if (size <= 0.0) continue;
    SplitMix64 rng = root.split();
    double mean = 0.0, m2 = 0.0;
    for (std::size_t k = 0; k < per_stratum; ++k) {
      const std::size_t m = lo + rng.below(hi - lo);
      const std::size_t i = m / (n - 1);
      std::size_t j = m % (n - 1);
      if (j >= i) ++j;
      const double v1 = a[i] * a[j] * ker(i, j);
      const std::size_t mi = mirror(i), mj = mirror(j);
      const double v2 = a[mi] * a[mj] * ker(mi, mj);
      const double v = 0.5 * (v1 + v2);
      const double delta = v - mean;
      mean += delta / static_cast<double>(k + 1);
      m2 += delta * (v - mean);
    }
    estimate += size * mean;
    const double sample_var = m2 / static_cast<double>(per_stratum - 1);
    variance += size * size * sample_var / static_cast<double>(per_stratum);
  }

  ChoquardResult res;
  res.value = diag + estimate;
  res.std_error = std::sqrt(variance);
  res.method = "monte-carlo";
  return res;
}

}  // namespace choqlab
