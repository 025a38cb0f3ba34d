#include "choqlab/quotient.hpp"

#include <cmath>
#include <cstring>
#include <limits>
#include <map>
#include <mutex>

#include "choqlab/operators.hpp"

namespace choqlab {

NormCoefficients NormCoefficients::zero(std::shared_ptr<const GridDomain> domain) {
  return NormCoefficients{GridFunction(domain, 0.0), GridFunction(domain, 0.0), 0.0, {}};
}

NormCoefficients NormCoefficients::bulk(GridFunction a_in) {
  auto dom = a_in.domain_ptr();
  return NormCoefficients{std::move(a_in), GridFunction(dom, 0.0), 0.0, {}};
}

NormCoefficients NormCoefficients::lambda_alpha(double lambda,
                                                const GridFunction& alpha_in) {
  NormCoefficients c{alpha_in.scaled(lambda), GridFunction(alpha_in.domain_ptr(), 0.0),
                     lambda, alpha_in};
  return c;
}

double norm_form_value(const GridFunction& u, const NormCoefficients& coeffs) {
  require_same_domain(u, coeffs.a);
  double v = dirichlet_energy(u);
  const auto& w = u.domain().weights();
  for (std::size_t i = 0; i < u.size(); ++i) v -= w[i] * coeffs.a[i] * u[i] * u[i];
  v += trace_form(u, coeffs.b);
  return v;
}

std::vector<double> norm_form_apply(const GridFunction& u,
                                    const NormCoefficients& coeffs) {
  require_same_domain(u, coeffs.a);
  std::vector<double> out = gradient_form_apply(u);
  const auto& w = u.domain().weights();
  for (std::size_t i = 0; i < u.size(); ++i) out[i] -= w[i] * coeffs.a[i] * u[i];
  trace_form_apply(u, coeffs.b, out);
  return out;
}

namespace {

// Assemble the symmetric form matrix. Banded for one-dimensional topologies
// (1-d boxes and radial grids), dense otherwise.
struct FormMatrix {
  bool banded = false;
  SymBand band;
  std::vector<double> dense;
  std::size_t n = 0;
};

FormMatrix assemble_form_matrix(const GridDomain& d, const NormCoefficients& coeffs) {
  FormMatrix M;
  const std::size_t n = d.n_nodes();
  M.n = n;
  M.banded = d.is_radial() || d.dim() == 1;

  auto dom_ptr = coeffs.a.domain_ptr();

  if (M.banded) {
    M.band.n = n;
    M.band.bw = 2;  // nodal stencils reach two neighbors at the ends
    M.band.data.assign(n * 3, 0.0);
  } else {
    if (n > 2500) {
      throw std::invalid_argument("equivalence_certificate: dense certificate capped at 2500 nodes");
    }
    M.dense.assign(n * n, 0.0);
  }

  auto add = [&](std::size_t i, std::size_t j, double v) {
    if (M.banded) {
      if (j >= i) M.band.add(i, j, v);
    } else {
      M.dense[i * n + j] += v;
      if (i != j) M.dense[j * n + i] += v;
    }
  };

  // gradient part: apply the form operator to unit vectors would be O(n^2);
  // instead accumulate stencil pair products axis by axis via the operator on
  // shifted deltas. The stencil support is 3, so probing 5 shifted unit
  // vectors per residue class reconstructs the band exactly; for dense boxes
  // fall back to probing (small n only).
  GridFunction probe(dom_ptr, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    probe.values().assign(n, 0.0);
    probe[j] = 1.0;
    const std::vector<double> col = gradient_form_apply(probe);
    if (M.banded) {
      for (std::size_t i = (j >= 2 ? j - 2 : 0); i < std::min(n, j + 3); ++i) {
        if (i <= j && col[i] != 0.0) add(i, j, col[i]);
      }
    } else {
      for (std::size_t i = 0; i <= j; ++i) {
        if (col[i] != 0.0) {
          M.dense[i * n + j] += col[i];
          if (i != j) M.dense[j * n + i] += col[i];
        }
      }
    }
  }

  const auto& w = d.weights();
  const auto fw = gamma1_face_weights(d);
  for (std::size_t i = 0; i < n; ++i) {
    const double diag_add = -w[i] * coeffs.a[i] + fw[i] * coeffs.b[i];
    if (M.banded) {
      M.band.data[i * 3] += diag_add;
    } else {
      M.dense[i * n + i] += diag_add;
    }
  }
  return M;
}

std::uint64_t coeff_hash(const GridDomain& d, const NormCoefficients& c) {
  std::uint64_t h = d.hash();
  auto mix = [&](double x) {
    std::uint64_t bits;
    std::memcpy(&bits, &x, sizeof(bits));
    h ^= bits + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  };
  for (std::size_t i = 0; i < c.a.size(); ++i) mix(c.a[i]);
  for (std::size_t i = 0; i < c.b.size(); ++i) mix(c.b[i]);
  return h;
}

}  // namespace

SymBand norm_form_band(const GridDomain& domain, const NormCoefficients& coeffs) {
  const FormMatrix M = assemble_form_matrix(domain, coeffs);
  if (!M.banded) {
    throw std::invalid_argument("norm_form_band: domain is not one-dimensional");
  }
  return M.band;
}

bool equivalence_certificate(const GridDomain& domain, const NormCoefficients& coeffs,
                             double* smallest_eigenvalue) {
  static std::mutex m;
  static std::map<std::uint64_t, std::pair<bool, double>> cache;
  const std::uint64_t key = coeff_hash(domain, coeffs);
  if (!smallest_eigenvalue) {
    std::lock_guard<std::mutex> lock(m);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second.first;
  }

  // Positive definiteness relative to the mass matrix: the smallest
  // eigenvalue of D^{-1/2} A D^{-1/2} with D = diag(weights). This keeps the
  // test meaningful on strongly graded meshes.
  FormMatrix M = assemble_form_matrix(domain, coeffs);
  const auto& w = domain.weights();
  double lambda_min;
  double scale = 1.0;
  if (M.banded) {
    for (std::size_t i = 0; i < M.n; ++i) {
      for (int k = 0; k <= M.band.bw; ++k) {
        if (i + k < M.n) {
          M.band.data[i * (M.band.bw + 1) + k] /= std::sqrt(w[i] * w[i + k]);
        }
      }
      scale = std::max(scale, std::fabs(M.band.data[i * (M.band.bw + 1)]));
    }
    lambda_min = band_smallest_eigenvalue(M.band, -scale, scale, 1e-13);
  } else {
    for (std::size_t i = 0; i < M.n; ++i) {
      for (std::size_t j = 0; j < M.n; ++j) {
        M.dense[i * M.n + j] /= std::sqrt(w[i] * w[j]);
      }
    }
    const EigenDecomposition e = jacobi_eigen(M.dense, M.n);
    lambda_min = e.values.front();
  }
  const bool ok = lambda_min > 1e-9;
  if (smallest_eigenvalue) *smallest_eigenvalue = lambda_min;
  std::lock_guard<std::mutex> lock(m);
  cache[key] = {ok, lambda_min};
  return ok;
}

double equivalent_norm_sq(const GridFunction& u, const NormCoefficients& coeffs) {
  if (!equivalence_certificate(u.domain(), coeffs)) {
    throw CertificateError("equivalent_norm_sq: quadratic form is not positive definite");
  }
  return norm_form_value(u, coeffs);
}

QuotientReport sobolev_quotient(const GridFunction& u, const NormCoefficients& coeffs,
                                const ChoquardExponents& exps,
                                const ChoquardOptions& opts) {
  QuotientReport rep;
  rep.choquard_sq = choquard_norm_sq(u, exps, opts);
  if (rep.choquard_sq == 0.0) {
    throw std::invalid_argument("sobolev_quotient: zero function");
  }
  rep.norm_sq = norm_form_value(u, coeffs);
  rep.Q = rep.norm_sq / rep.choquard_sq;
  rep.J = energy(u, coeffs, exps, opts);
  return rep;
}

double energy(const GridFunction& u, const NormCoefficients& coeffs,
              const ChoquardExponents& exps, const ChoquardOptions& opts) {
  const double form = norm_form_value(u, coeffs);
  const double c = choquard_double_integral(u, exps.two_star_mu, exps, opts).value;
  return 0.5 * form - c / (2.0 * exps.two_star_mu);
}

GridFunction reflect_halfspace(const GridFunction& v) {
  const GridDomain& d = v.domain();
  if (d.kind() != DomainKind::half_pair) {
    throw std::invalid_argument("reflect_halfspace: expects a half_pair function");
  }
  const int last = d.dim() - 1;
  std::vector<double> lo = d.lo(), hi = d.hi();
  std::vector<int> res = d.resolution();
  lo[last] = -hi[last];
  res[last] *= 2;
  auto full = std::make_shared<GridDomain>(
      make_domain(DomainKind::box, d.dim(), lo, hi, res, {}, d.options()));

  std::vector<double> vals(full->n_nodes());
  const int m = d.resolution()[last];
  for (std::size_t node = 0; node < full->n_nodes(); ++node) {
    std::vector<int> idx(d.dim());
    for (int a = 0; a < d.dim(); ++a) idx[a] = full->box_coord_index(node, a);
    // lower half mirrors the upper half
    idx[last] = (idx[last] >= m) ? idx[last] - m : m - 1 - idx[last];
    vals[node] = v[d.box_index(idx)];
  }
  return GridFunction(std::move(full), std::move(vals));
}

double cherrier_min_constant(const std::vector<GridFunction>& family, double eps,
                             const ChoquardExponents& exps,
                             const ChoquardOptions& opts) {
  if (!(eps > 0.0)) throw std::invalid_argument("cherrier_min_constant: eps <= 0");
  if (family.empty()) throw std::invalid_argument("cherrier_min_constant: empty family");
  const double slope = std::pow(2.0, (exps.two_star_mu - 2.0) / exps.two_star_mu) /
                           s_h_constant(exps) +
                       eps;
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& u : family) {
    const double l2 = l2_norm_sq(u);
    if (l2 == 0.0) throw std::invalid_argument("cherrier_min_constant: zero member");
    const double defect = choquard_norm_sq(u, exps, opts) - slope * dirichlet_energy(u);
    best = std::max(best, defect / l2);
  }
  return best;
}

}  // namespace choqlab
