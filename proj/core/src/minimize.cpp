#include "choqlab/minimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "choqlab/linalg.hpp"
#include "choqlab/operators.hpp"
#include "choqlab/rng.hpp"

namespace choqlab {

namespace {

struct Workspace {
  const NormCoefficients* coeffs;
  const ChoquardExponents* exps;
  RadialKernelTable table;  // built once for non-Newton radial kernels
  bool have_table = false;

  ChoquardOptions copts() const {
    ChoquardOptions o;
    if (have_table) o.table = &table;
    return o;
  }

  double choquard(const GridFunction& u) const {
    return choquard_double_integral(u, exps->two_star_mu, *exps, copts()).value;
  }

  double form(const GridFunction& u) const { return norm_form_value(u, *coeffs); }

  double quotient(const GridFunction& u, double c_double) const {
    return form(u) / std::pow(c_double, 1.0 / exps->two_star_mu);
  }
};

GridFunction normalize_choquard(const Workspace& ws, const GridFunction& u) {
  const double c = ws.choquard(u);
  if (!(c > 0.0)) throw std::invalid_argument("minimize_quotient: zero iterate");
  const double t = std::pow(c, -1.0 / (2.0 * ws.exps->two_star_mu));
  return u.scaled(t);
}

GridFunction bubble_start(std::shared_ptr<const GridDomain> dom, int N) {
  const double half = 0.5 * (N - 2.0);
  if (dom->is_radial()) {
    // concentrated cut-off bubble, tapered to honor a Dirichlet outer shell
    const double R = dom->outer_radius();
    const double eps0 = std::pow(R / 100.0, 2.0);
    return GridFunction::sample_radial(dom, [&](double r) {
      const double taper = 1.0 - (r / R) * (r / R);
      return std::pow(eps0 + r * r, -half) * taper * taper;
    });
  }
  // boxes: bump at the domain center of the first boundary face
  std::vector<double> x0(dom->dim());
  for (int a = 0; a < dom->dim(); ++a) x0[a] = 0.5 * (dom->lo()[a] + dom->hi()[a]);
  x0[dom->dim() - 1] = dom->lo()[dom->dim() - 1];
  const double width = 0.15 * (dom->hi()[0] - dom->lo()[0]);
  return GridFunction::sample(dom, [&](const std::vector<double>& x) {
    double d2 = 0.0;
    for (std::size_t a = 0; a < x.size(); ++a) {
      const double t = x[a] - x0[a];
      d2 += t * t;
    }
    return std::pow(width * width + d2, -half);
  });
}

GridFunction random_start(std::shared_ptr<const GridDomain> dom, SplitMix64& rng) {
  std::vector<double> v(dom->n_nodes());
  for (double& x : v) x = 0.2 + rng.uniform01();
  GridFunction u(dom, std::move(v));
  // a few smoothing passes keep the gradient energy sane
  for (int pass = 0; pass < 3; ++pass) {
    std::vector<double> s(u.size());
    const std::size_t n = u.size();
    if (dom->is_radial() || dom->dim() == 1) {
      for (std::size_t i = 0; i < n; ++i) {
        double acc = 2.0 * u[i];
        acc += (i > 0) ? u[i - 1] : u[i];
        acc += (i + 1 < n) ? u[i + 1] : u[i];
        s[i] = 0.25 * acc;
      }
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        double acc = 2.0 * u[i];
        int cnt = 2;
        for (int a = 0; a < dom->dim(); ++a) {
          std::size_t stride = 1;
          for (int b = dom->dim() - 1; b > a; --b) stride *= dom->resolution()[b];
          const int j = dom->box_coord_index(i, a);
          if (j > 0) {
            acc += u[i - stride];
            ++cnt;
          }
          if (j + 1 < dom->resolution()[a]) {
            acc += u[i + stride];
            ++cnt;
          }
        }
        s[i] = acc / cnt;
      }
    }
    u.values() = std::move(s);
  }
  return u;
}

}  // namespace

MinimizeResult minimize_quotient(const NormCoefficients& coeffs,
                                 const ChoquardExponents& exps,
                                 const MinimizerOptions& opts) {
  if (!(opts.step > 0.0) || !(opts.grad_tol > 0.0)) {
    throw std::invalid_argument("minimize_quotient: step and grad_tol must be positive");
  }
  auto dom = coeffs.a.domain_ptr();
  if (!equivalence_certificate(*dom, coeffs)) {
    throw CertificateError("minimize_quotient: equivalence certificate fails");
  }

  Workspace ws;
  ws.coeffs = &coeffs;
  ws.exps = &exps;
  if (dom->is_radial() && std::fabs(exps.mu - (exps.N - 2.0)) > 1e-12) {
    ws.table = build_radial_kernel_table(*dom, exps.mu);
    ws.have_table = true;
  }

  const double p = exps.two_star_mu;
  const auto& w = dom->weights();

  // Jacobi preconditioner built from the gradient-form diagonal; a plain
  // mass-preconditioned step is stiffness-limited on graded meshes.
  std::vector<double> precond(dom->n_nodes(), 0.0);
  {
    GridFunction probe(dom, 0.0);
    for (std::size_t i = 0; i < precond.size(); ++i) {
      probe.values().assign(precond.size(), 0.0);
      probe[i] = 1.0;
      precond[i] = 2.0 * gradient_form_apply(probe)[i];
    }
    double max_ratio = 0.0;
    for (std::size_t i = 0; i < precond.size(); ++i) {
      max_ratio = std::max(max_ratio, w[i] > 0 ? precond[i] / w[i] : 0.0);
    }
    for (std::size_t i = 0; i < precond.size(); ++i) {
      // keep the preconditioner positive and bounded relative to the mass
      precond[i] = std::max(precond[i], 1e-8 * max_ratio * w[i]) ;
      precond[i] = std::max(precond[i], 1e-300);
    }
  }

  SplitMix64 root(opts.seed);

  MinimizeResult best{GridFunction(dom, 0.0)};
  best.S_disc = std::numeric_limits<double>::infinity();

  const int total_starts = std::max(1, opts.restarts);
  for (int restart = 0; restart < total_starts; ++restart) {
    SplitMix64 rng = root.split();
    GridFunction u = (restart == 0)
                         ? (opts.initial ? *opts.initial : bubble_start(dom, exps.N))
                         : random_start(dom, rng);
    u = normalize_choquard(ws, u.abs());

    std::vector<TrajectoryPoint> traj;
    double step = opts.step;
    double c_double = 1.0;
    double Q = ws.quotient(u, c_double);
    bool converged = false;
    int since_strong = 0;

    for (int iter = 0; iter < opts.max_iters; ++iter) {
      // gradient of Q at the normalized iterate (C(u) = 1):
      //   grad Q = 2 A u - 2 Q w u^{p-1} Phi
      const std::vector<double> Au = norm_form_apply(u, coeffs);
      GridFunction up = u.pow(p);
      GridFunction phi = riesz_potential(up, exps.mu, ws.copts());
      std::vector<double> g(u.size()), dir(u.size());
      double gnorm2 = 0.0, dd = 0.0;
      for (std::size_t i = 0; i < u.size(); ++i) {
        g[i] = 2.0 * Au[i] -
               2.0 * Q * w[i] * std::pow(u[i], p - 1.0) * phi[i];
        gnorm2 += g[i] * g[i] / w[i];
        dir[i] = g[i] / precond[i];
        dd += g[i] * dir[i];
      }
      const double gnorm = std::sqrt(gnorm2);
      double unorm = std::sqrt(l2_norm_sq(u));
      traj.push_back({iter, Q, gnorm});

      if (gnorm <= opts.grad_tol * (1.0 + std::fabs(Q)) * unorm) {
        converged = true;
        break;
      }

      // backtracking Armijo on the sign-projected, renormalized trial; when
      // the sufficient decrease falls below rounding, accept non-increase
      // within the documented 1e-12 monotonicity slack instead of stalling
      bool accepted = false;
      bool strong = false;
      const double noise = 1e-13 * (1.0 + std::fabs(Q));
      for (int bt = 0; bt < 60 && !accepted; ++bt) {
        GridFunction trial = u;
        for (std::size_t i = 0; i < u.size(); ++i) {
          trial[i] = std::fabs(u[i] - step * dir[i]);
        }
        double c_trial;
        try {
          c_trial = ws.choquard(trial);
        } catch (const std::exception&) {
          step *= 0.5;
          continue;
        }
        if (!(c_trial > 0.0)) {
          step *= 0.5;
          continue;
        }
        const double Q_trial = ws.quotient(trial, c_trial);
        strong = Q_trial <= Q - 1e-4 * step * dd;
        if (strong || (bt >= 2 && Q_trial <= Q + noise)) {
          const double t = std::pow(c_trial, -1.0 / (2.0 * p));
          u = trial.scaled(t);
          Q = std::min(Q, Q_trial);
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      if (!accepted) break;  // no admissible step at rounding level
      if (strong) {
        step = std::min(step * 1.3, 1e12);
        since_strong = 0;
      } else if (++since_strong > 80) {
        break;  // rounding plateau: hand over to the fixed-point polish
      }
    }

    // Polish toward stationarity with a damped Euler-Lagrange fixed point
    //   u <- A^{-1}(w u^{p-1} Phi(u)), renormalized.
    // Line search alone bottoms out at the sqrt(rounding) gradient floor; the
    // fixed point needs no function-value comparisons. One-dimensional
    // topologies only (banded solve).
    if (!converged && (dom->is_radial() || dom->dim() == 1)) {
      BandFactor factor;
      bool have_factor = false;
      {
        SymBand band = norm_form_band(*dom, coeffs);
        have_factor = band_ldlt_factor(band, factor);
      }
      double theta = 0.5;
      auto grad_norm_of = [&](const GridFunction& x, double Qx) {
        const std::vector<double> Ax = norm_form_apply(x, coeffs);
        GridFunction xp = x.pow(p);
        GridFunction phix = riesz_potential(xp, exps.mu, ws.copts());
        double g2 = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
          const double gi = 2.0 * Ax[i] -
                            2.0 * Qx * w[i] * std::pow(x[i], p - 1.0) * phix[i];
          g2 += gi * gi / w[i];
        }
        return std::sqrt(g2);
      };
      double gnorm = have_factor ? grad_norm_of(u, Q) : 0.0;
      for (int it = 0; have_factor && it < 400; ++it) {
        const double unorm = std::sqrt(l2_norm_sq(u));
        if (gnorm <= opts.grad_tol * (1.0 + std::fabs(Q)) * unorm) {
          converged = true;
          break;
        }
        GridFunction up = u.pow(p);
        GridFunction phi = riesz_potential(up, exps.mu, ws.copts());
        std::vector<double> rhs(u.size());
        for (std::size_t i = 0; i < u.size(); ++i) {
          rhs[i] = w[i] * std::pow(u[i], p - 1.0) * phi[i];
        }
        std::vector<double> sol;
        band_ldlt_solve(factor, rhs, sol);
        GridFunction cand = u;
        for (std::size_t i = 0; i < u.size(); ++i) {
          cand[i] = std::fabs((1.0 - theta) * u[i] + theta * sol[i]);
        }
        double c_cand;
        try {
          c_cand = ws.choquard(cand);
        } catch (const std::exception&) {
          break;
        }
        if (!(c_cand > 0.0)) break;
        cand = cand.scaled(std::pow(c_cand, -1.0 / (2.0 * p)));
        const double Q_cand = ws.form(cand);
        const double g_cand = grad_norm_of(cand, Q_cand);
        if (g_cand < gnorm && Q_cand <= Q + 1e-12 * (1.0 + std::fabs(Q))) {
          u = cand;
          Q = std::min(Q, Q_cand);
          gnorm = g_cand;
          theta = std::min(1.0, theta * 1.2);
        } else {
          theta *= 0.5;
          if (theta < 1e-4) break;
        }
      }
    }

    if (Q < best.S_disc) {
      best.v = u;
      best.S_disc = Q;
      best.converged = converged;
      best.best_restart = restart;
      best.trajectory = std::move(traj);
    }
  }
  return best;
}

GridFunction ground_state_rescale(const GridFunction& v, double S_disc,
                                  const ChoquardExponents& exps) {
  const double expo = 1.0 / (2.0 * exps.two_star_mu - 2.0);
  return v.scaled(std::pow(S_disc, expo));
}

GridFunction pde_residual(const GridFunction& u, const NormCoefficients& coeffs,
                          const ChoquardExponents& exps,
                          const ChoquardOptions& copts) {
  const double p = exps.two_star_mu;
  const std::vector<double> Au = norm_form_apply(u, coeffs);
  GridFunction up = u.abs().pow(p);
  GridFunction phi = riesz_potential(up, exps.mu, copts);
  const auto& w = u.domain().weights();
  std::vector<double> r(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double upm1 = std::copysign(std::pow(std::fabs(u[i]), p - 1.0), u[i]);
    r[i] = Au[i] / w[i] - phi[i] * upm1;
  }
  return GridFunction(u.domain_ptr(), std::move(r));
}

ThresholdCheck energy_threshold_check(const GridFunction& u0,
                                      const NormCoefficients& coeffs,
                                      const ChoquardExponents& exps,
                                      const ChoquardOptions& copts) {
  ThresholdCheck out;
  out.J_value = energy(u0, coeffs, exps, copts);
  const double q = exps.two_star_mu;
  const double sh = s_h_constant(exps);
  out.bound = (0.5 - 1.0 / (2.0 * q)) *
              std::pow(sh, q / (q - 1.0)) /
              std::pow(2.0, (q - 2.0) / (q - 1.0));
  out.margin = out.bound - out.J_value;
  out.below = out.margin > 0.0;
  return out;
}

}  // namespace choqlab
