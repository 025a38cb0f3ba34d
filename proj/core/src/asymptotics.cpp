#include "choqlab/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "choqlab/quadrature.hpp"

namespace choqlab {

namespace {

double interp_radial(const GridDomain& d, const std::vector<double>& values,
                     double r) {
  const std::size_t n = d.n_nodes();
  if (r <= d.radius(0)) return values[0];
  if (r >= d.radius(n - 1)) return values[n - 1];
  std::size_t lo = 0, hi = n - 1;
  while (hi - lo > 1) {
    const std::size_t mid = (lo + hi) / 2;
    (d.radius(mid) <= r ? lo : hi) = mid;
  }
  const double t = (r - d.radius(lo)) / (d.radius(hi) - d.radius(lo));
  return (1.0 - t) * values[lo] + t * values[hi];
}

}  // namespace

AsymptoticsSweep make_default_sweep(const ChoquardExponents& exps, double lambda,
                                    double alpha0, double order_k,
                                    double coefficient, double radius_R) {
  AsymptoticsSweep s;
  s.exps = exps;
  s.lambda = lambda;
  s.alpha0 = alpha0;
  s.flatness = FlatBoundarySpec{order_k, coefficient, radius_R};
  const int count = 12;
  const double lo = 1e-6, hi = 1e-1;
  for (int i = 0; i < count; ++i) {
    const double t = static_cast<double>(i) / (count - 1);
    s.epsilons.push_back(hi * std::pow(lo / hi, t));
  }
  return s;
}

double AsymptoticsContext::cutoff(double r) const {
  const double R = sweep.flatness.radius_R;
  if (r <= 0.25 * R) return 1.0;
  if (r >= 0.5 * R) return 0.0;
  const double s = (r - 0.25 * R) / (0.25 * R);
  // quintic smoothstep: C^2, phi(0)=1, phi(1)=0
  return 1.0 - s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
}

double AsymptoticsContext::cutoff_derivative(double r) const {
  const double R = sweep.flatness.radius_R;
  if (r <= 0.25 * R || r >= 0.5 * R) return 0.0;
  const double s = (r - 0.25 * R) / (0.25 * R);
  return -(30.0 * s * s - 60.0 * s * s * s + 30.0 * s * s * s * s) / (0.25 * R);
}

double AsymptoticsContext::profile(double eps, double r) const {
  const double half = 0.5 * (sweep.exps.N - 2.0);
  return cutoff(r) * std::pow(eps + r * r, -half);
}

double AsymptoticsContext::profile_derivative(double eps, double r) const {
  const double half = 0.5 * (sweep.exps.N - 2.0);
  const double base = std::pow(eps + r * r, -half);
  const double dbase = -2.0 * half * r * std::pow(eps + r * r, -half - 1.0);
  return cutoff_derivative(r) * base + cutoff(r) * dbase;
}

AsymptoticsContext make_asymptotics_context(const AsymptoticsSweep& sweep) {
  if (sweep.epsilons.empty()) {
    throw std::invalid_argument("asymptotics: empty epsilon sweep");
  }
  for (std::size_t i = 0; i + 1 < sweep.epsilons.size(); ++i) {
    if (!(sweep.epsilons[i] > sweep.epsilons[i + 1])) {
      throw std::invalid_argument("asymptotics: epsilons must decrease strictly");
    }
  }
  if (!(sweep.epsilons.back() > 0.0)) {
    throw std::invalid_argument("asymptotics: epsilons must be positive");
  }
  const int N = sweep.exps.N;
  const double R = sweep.flatness.radius_R;
  const double eps_min = sweep.epsilons.back();
  if (0.5 * R * 0.5 * R < eps_min) {
    throw std::invalid_argument("asymptotics: chart too small for the sweep");
  }

  AsymptoticsContext ctx;
  ctx.sweep = sweep;
  DomainOptions opt;
  opt.radial_stretch = sweep.ball_stretch;
  ctx.half_ball = std::make_shared<GridDomain>(
      make_domain(DomainKind::radial_half_ball, N, {0.0}, {R}, {sweep.ball_nodes},
                  sweep.flatness, opt));
  ctx.ball = std::make_shared<GridDomain>(
      make_domain(DomainKind::radial_ball, N, {0.0}, {R}, {sweep.ball_nodes}, {}, opt));

  DomainOptions popt;
  popt.radial_stretch = 6.0;
  ctx.plane = std::make_shared<GridDomain>(make_domain(
      DomainKind::radial_ball, N - 1, {0.0}, {0.5 * R}, {sweep.plane_nodes}, {}, popt));

  const double M_min = 0.25 * R / std::sqrt(eps_min);
  DomainOptions topt;
  topt.radial_stretch = 10.0;
  ctx.tails = std::make_shared<GridDomain>(make_domain(
      DomainKind::radial_ball, N, {0.0}, {32.0 * M_min}, {sweep.tail_nodes}, {}, topt));

  ctx.newton = std::fabs(sweep.exps.mu - (N - 2.0)) < 1e-12;
  if (!ctx.newton) {
    ctx.ball_table = build_radial_kernel_table(*ctx.ball, sweep.exps.mu);
    ctx.tails_table = build_radial_kernel_table(*ctx.tails, sweep.exps.mu);
  }
  // the Sigma x Sigma reduction lives in dimension N-1
  const bool plane_newton =
      (N - 1 >= 3) && std::fabs(sweep.exps.mu - (N - 3.0)) < 1e-12;
  if (sweep.flatness.coefficient != 0.0 && sweep.exps.mu < N - 1.0 - 1e-9 &&
      !plane_newton) {
    ctx.plane_table = build_radial_kernel_table(*ctx.plane, sweep.exps.mu);
  }

  // whole-space integrals of the raw profile utilde = (1+r^2)^{-(N-2)/2}
  const double area = unit_sphere_area(N);
  const double half = 0.5 * (N - 2.0);
  auto grad2 = [&](double r) {
    const double du = -2.0 * half * r * std::pow(1.0 + r * r, -half - 1.0);
    return area * du * du * std::pow(r, N - 1.0);
  };
  ctx.grad_whole = integrate_radial_tail(grad2, 1.0, N - 1.0, 8.0 * area * half * half);
  if (N >= 5) {
    auto l2 = [&](double r) {
      return area * std::pow(1.0 + r * r, -(N - 2.0)) * std::pow(r, N - 1.0);
    };
    ctx.l2_whole = integrate_radial_tail(l2, 1.0, N - 3.0, 4.0 * area);
  }

  {
    // ||utilde||_0^{2 2*_mu} on a large ball (controlled truncation)
    DomainOptions wopt;
    wopt.radial_stretch = 10.0;
    auto big = std::make_shared<GridDomain>(make_domain(
        DomainKind::radial_ball, N, {0.0}, {4096.0}, {sweep.tail_nodes}, {}, wopt));
    GridFunction dens = GridFunction::sample_radial(big, [&](double r) {
      return std::pow(1.0 + r * r, -0.5 * (2.0 * N - sweep.exps.mu));
    });
    ChoquardOptions copts;
    RadialKernelTable big_table;
    if (!ctx.newton) {
      big_table = build_radial_kernel_table(*big, sweep.exps.mu);
      copts.table = &big_table;
    }
    ctx.choq_whole = bilinear_riesz(dens, dens, sweep.exps.mu, copts);
  }
  return ctx;
}

GridFunction cutoff_bubble(const AsymptoticsContext& ctx, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("cutoff_bubble: eps <= 0");
  return GridFunction::sample_radial(ctx.half_ball,
                                     [&](double r) { return ctx.profile(eps, r); });
}

namespace {

// int_Sigma h(|x|) dx by the thin layer: int over the chart disc of
// rho(x') h(|x'|) dx', with rho = c |x'|^k.
double sigma_layer_integral(const AsymptoticsContext& ctx,
                            const std::function<double(double)>& h) {
  const auto& f = ctx.sweep.flatness;
  if (f.coefficient == 0.0) return 0.0;
  const int Np = ctx.sweep.exps.N - 1;
  const double ang = (Np == 1) ? 2.0 : unit_sphere_area(Np);
  auto g = [&](double t) {
    return ang * f.coefficient * std::pow(t, f.order_k + Np - 1.0) * h(t);
  };
  return integrate_gauss_panels(g, 0.0, 0.25 * f.radius_R, 64) +
         integrate_gauss_panels(g, 0.25 * f.radius_R, 0.5 * f.radius_R, 32);
}

}  // namespace

TermEstimate gradient_term(const AsymptoticsContext& ctx, double eps) {
  const int N = ctx.sweep.exps.N;
  const double R = ctx.sweep.flatness.radius_R;
  const double area = unit_sphere_area(N);
  if (!(eps > 0.0) || std::sqrt(eps) > 0.5 * R) {
    throw std::invalid_argument("gradient_term: eps too large for the chart");
  }

  TermEstimate out;
  auto g2 = [&](double r) {
    const double du = ctx.profile_derivative(eps, r);
    return area * du * du * std::pow(r, N - 1.0);
  };
  const double core = std::min(std::sqrt(eps), 0.25 * R);
  const double full = integrate_gauss_panels(g2, 0.0, core, 48) +
                      integrate_log_panels(g2, core, 0.5 * R, 96);
  out.half_ball = 0.5 * full;
  out.sigma_correction = sigma_layer_integral(ctx, [&](double t) {
    const double du = ctx.profile_derivative(eps, t);
    return du * du;
  });
  out.value = out.half_ball - out.sigma_correction;
  out.leading = ctx.grad_whole / (2.0 * std::pow(eps, 0.5 * (N - 2.0)));
  return out;
}

TermEstimate l2_term(const AsymptoticsContext& ctx, double eps) {
  const int N = ctx.sweep.exps.N;
  const double R = ctx.sweep.flatness.radius_R;
  const double area = unit_sphere_area(N);

  TermEstimate out;
  auto f2 = [&](double r) {
    const double u = ctx.profile(eps, r);
    return area * u * u * std::pow(r, N - 1.0);
  };
  const double core = std::min(std::sqrt(eps), 0.25 * R);
  const double full = integrate_gauss_panels(f2, 0.0, core, 48) +
                      integrate_log_panels(f2, core, 0.5 * R, 96);
  out.half_ball = 0.5 * full;
  out.sigma_correction = sigma_layer_integral(ctx, [&](double t) {
    const double u = ctx.profile(eps, t);
    return u * u;
  });
  out.value = out.half_ball - out.sigma_correction;
  if (N == 4) {
    // honest half-ball coefficient: |S^3|/4 per unit of |log eps|
    out.leading = 0.25 * area * std::fabs(std::log(eps));
  } else {
    out.leading = ctx.l2_whole / (2.0 * std::pow(eps, 0.5 * (N - 4.0)));
  }
  return out;
}

std::pair<double, double> tail_integrals_DE(const AsymptoticsContext& ctx,
                                            double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("tail_integrals_DE: eps <= 0");
  const int N = ctx.sweep.exps.N;
  const double M = 0.25 * ctx.sweep.flatness.radius_R / std::sqrt(eps);
  const double power = 0.5 * (2.0 * N - ctx.sweep.exps.mu);

  auto dens = [&](double r) { return std::pow(1.0 + r * r, -power); };
  GridFunction inner = GridFunction::sample_radial(
      ctx.tails, [&](double r) { return r < M ? dens(r) : 0.0; });
  GridFunction outer = GridFunction::sample_radial(
      ctx.tails, [&](double r) { return r >= M ? dens(r) : 0.0; });

  ChoquardOptions copts;
  if (!ctx.newton) copts.table = &ctx.tails_table;
  const double D = bilinear_riesz(outer, inner, ctx.sweep.exps.mu, copts);
  const double E = bilinear_riesz(outer, outer, ctx.sweep.exps.mu, copts);
  return {D, E};
}

ChoquardEstimate choquard_lower_bound(const AsymptoticsContext& ctx, double eps) {
  const auto& exps = ctx.sweep.exps;
  const int N = exps.N;
  const double p = exps.two_star_mu;

  ChoquardEstimate out;
  GridFunction u_ball = GridFunction::sample_radial(
      ctx.ball, [&](double r) { return ctx.profile(eps, r); });
  GridFunction dens = u_ball.pow(p);

  ChoquardOptions copts;
  if (!ctx.newton) copts.table = &ctx.ball_table;
  const double full = bilinear_riesz(dens, dens, exps.mu, copts);
  out.quarter_ball = 0.25 * full;

  // Sigma x B cross term via the thin layer against the full-ball potential
  GridFunction pot = riesz_potential(dens, exps.mu, copts);
  out.cross_sigma = sigma_layer_integral(ctx, [&](double t) {
    const double u = ctx.profile(eps, t);
    return std::pow(u, p) * interp_radial(*ctx.ball, pot.values(), t);
  });

  // Sigma x Sigma pair via the (N-1)-dimensional reduction
  if (ctx.sweep.flatness.coefficient != 0.0 && exps.mu < N - 1.0 - 1e-9) {
    const auto& f = ctx.sweep.flatness;
    GridFunction layer = GridFunction::sample_radial(ctx.plane, [&](double t) {
      return f.coefficient * std::pow(t, f.order_k) *
             std::pow(ctx.profile(eps, t), p);
    });
    ChoquardOptions pc;
    if (!ctx.plane_table.nodes.empty()) pc.table = &ctx.plane_table;
    out.sigma_sigma = bilinear_riesz(layer, layer, exps.mu, pc);
  }

  out.value = out.quarter_ball - out.cross_sigma + out.sigma_sigma;
  out.leading = ctx.choq_whole / (4.0 * std::pow(eps, 0.5 * (2.0 * N - exps.mu)));
  return out;
}

std::vector<CurvePoint> quotient_curve(const AsymptoticsContext& ctx) {
  const auto& s = ctx.sweep;
  const double thr = half_domain_threshold(s.exps);
  const int N = s.exps.N;
  const double k = s.flatness.order_k;

  std::vector<CurvePoint> pts;
  for (double eps : s.epsilons) {
    const TermEstimate g = gradient_term(ctx, eps);
    const TermEstimate l2 = l2_term(ctx, eps);
    const ChoquardEstimate c = choquard_lower_bound(ctx, eps);
    const auto de = tail_integrals_DE(ctx, eps);

    CurvePoint p;
    p.epsilon = eps;
    p.grad_term = g.value;
    p.l2_term = l2.value;
    p.choquard = c.value;
    p.D = de.first;
    p.E = de.second;
    const double numerator = g.value - s.lambda * s.alpha0 * l2.value;
    p.Q = numerator / std::pow(c.value, 1.0 / s.exps.two_star_mu);
    p.threshold = thr;
    p.below_gate = p.Q < thr;
    p.predicted_bound = thr;  // refined below once the constants are fitted
    pts.push_back(p);
  }

  // Case I (k <= N+1) or Case II (k > N+1) rate for the Sigma correction;
  // the two coincide at k = N+1.
  const double mu = s.exps.mu;
  const double gamma_sigma = (k <= N + 1.0)
                                 ? (k - 1.0) * (2.0 * N - mu) / (4.0 * N)
                                 : (2.0 * N - mu) / 4.0;
  const double gamma_grad = 0.5 * (N - 2.0);

  // least-squares fit of Q - thr against the case basis
  const std::size_t n = pts.size();
  const int m = 3;
  std::vector<double> AtA(m * m, 0.0), Atb(m, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double e = pts[i].epsilon;
    const double basis[3] = {
        std::pow(e, gamma_sigma), std::pow(e, gamma_grad),
        (N == 4) ? -s.lambda * e * std::fabs(std::log(e)) : -s.lambda * e};
    const double y = pts[i].Q - thr;
    for (int a = 0; a < m; ++a) {
      Atb[a] += basis[a] * y;
      for (int b = 0; b < m; ++b) AtA[a * m + b] += basis[a] * basis[b];
    }
  }
  std::vector<double> coef(m, 0.0);
  {
    // tiny normal equations; plain Gaussian elimination
    std::vector<double> A = AtA, b = Atb;
    for (int kk = 0; kk < m; ++kk) {
      int piv = kk;
      for (int i = kk + 1; i < m; ++i) {
        if (std::fabs(A[i * m + kk]) > std::fabs(A[piv * m + kk])) piv = i;
      }
      if (A[piv * m + kk] == 0.0) continue;
      for (int j = 0; j < m; ++j) std::swap(A[kk * m + j], A[piv * m + j]);
      std::swap(b[kk], b[piv]);
      for (int i = kk + 1; i < m; ++i) {
        const double f = A[i * m + kk] / A[kk * m + kk];
        for (int j = kk; j < m; ++j) A[i * m + j] -= f * A[kk * m + j];
        b[i] -= f * b[kk];
      }
    }
    for (int i = m - 1; i >= 0; --i) {
      double sum = b[i];
      for (int j = i + 1; j < m; ++j) sum -= A[i * m + j] * coef[j];
      coef[i] = (A[i * m + i] != 0.0) ? sum / A[i * m + i] : 0.0;
    }
  }
  for (auto& p : pts) {
    const double e = p.epsilon;
    const double lam_term = (N == 4) ? -s.lambda * e * std::fabs(std::log(e))
                                     : -s.lambda * e;
    p.predicted_bound = thr + coef[0] * std::pow(e, gamma_sigma) +
                        coef[1] * std::pow(e, gamma_grad) + coef[2] * lam_term;
  }
  return pts;
}

RateFit fit_rate(const std::vector<std::pair<double, double>>& series) {
  if (series.size() < 4) throw std::invalid_argument("fit_rate: need >= 4 points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  const double n = static_cast<double>(series.size());
  for (const auto& [eps, value] : series) {
    if (!(eps > 0.0) || !(value > 0.0)) {
      throw std::invalid_argument("fit_rate: nonpositive point");
    }
    const double x = std::log(eps);
    const double y = std::log(value);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
  }
  RateFit fit;
  const double denom = n * sxx - sx * sx;
  fit.slope = (n * sxy - sx * sy) / denom;
  const double ss_tot = syy - sy * sy / n;
  const double ss_res = ss_tot - fit.slope * (sxy - sx * sy / n);
  fit.r_squared = (ss_tot > 0.0) ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

}  // namespace choqlab
