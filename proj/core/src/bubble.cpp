#include "choqlab/bubble.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

#include "choqlab/quadrature.hpp"

namespace choqlab {

namespace {

// |utilde|_{2*}^{2*} = |S^{N-1}| int r^{N-1}(1+r^2)^{-N} dr, closed via the
// beta function.
double utilde_crit_integral(int N) {
  return unit_sphere_area(N) * beta_integral_closed_form(N);
}

double radial_center_distance(const BubbleSpec& spec, const std::vector<double>& x) {
  double d2 = 0.0;
  for (std::size_t a = 0; a < x.size(); ++a) {
    const double c = a < spec.center.size() ? spec.center[a] : 0.0;
    const double t = x[a] - c;
    d2 += t * t;
  }
  return std::sqrt(d2);
}

}  // namespace

double beta_integral_closed_form(int N) {
  return std::exp(2.0 * std::lgamma(0.5 * N) - std::lgamma(N)) * 0.5;
}

double sobolev_constant_closed_form(int N) {
  return M_PI * N * (N - 2.0) *
         std::pow(std::exp(std::lgamma(0.5 * N) - std::lgamma(N)), 2.0 / N);
}

BubbleSpec make_bubble_spec(int N, double epsilon, std::vector<double> center) {
  if (N < 3) throw std::domain_error("make_bubble_spec: N must be >= 3");
  if (!(epsilon > 0.0)) throw std::invalid_argument("make_bubble_spec: epsilon <= 0");
  BubbleSpec s;
  s.N = N;
  s.epsilon = epsilon;
  s.center = std::move(center);
  s.l2star_norm = std::pow(utilde_crit_integral(N), (N - 2.0) / (2.0 * N));
  s.sobolev_S = sobolev_constant_closed_form(N);
  return s;
}

double bubble_profile(const BubbleSpec& spec, double r) {
  // U_eps(r) = eps^{-(N-2)/2} ubar(r / (eps sqrt(S)))
  const double half = 0.5 * (spec.N - 2.0);
  const double z = r / (spec.epsilon * std::sqrt(spec.sobolev_S));
  const double ut = spec.alpha * std::pow(spec.beta * spec.beta + z * z, -half);
  return std::pow(spec.epsilon, -half) * ut / spec.l2star_norm;
}

double bubble_profile_derivative(const BubbleSpec& spec, double r) {
  const double half = 0.5 * (spec.N - 2.0);
  const double scale = spec.epsilon * std::sqrt(spec.sobolev_S);
  const double z = r / scale;
  const double base = spec.beta * spec.beta + z * z;
  const double dut = spec.alpha * (-half) * std::pow(base, -half - 1.0) * 2.0 * z / scale;
  return std::pow(spec.epsilon, -half) * dut / spec.l2star_norm;
}

double bubble_eval(const BubbleSpec& spec, const std::vector<double>& x) {
  return bubble_profile(spec, radial_center_distance(spec, x));
}

double bubble_gradient_integral(const BubbleSpec& spec) {
  const int N = spec.N;
  const double area = unit_sphere_area(N);
  auto f = [&](double r) {
    const double du = bubble_profile_derivative(spec, r);
    return area * du * du * std::pow(r, N - 1.0);
  };
  // |grad U|^2 r^{N-1} ~ C r^{-(N-1)} for large r
  const double dil = spec.epsilon * std::sqrt(spec.sobolev_S);
  const double scale = std::max(1.0, dil);
  const double amp = std::pow(spec.epsilon, -(N - 2.0)) * std::pow(dil, 2.0 * (N - 2.0)) *
                     (N - 2.0) * (N - 2.0) / (spec.l2star_norm * spec.l2star_norm);
  return integrate_radial_tail(f, scale, N - 1.0, 4.0 * area * amp);
}

double bubble_critical_integral(const BubbleSpec& spec) {
  const int N = spec.N;
  const double area = unit_sphere_area(N);
  const double p = 2.0 * N / (N - 2.0);
  auto f = [&](double r) {
    return area * std::pow(bubble_profile(spec, r), p) * std::pow(r, N - 1.0);
  };
  const double dil = spec.epsilon * std::sqrt(spec.sobolev_S);
  const double scale = std::max(1.0, dil);
  const double amp = std::pow(dil, 2.0 * N) * std::pow(spec.epsilon, -static_cast<double>(N)) /
                     std::pow(spec.l2star_norm, p);
  return integrate_radial_tail(f, scale, N + 1.0, 4.0 * area * amp);
}

double sobolev_constant(int N) {
  if (N < 3) throw std::domain_error("sobolev_constant: N must be >= 3");
  static std::mutex m;
  static std::map<int, double> cache;
  {
    std::lock_guard<std::mutex> lock(m);
    auto it = cache.find(N);
    if (it != cache.end()) return it->second;
  }

  // Rayleigh quotient of utilde by radial quadrature.
  const double area = unit_sphere_area(N);
  const double half = 0.5 * (N - 2.0);
  auto grad2 = [&](double r) {
    const double du = -2.0 * half * r * std::pow(1.0 + r * r, -half - 1.0);
    return area * du * du * std::pow(r, N - 1.0);
  };
  auto crit = [&](double r) {
    return area * std::pow(1.0 + r * r, -static_cast<double>(N)) * std::pow(r, N - 1.0);
  };
  const double ig = integrate_radial_tail(grad2, 1.0, N - 1.0, 8.0 * area * half * half);
  const double ic = integrate_radial_tail(crit, 1.0, N + 1.0, 4.0 * area);
  const double quotient = ig / std::pow(ic, (N - 2.0) / static_cast<double>(N));

  const double closed = sobolev_constant_closed_form(N);
  if (std::fabs(quotient - closed) > 1e-7 * closed) {
    throw std::runtime_error("sobolev_constant: quadrature did not converge");
  }
  std::lock_guard<std::mutex> lock(m);
  cache[N] = quotient;
  return quotient;
}

double hls_sharp_constant(const ChoquardExponents& exps) {
  const double N = exps.N;
  const double mu = exps.mu;
  const double lg = std::lgamma(0.5 * (N - mu)) - std::lgamma(N - 0.5 * mu);
  const double ratio = std::lgamma(0.5 * N) - std::lgamma(N);
  return std::pow(M_PI, 0.5 * mu) * std::exp(lg) *
         std::exp((-1.0 + mu / N) * ratio);
}

double s_h_constant(const ChoquardExponents& exps) {
  static std::mutex m;
  static std::map<std::pair<int, double>, double> cache;
  {
    std::lock_guard<std::mutex> lock(m);
    auto it = cache.find({exps.N, exps.mu});
    if (it != cache.end()) return it->second;
  }
  const double v = sobolev_constant(exps.N) /
                   std::pow(hls_sharp_constant(exps), 1.0 / exps.two_star_mu);
  std::lock_guard<std::mutex> lock(m);
  cache[{exps.N, exps.mu}] = v;
  return v;
}

double half_domain_threshold(const ChoquardExponents& exps) {
  return s_h_constant(exps) /
         std::pow(2.0, (exps.two_star_mu - 2.0) / exps.two_star_mu);
}

std::pair<double, double> beta_tail_integrals(const ChoquardExponents& exps,
                                              double cutoff) {
  if (!(cutoff >= 0.0)) throw std::invalid_argument("beta_tail_integrals: cutoff < 0");
  const int N = exps.N;
  auto f = [&](double r) {
    return std::pow(r, N - 1.0) * std::pow(1.0 + r * r, -static_cast<double>(N));
  };
  double head = 0.0;
  if (cutoff > 0.0) {
    head = integrate_gauss_panels(f, 0.0, std::min(cutoff, 1.0), 64);
    if (cutoff > 1.0) head += integrate_log_panels(f, 1.0, cutoff, 48);
  }
  // tail decays like r^{-N-1}
  double tail = 0.0;
  {
    const double start = std::max(cutoff, 1e-8);
    double lo = start;
    for (int dec = 0; dec < 40; ++dec) {
      const double hi = lo * 10.0;
      tail += integrate_log_panels(f, lo, hi, 48);
      lo = hi;
      const double bound = std::pow(lo, -static_cast<double>(N)) / N;
      if (bound <= 1e-14 * std::max(tail + head, 1e-300)) break;
    }
    if (cutoff == 0.0) {
      // the [0, start] sliver
      tail += integrate_gauss_panels(f, 0.0, start, 4);
    }
  }
  return {head, tail};
}

ConstantsRow derived_constants(const ChoquardExponents& exps) {
  ConstantsRow row;
  row.N = exps.N;
  row.mu = exps.mu;
  row.S = sobolev_constant(exps.N);
  row.C = hls_sharp_constant(exps);
  row.S_H = s_h_constant(exps);
  row.threshold = half_domain_threshold(exps);
  return row;
}

}  // namespace choqlab
