#include "choqlab/quadrature.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace choqlab {

namespace {

double simpson(double a, double fa, double b, double fb, double fm) {
  return (b - a) * (fa + 4.0 * fm + fb) / 6.0;
}

double adaptive_rec(const Integrand& f, double a, double fa, double b, double fb,
                    double m, double fm, double whole, double eps, int depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson(a, fa, m, fm, flm);
  const double right = simpson(m, fm, b, fb, frm);
  const double diff = left + right - whole;
  if (depth <= 0 || std::fabs(diff) < 15.0 * eps) {
    return left + right + diff / 15.0;
  }
  return adaptive_rec(f, a, fa, m, fm, lm, flm, left, 0.5 * eps, depth - 1) +
         adaptive_rec(f, m, fm, b, fb, rm, frm, right, 0.5 * eps, depth - 1);
}

// 8-point Gauss-Legendre nodes/weights on [-1,1].
constexpr double kGl8X[4] = {0.1834346424956498, 0.5255324099163290,
                             0.7966664774136267, 0.9602898564975363};
constexpr double kGl8W[4] = {0.3626837833783620, 0.3137066458778873,
                             0.2223810344533745, 0.1012285362903763};

}  // namespace

double integrate_adaptive(const Integrand& f, double a, double b, double eps) {
  if (a == b) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a), fb = f(b), fm = f(m);
  const double whole = simpson(a, fa, b, fb, fm);
  return adaptive_rec(f, a, fa, b, fb, m, fm, whole, eps, 48);
}

double integrate_tanh_sinh(const Integrand& f, double a, double b, double eps,
                           int max_level) {
  if (a == b) return 0.0;
  // Map (a,b) -> (-1,1), then x = tanh(pi/2 sinh t).
  const double c = 0.5 * (b - a);
  const double d = 0.5 * (b + a);
  const double tmax = 3.8;  // cosh cutoff keeps weights above ~1e-17

  auto eval = [&](double t) -> double {
    const double s = std::sinh(t);
    const double x = std::tanh(0.5 * M_PI * s);
    const double w = 0.5 * M_PI * std::cosh(t) / std::pow(std::cosh(0.5 * M_PI * s), 2);
    const double xx = d + c * x;
    if (xx <= a || xx >= b) return 0.0;  // clamp against rounding at endpoints
    const double v = f(xx);
    return std::isfinite(v) ? v * w : 0.0;
  };

  double h = 1.0;
  double sum = eval(0.0);
  for (double t = h; t <= tmax; t += h) sum += eval(t) + eval(-t);
  double prev = sum * h * c;

  for (int level = 1; level <= max_level; ++level) {
    h *= 0.5;
    double add = 0.0;
    for (double t = h; t <= tmax; t += 2.0 * h) add += eval(t) + eval(-t);
    sum += add;
    const double cur = sum * h * c;
    if (level >= 3 && std::fabs(cur - prev) <= eps * (std::fabs(cur) + 1e-300)) {
      return cur;
    }
    prev = cur;
  }
  return prev;
}

double integrate_gauss_panels(const Integrand& f, double a, double b, int panels) {
  if (panels < 1) throw std::invalid_argument("integrate_gauss_panels: panels < 1");
  const double h = (b - a) / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    const double half = 0.5 * h;
    double s = 0.0;
    for (int k = 0; k < 4; ++k) {
      s += kGl8W[k] * (f(mid + half * kGl8X[k]) + f(mid - half * kGl8X[k]));
    }
    total += s * half;
  }
  return total;
}

double integrate_log_panels(const Integrand& f, double a, double b,
                            int panels_per_decade) {
  if (!(a > 0.0) || !(b > a)) {
    throw std::invalid_argument("integrate_log_panels: need 0 < a < b");
  }
  // Integrate in u = log r with Gauss panels.
  const double ua = std::log(a), ub = std::log(b);
  const int panels = std::max(1, static_cast<int>(std::ceil(
                                    (ub - ua) / std::log(10.0) * panels_per_decade)));
  auto g = [&](double u) {
    const double r = std::exp(u);
    return f(r) * r;
  };
  return integrate_gauss_panels(g, ua, ub, panels);
}

double integrate_radial_tail(const Integrand& f, double scale, double decay,
                             double tail_coeff, double eps_tail) {
  if (!(decay > 1.0)) throw std::invalid_argument("integrate_radial_tail: decay <= 1");
  if (!(scale > 0.0)) throw std::invalid_argument("integrate_radial_tail: scale <= 0");

  // Head over [0, scale], then log panels out to a cutoff where the power-law
  // tail bound drops below eps_tail of the running head.
  double head = integrate_gauss_panels(f, 0.0, scale, 64);
  double lo = scale;
  double total = head;
  for (int dec = 0; dec < 40; ++dec) {
    const double hi = lo * 10.0;
    total += integrate_log_panels(f, lo, hi, 48);
    lo = hi;
    const double tail_bound = tail_coeff * std::pow(lo, 1.0 - decay) / (decay - 1.0);
    if (tail_bound <= eps_tail * std::max(std::fabs(total), 1e-300)) {
      return total;
    }
  }
  throw std::runtime_error("integrate_radial_tail: tail bound not reached");
}

}  // namespace choqlab
