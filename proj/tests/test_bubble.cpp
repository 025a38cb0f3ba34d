#include <doctest.h>

#include <cmath>
#include <memory>

#include "choqlab/bubble.hpp"
#include "choqlab/riesz.hpp"

using namespace choqlab;

TEST_CASE("bubble evaluation: center value, tail, dilation rule") {
  const BubbleSpec s1 = make_bubble_spec(4, 1.0, {0.2, 0.0, 0.0, 0.0});
  const BubbleSpec s01 = make_bubble_spec(4, 0.1, {0.2, 0.0, 0.0, 0.0});

  // U_eps(x0) = eps^{-(N-2)/2} u*(0)
  const double ustar0 = 1.0 / s1.l2star_norm;  // utilde(0)=1, before dilation
  CHECK(bubble_eval(s01, {0.2, 0.0, 0.0, 0.0}) ==
        doctest::Approx(std::pow(0.1, -1.0) * ustar0).epsilon(1e-13));

  // power-law tail: U_1(x) |x-x0|^{N-2} approaches a constant
  const double t1 = bubble_eval(s1, {100.2, 0, 0, 0}) * std::pow(100.0, 2.0);
  const double t2 = bubble_eval(s1, {400.2, 0, 0, 0}) * std::pow(400.0, 2.0);
  CHECK(t1 == doctest::Approx(t2).epsilon(1e-3));

  // dilation identity U_eps(x0 + eps z) = eps^{-(N-2)/2} U_1(x0 + z)
  const double z = 0.7;
  CHECK(bubble_eval(s01, {0.2 + 0.1 * z, 0, 0, 0}) ==
        doctest::Approx(std::pow(0.1, -1.0) * bubble_eval(s1, {0.2 + z, 0, 0, 0}))
            .epsilon(1e-13));

  CHECK_THROWS(make_bubble_spec(4, 0.0));
  CHECK_THROWS(make_bubble_spec(2, 1.0));
}

TEST_CASE("sobolev constant: quadrature matches the closed form") {
  CHECK(sobolev_constant(4) == doctest::Approx(10.260399).epsilon(1e-5));
  CHECK(sobolev_constant(5) == doctest::Approx(14.811912).epsilon(1e-5));
  for (int N : {4, 5, 6}) {
    CHECK(sobolev_constant(N) ==
          doctest::Approx(sobolev_constant_closed_form(N)).epsilon(1e-8));
  }
}

TEST_CASE("bubble identity: both integrals equal S^{N/2} for every eps") {
  const double SN2 = std::pow(sobolev_constant(4), 2.0);
  double q_prev = 0.0;
  for (double eps : {1.0, 0.1}) {
    const BubbleSpec spec = make_bubble_spec(4, eps);
    const double g = bubble_gradient_integral(spec);
    const double c = bubble_critical_integral(spec);
    CHECK(g == doctest::Approx(SN2).epsilon(1e-8));
    CHECK(g / c == doctest::Approx(1.0).epsilon(1e-8));
    // eps-independence of the quotient
    const double q = g / std::pow(c, 0.5);
    if (q_prev != 0.0) CHECK(q == doctest::Approx(q_prev).epsilon(1e-8));
    q_prev = q;
  }
}

TEST_CASE("hls sharp constant: closed form and mu -> 0 limit") {
  const auto e42 = critical_exponents(4, 2.0);
  CHECK(hls_sharp_constant(e42) == doctest::Approx(3.8476495).epsilon(1e-6));
  // C(4,2) = (pi/2) sqrt(6)
  CHECK(hls_sharp_constant(e42) ==
        doctest::Approx(0.5 * M_PI * std::sqrt(6.0)).epsilon(1e-12));

  // kernel degenerates to 1: C -> 1
  const auto e_small = critical_exponents(4, 1e-9);
  CHECK(hls_sharp_constant(e_small) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("hls ratio on truncated bubbles brackets C(N, mu) from below") {
  const auto exps = critical_exponents(4, 2.0);
  const double C = hls_sharp_constant(exps);
  const double t = 2.0 * exps.N / (2.0 * exps.N - exps.mu);

  double prev = 0.0;
  for (double radius : {10.0, 50.0}) {
    auto ball = std::make_shared<GridDomain>(make_domain(
        DomainKind::radial_ball, 4, {0.0}, {radius}, {2400}));
    const GridFunction f = GridFunction::sample_radial(ball, [&](double r) {
      return std::pow(1.0 + r * r, -3.0);  // utilde^{2*_mu}
    });
    const double ratio = hls_ratio(f, f, t, t, exps);
    CHECK(ratio < C * (1.0 + 1e-3));
    CHECK(ratio > prev);  // grows toward C with the truncation radius
    prev = ratio;
  }
  CHECK(prev >= 0.97 * C);
}

TEST_CASE("s_h constant: composition and bubble quotient consistency") {
  const auto e42 = critical_exponents(4, 2.0);
  const double sh = s_h_constant(e42);
  CHECK(sh == doctest::Approx(sobolev_constant(4) /
                              std::pow(hls_sharp_constant(e42), 1.0 / 3.0))
                  .epsilon(1e-12));
  CHECK(sh == doctest::Approx(6.547855).epsilon(1e-5));

  // threshold for N=4, mu=2 equals S_H / 2^{1/3}
  CHECK(half_domain_threshold(e42) ==
        doctest::Approx(sh / std::pow(2.0, 1.0 / 3.0)).epsilon(1e-13));

  // bubble quotient int |grad u|^2 / ||u||_0^2 approaches S_H on a large ball
  auto ball = std::make_shared<GridDomain>(make_domain(
      DomainKind::radial_ball, 4, {0.0}, {600.0}, {3000}));
  const GridFunction dens = GridFunction::sample_radial(ball, [](double r) {
    return std::pow(1.0 + r * r, -3.0);  // utilde^{2*_mu}
  });
  const double choq = bilinear_riesz(dens, dens, 2.0);
  const double grad_whole = 4.0 * M_PI * M_PI / 3.0;  // int |grad utilde|^2
  const double q = grad_whole / std::pow(choq, 1.0 / 3.0);
  CHECK(q == doctest::Approx(sh).epsilon(0.02));
}

TEST_CASE("s_h monotone decreasing in mu") {
  double prev = 1e300;
  for (double mu : {0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5}) {
    const double v = s_h_constant(critical_exponents(4, mu));
    CHECK(v < prev);
    prev = v;
  }
}

TEST_CASE("beta tail integrals") {
  const auto e4 = critical_exponents(4, 2.0);
  const double total = beta_integral_closed_form(4);
  CHECK(total == doctest::Approx(1.0 / 12.0).epsilon(1e-14));

  for (double cutoff : {0.5, 1.0, 7.0}) {
    const auto [head, tail] = beta_tail_integrals(e4, cutoff);
    CHECK(head + tail == doctest::Approx(total).epsilon(1e-10));
  }

  const auto [h0, t0] = beta_tail_integrals(e4, 0.0);
  CHECK(h0 == 0.0);
  CHECK(t0 == doctest::Approx(total).epsilon(1e-10));

  // tail(cutoff) * cutoff^N approaches a constant (integrand ~ r^{-N-1})
  const auto [h1, t1] = beta_tail_integrals(e4, 50.0);
  const auto [h2, t2] = beta_tail_integrals(e4, 200.0);
  (void)h1;
  (void)h2;
  CHECK(t1 * std::pow(50.0, 4) ==
        doctest::Approx(t2 * std::pow(200.0, 4)).epsilon(5e-3));
}

TEST_CASE("talenti bubble obeys the HLS bound against |u|_{2*}") {
  // ||u||_0^2 <= C(N,mu)^{1/2*_mu} |u|_{2*}^2 with near-equality for bubbles
  const auto exps = critical_exponents(4, 2.0);
  auto ball = std::make_shared<GridDomain>(make_domain(
      DomainKind::radial_ball, 4, {0.0}, {400.0}, {2400}));
  const GridFunction u = GridFunction::sample_radial(ball, [](double r) {
    return std::pow(1.0 + r * r, -1.0);
  });
  const double norm0_sq = choquard_norm_sq(u, exps);
  const double crit = integrate_pow(u, exps.two_star);
  const double bound =
      std::pow(hls_sharp_constant(exps), 1.0 / exps.two_star_mu) *
      std::pow(crit, 2.0 / exps.two_star);
  CHECK(norm0_sq <= bound * (1.0 + 1e-3));
  CHECK(norm0_sq >= 0.97 * bound);
}
