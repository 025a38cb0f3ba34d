#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <memory>

#include "choqlab/bubble.hpp"
#include "choqlab/exponents.hpp"
#include "choqlab/quadrature.hpp"
#include "choqlab/riesz.hpp"
#include "choqlab/rng.hpp"

using namespace choqlab;

namespace {

std::shared_ptr<const GridDomain> interval(int res) {
  return std::make_shared<GridDomain>(
      make_domain(DomainKind::box, 1, {0.0}, {1.0}, {res}));
}

// Reference angular kernel: tanh-sinh on the cosine variable, a different
// substitution and rule than the production dyadic-panel evaluator. Good to
// about 1e-8 relative (double-precision endpoint limit).
double angular_kernel_reference(int N, double mu, double r, double s) {
  const double A = r * r + s * s;
  const double B = 2.0 * r * s;
  const double half_exp = 0.5 * (N - 3.0);
  auto f = [&](double t) {
    return std::pow(A - B * t, -0.5 * mu) * std::pow(1.0 - t * t, half_exp);
  };
  return unit_sphere_area(N - 1) * integrate_tanh_sinh(f, -1.0, 1.0, 1e-12, 12);
}

}  // namespace

TEST_CASE("angular kernel closed forms and symmetries") {
  // symmetry and axis value
  CHECK(angular_kernel(3, 1.2, 0.7, 1.9) ==
        doctest::Approx(angular_kernel(3, 1.2, 1.9, 0.7)).epsilon(1e-13));
  CHECK(angular_kernel(4, 1.5, 0.0, 2.0) ==
        doctest::Approx(unit_sphere_area(4) * std::pow(2.0, -1.5)).epsilon(1e-13));
  // mu -> 0 limit
  CHECK(angular_kernel(5, 0.0, 0.3, 0.9) == doctest::Approx(unit_sphere_area(5)));

  // Newton case mu = N-2: spherical mean sits at the larger radius
  for (int N : {3, 4, 5, 6}) {
    const double mu = N - 2.0;
    CHECK(angular_kernel(N, mu, 0.4, 1.3) ==
          doctest::Approx(unit_sphere_area(N) * std::pow(1.3, -mu)).epsilon(1e-13));
  }

  // general evaluator against the independent reference
  for (double mu : {0.6, 1.3}) {
    for (double r : {0.3, 1.0}) {
      CHECK(angular_kernel(2, mu, r, 0.8) ==
            doctest::Approx(angular_kernel_reference(2, mu, r, 0.8)).epsilon(5e-7));
    }
  }
  CHECK(angular_kernel(4, 1.1, 0.9, 1.4) ==
        doctest::Approx(angular_kernel_reference(4, 1.1, 0.9, 1.4)).epsilon(5e-7));
  // N=3 closed form against the reference too
  CHECK(angular_kernel(3, 0.7, 0.5, 1.1) ==
        doctest::Approx(angular_kernel_reference(3, 0.7, 0.5, 1.1)).epsilon(5e-7));
}

TEST_CASE("choquard on the unit interval: closed form 8/3") {
  auto d = interval(400);
  const auto exps = critical_exponents(4, 0.5);  // mu = 1/2 drives the kernel
  const GridFunction one(d, 1.0);
  const double v = choquard_double_integral(one, 1.0, exps).value;
  CHECK(v == doctest::Approx(8.0 / 3.0).epsilon(1e-3));

  const GridFunction zero(d, 0.0);
  CHECK(choquard_double_integral(zero, 2.0, exps).value == 0.0);
}

TEST_CASE("choquard homogeneity and norm scaling") {
  auto d = interval(60);
  const auto exps = critical_exponents(4, 0.5);
  SplitMix64 rng(3);
  std::vector<double> uv(d->n_nodes());
  for (auto& v : uv) v = rng.uniform01() + 0.1;
  const GridFunction u(d, uv);
  const double p = 1.7;
  const double base = choquard_double_integral(u, p, exps).value;
  const double scaled = choquard_double_integral(u.scaled(3.0), p, exps).value;
  CHECK(scaled == doctest::Approx(std::pow(3.0, 2.0 * p) * base).epsilon(1e-12));

  const double n1 = choquard_norm_sq(u, exps);
  const double n2 = choquard_norm_sq(u.scaled(2.5), exps);
  CHECK(n2 == doctest::Approx(2.5 * 2.5 * n1).epsilon(1e-12));

  CHECK_THROWS(choquard_double_integral(u.scaled(-1.0), 1.5, exps));
}

TEST_CASE("box symmetry of the double integral") {
  // relabeling the axes of a symmetric box leaves the value unchanged
  auto d = std::make_shared<GridDomain>(
      make_domain(DomainKind::box, 2, {0.0, 0.0}, {1.0, 1.0}, {14, 14}));
  const auto exps = critical_exponents(4, 0.8);
  const GridFunction f = GridFunction::sample(d, [](const std::vector<double>& x) {
    return 1.0 + x[0] * (1.0 - x[0]) * x[1];
  });
  const GridFunction ft = GridFunction::sample(d, [](const std::vector<double>& x) {
    return 1.0 + x[1] * (1.0 - x[1]) * x[0];
  });
  const double a = choquard_double_integral(f, 2.0, exps).value;
  const double b = choquard_double_integral(ft, 2.0, exps).value;
  CHECK(a == doctest::Approx(b).epsilon(1e-12));
}

TEST_CASE("riesz potential: closed forms and symmetry") {
  auto d = interval(400);
  const GridFunction one(d, 1.0);
  // int_0^1 y^{-1/2} dy = 2 at the endpoint
  CHECK(riesz_potential_at(one, 0.5, {0.0}) == doctest::Approx(2.0).epsilon(1e-9));

  const GridFunction zero(d, 0.0);
  const GridFunction vz = riesz_potential(zero, 0.5);
  CHECK(vz.max_value() == 0.0);

  // potential of a symmetric density peaks at the center
  auto d2 = std::make_shared<GridDomain>(
      make_domain(DomainKind::box, 2, {0.0, 0.0}, {1.0, 1.0}, {15, 15}));
  const GridFunction dens(d2, 1.0);
  const GridFunction v = riesz_potential(dens, 0.7);
  std::size_t center = 0;
  double best = -1.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] > best) {
      best = v[i];
      center = i;
    }
  }
  CHECK(d2->coord(center, 0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(d2->coord(center, 1) == doctest::Approx(0.5).epsilon(1e-12));

  CHECK_THROWS(riesz_potential(one.scaled(-1.0), 0.5));
}

TEST_CASE("radial kernel table: symmetry, cache round trip") {
  auto ball = std::make_shared<GridDomain>(
      make_domain(DomainKind::radial_ball, 3, {0.0}, {2.0}, {40}));
  const RadialKernelTable t = build_radial_kernel_table(*ball, 1.3);
  for (std::size_t i = 0; i < t.size(); i += 7) {
    for (std::size_t j = 0; j < t.size(); j += 5) {
      CHECK(t.value(i, j) == t.value(j, i));
    }
  }
  const std::string path = "kernel_cache_test.bin";
  t.save(path);
  const auto loaded = RadialKernelTable::load(path);
  REQUIRE(loaded.has_value());
  CHECK(loaded->N == t.N);
  CHECK(loaded->mu == t.mu);
  CHECK(loaded->grid_hash == t.grid_hash);
  CHECK(loaded->entries == t.entries);
  std::remove(path.c_str());
}

TEST_CASE("radial path equals per-pair direct summation (oracle equivalence)") {
  // table path vs direct summation with independently computed kernels
  for (int N : {2, 3}) {
    const double mu = (N == 2) ? 0.6 : 1.3;
    auto ball = std::make_shared<GridDomain>(make_domain(
        DomainKind::radial_ball, N, {0.0}, {3.0}, {48}));
    const GridFunction f = GridFunction::sample_radial(ball, [](double r) {
      return std::exp(-r * r);
    });
    const auto exps = critical_exponents(4, mu);
    const double table_value = choquard_double_integral(f, 2.0, exps).value;

    double direct = 0.0;
    const double inv_area = 1.0 / unit_sphere_area(N);
    for (std::size_t i = 0; i < ball->n_nodes(); ++i) {
      for (std::size_t j = 0; j < ball->n_nodes(); ++j) {
        const double k = (i == j)
                             ? angular_kernel(N, mu, ball->radius(i), ball->radius(j))
                             : angular_kernel_reference(N, mu, ball->radius(i),
                                                        ball->radius(j));
        direct += ball->weight(i) * ball->weight(j) * std::pow(f[i], 2.0) *
                  std::pow(f[j], 2.0) * k * inv_area;
      }
    }
    CHECK(table_value == doctest::Approx(direct).epsilon(1e-6));
  }
}

TEST_CASE("newton fast path equals the kernel table exactly") {
  auto ball = std::make_shared<GridDomain>(
      make_domain(DomainKind::radial_ball, 4, {0.0}, {2.0}, {200}));
  const auto exps = critical_exponents(4, 2.0);
  const GridFunction f = GridFunction::sample_radial(ball, [](double r) {
    return 1.0 / (0.1 + r * r);
  });
  const double newton = choquard_double_integral(f, exps.two_star_mu, exps).value;

  const RadialKernelTable t = build_radial_kernel_table(*ball, 2.0);
  ChoquardOptions opts;
  opts.table = &t;
  // disable the Newton shortcut by feeding the table directly through bilinear
  const GridFunction dens = f.pow(exps.two_star_mu);
  double table_sum = 0.0;
  for (std::size_t i = 0; i < ball->n_nodes(); ++i) {
    for (std::size_t j = 0; j < ball->n_nodes(); ++j) {
      table_sum += ball->weight(i) * ball->weight(j) * dens[i] * dens[j] *
                   t.value(i, j);
    }
  }
  table_sum /= unit_sphere_area(4);
  CHECK(newton == doctest::Approx(table_sum).epsilon(1e-11));
}

TEST_CASE("monte carlo brackets the deterministic pairwise value") {
  auto d = std::make_shared<GridDomain>(make_domain(
      DomainKind::box, 3, {0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}, {9, 9, 9}));
  const auto exps = critical_exponents(4, 1.1);
  const GridFunction f = GridFunction::sample(d, [](const std::vector<double>& x) {
    return 1.0 + 0.5 * std::sin(2.0 * x[0]) * x[1] + 0.25 * x[2];
  });
  const double exact = choquard_double_integral(f, 2.0, exps).value;

  int hits = 0;
  const int seeds = 100;
  for (int s = 1; s <= seeds; ++s) {
    const ChoquardResult mc = choquard_monte_carlo(f, 2.0, exps.mu, s, 40000);
    if (std::fabs(mc.value - exact) <= 3.0 * mc.std_error) ++hits;
  }
  CHECK(hits >= 99);
}

TEST_CASE("hls ratio: degenerate cases, exponent validation, strict bound") {
  auto d = interval(80);
  const auto exps = critical_exponents(4, 0.5);
  const double t = 2.0 * exps.N / (2.0 * exps.N - exps.mu);
  const GridFunction zero(d, 0.0);
  CHECK(hls_ratio(zero, zero, t, t, exps) == 0.0);
  CHECK_THROWS(hls_ratio(zero, zero, 2.0, 2.0, exps));

  // random smooth positive samples in dimension N stay strictly below the
  // sharp constant
  const auto e42 = critical_exponents(4, 2.0);
  const double C = hls_sharp_constant(e42);
  const double t4 = 2.0 * e42.N / (2.0 * e42.N - e42.mu);
  auto ball = std::make_shared<GridDomain>(
      make_domain(DomainKind::radial_ball, 4, {0.0}, {6.0}, {400}));
  SplitMix64 rng(77);
  for (int trial = 0; trial < 5; ++trial) {
    const double a = 1.0 + rng.uniform01();
    const double b = 0.5 + 2.0 * rng.uniform01();
    const GridFunction f = GridFunction::sample_radial(ball, [&](double r) {
      return (a + std::sin(b * r)) * std::exp(-0.7 * r * r);
    });
    const GridFunction h = GridFunction::sample_radial(ball, [&](double r) {
      return 0.3 + std::exp(-a * r);
    });
    CHECK(hls_ratio(f, h, t4, t4, e42) < C);
  }
}

TEST_CASE("kernel table cache directory round trip") {
  auto ball = std::make_shared<GridDomain>(
      make_domain(DomainKind::radial_ball, 3, {0.0}, {1.5}, {32}));
  const std::string dir = "kernel_cache_dir_test";
  const RadialKernelTable fresh = build_radial_kernel_table(*ball, 0.8, dir);
  const RadialKernelTable cached = build_radial_kernel_table(*ball, 0.8, dir);
  CHECK(fresh.entries == cached.entries);
  CHECK(cached.grid_hash == ball->hash());
  std::filesystem::remove_all(dir);
}
