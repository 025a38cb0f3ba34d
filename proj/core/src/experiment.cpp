#include "choqlab/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "choqlab/asymptotics.hpp"
#include "choqlab/bubble.hpp"
#include "choqlab/csv.hpp"
#include "choqlab/minimize.hpp"
#include "choqlab/operators.hpp"
#include "choqlab/weighted_eigen.hpp"

namespace choqlab {

void atomic_write_file(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + tmp);
    os.write(content.data(), static_cast<std::streamsize>(content.size()));
    os.flush();
    if (!os) throw std::runtime_error("short write to " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

namespace {

std::string output_or_default(const ExperimentConfig& cfg) {
  return cfg.output_path.empty() ? cfg.command + ".csv" : cfg.output_path;
}

std::string sibling_output(const std::string& main_path, const std::string& tag) {
  const std::string suffix = ".csv";
  if (main_path.size() > suffix.size() &&
      main_path.compare(main_path.size() - suffix.size(), suffix.size(), suffix) == 0) {
    return main_path.substr(0, main_path.size() - suffix.size()) + "_" + tag + ".csv";
  }
  return main_path + "_" + tag + ".csv";
}

std::vector<int> parse_resolution(const std::string& text) {
  std::vector<int> res;
  std::istringstream is(text);
  int r;
  while (is >> r) res.push_back(r);
  return res;
}

void parse_extents(const std::string& text, std::vector<double>* lo,
                   std::vector<double>* hi) {
  std::istringstream is(text);
  std::string tok;
  while (is >> tok) {
    const auto colon = tok.find(':');
    if (colon == std::string::npos) {
      throw std::invalid_argument("extents: expected lo:hi tokens");
    }
    lo->push_back(std::stod(tok.substr(0, colon)));
    hi->push_back(std::stod(tok.substr(colon + 1)));
  }
}

std::shared_ptr<const GridDomain> domain_from_config(const ExperimentConfig& cfg) {
  if (cfg.has("domain_file")) {
    return std::make_shared<GridDomain>(
        GridDomain::deserialize(read_file(cfg.get_string("domain_file"))));
  }
  const DomainKind kind = domain_kind_from_string(cfg.get_string("kind"));
  const int dim = cfg.get_int("dim");
  std::vector<double> lo, hi;
  parse_extents(cfg.get_string("extents"), &lo, &hi);
  const std::vector<int> res = parse_resolution(cfg.get_string("resolution"));
  return std::make_shared<GridDomain>(make_domain(kind, dim, lo, hi, res));
}

GridFunction alpha_from_config(const ExperimentConfig& cfg,
                               std::shared_ptr<const GridDomain> dom) {
  if (cfg.has("alpha_csv")) {
    return GridFunction::from_csv(dom, read_file(cfg.get_string("alpha_csv")));
  }
  const std::string preset = cfg.get_string("alpha_preset");
  if (preset == "linear") {
    const double shift = cfg.get_real("alpha_shift");
    return GridFunction::sample(dom, [&](const std::vector<double>& x) {
      return x[0] - shift;
    });
  }
  if (preset == "step") {
    const double a = cfg.get_real("alpha_a");
    const double b = cfg.get_real("alpha_b");
    const double mid = 0.5 * (dom->lo()[0] + dom->hi()[0]);
    return GridFunction::sample(dom, [&](const std::vector<double>& x) {
      return x[0] < mid ? a : -b;
    });
  }
  if (preset == "radial-well") {
    const double inner = cfg.get_real("alpha_inner");
    const double outer = cfg.get_real("alpha_outer");
    const double r0 = cfg.get_real("alpha_r0");
    const double R = dom->is_radial() ? dom->outer_radius() : dom->hi()[0];
    const double r1 = r0 + 0.2 * (R - r0);
    auto profile = [=](double r) {
      if (r <= r0) return inner;
      if (r >= r1) return outer;
      const double s = (r - r0) / (r1 - r0);
      return inner + (outer - inner) * (0.5 - 0.5 * std::cos(M_PI * s));
    };
    if (dom->is_radial()) return GridFunction::sample_radial(dom, profile);
    return GridFunction::sample(dom, [&](const std::vector<double>& x) {
      double r2 = 0.0;
      for (double c : x) r2 += c * c;
      return profile(std::sqrt(r2));
    });
  }
  throw std::invalid_argument("unknown alpha_preset: " + preset);
}

// per-command runners ------------------------------------------------------

RunResult run_constants(const ExperimentConfig& cfg) {
  const auto exps = critical_exponents(cfg.get_int("N"), cfg.get_real("mu"));
  const ConstantsRow row = derived_constants(exps);
  std::ostringstream os;
  os << "N,mu,S,C,S_H,threshold\n";
  os << row.N << "," << format_full(row.mu) << "," << format_full(row.S) << ","
     << format_full(row.C) << "," << format_full(row.S_H) << ","
     << format_full(row.threshold) << "\n";
  const std::string out = output_or_default(cfg);
  atomic_write_file(out, os.str());
  std::ostringstream msg;
  msg << "S_H = " << format_full(row.S_H);
  return {0, {out}, msg.str()};
}

RunResult run_bubble_check(const ExperimentConfig& cfg) {
  const int N = cfg.get_int("N");
  const std::vector<double> eps = cfg.get_list("epsilons");
  const double s_pow = std::pow(sobolev_constant(N), 0.5 * N);
  std::ostringstream os;
  os << "epsilon,grad_integral,crit_integral,s_pow,rel_dev\n";
  double worst = 0.0;
  for (double e : eps) {
    const BubbleSpec spec = make_bubble_spec(N, e);
    const double g = bubble_gradient_integral(spec);
    const double c = bubble_critical_integral(spec);
    const double dev = std::fabs(g - c) / s_pow;
    worst = std::max(worst, dev);
    os << format_full(e) << "," << format_full(g) << "," << format_full(c) << ","
       << format_full(s_pow) << "," << format_full(dev) << "\n";
  }
  const std::string out = output_or_default(cfg);
  atomic_write_file(out, os.str());
  std::ostringstream msg;
  msg << "max |grad - crit| / S^{N/2} = " << format_full(worst);
  return {0, {out}, msg.str()};
}

RunResult run_cherrier(const ExperimentConfig& cfg) {
  const auto exps = critical_exponents(cfg.get_int("N"), cfg.get_real("mu"));
  const double eps = cfg.get_real("eps");
  if (!(eps > 0.0)) throw std::invalid_argument("cherrier: eps must be positive");
  const double R = cfg.get_real("radius");
  DomainOptions opt;
  auto dom = std::make_shared<GridDomain>(make_domain(
      DomainKind::radial_half_ball, exps.N, {0.0}, {R}, {cfg.get_int("nodes")}, {}, opt));

  std::vector<GridFunction> family;
  std::vector<std::string> labels;
  family.push_back(GridFunction(dom, 1.0));
  labels.push_back("constant");
  const int bubbles = cfg.get_int("bubbles");
  const double half = 0.5 * (exps.N - 2.0);
  for (int i = 0; i < bubbles; ++i) {
    const double be = std::pow(10.0, -1.0 - 0.5 * i) * R * R;
    family.push_back(GridFunction::sample_radial(dom, [&](double r) {
      return std::pow(be + r * r, -half);
    }));
    std::ostringstream lab;
    lab << "bubble_eps" << i;
    labels.push_back(lab.str());
  }

  RadialKernelTable table;
  ChoquardOptions copts;
  if (std::fabs(exps.mu - (exps.N - 2.0)) > 1e-12) {
    table = build_radial_kernel_table(*dom, exps.mu);
    copts.table = &table;
  }

  const double slope =
      std::pow(2.0, (exps.two_star_mu - 2.0) / exps.two_star_mu) / s_h_constant(exps) +
      eps;
  std::ostringstream os;
  os << "member,choquard_sq,grad,l2,required_c\n";
  double cmax = -1e300;
  for (std::size_t i = 0; i < family.size(); ++i) {
    const double cq = choquard_norm_sq(family[i], exps, copts);
    const double g = dirichlet_energy(family[i]);
    const double l2 = l2_norm_sq(family[i]);
    const double req = (cq - slope * g) / l2;
    cmax = std::max(cmax, req);
    os << labels[i] << "," << format_full(cq) << "," << format_full(g) << ","
       << format_full(l2) << "," << format_full(req) << "\n";
  }
  os << "c_eps,,,," << format_full(cmax) << "\n";
  const std::string out = output_or_default(cfg);
  atomic_write_file(out, os.str());
  std::ostringstream msg;
  msg << "C(eps) = " << format_full(cmax);
  return {0, {out}, msg.str()};
}

RunResult run_eigen(const ExperimentConfig& cfg) {
  auto dom = domain_from_config(cfg);
  const GridFunction alpha = alpha_from_config(cfg, dom);
  const WeightSpec spec = admissibility_check(alpha);
  if (!spec.admissible()) {
    throw std::invalid_argument(
        "eigen: weight inadmissible (needs sign change and negative mean)");
  }
  const EigenResult r = weighted_neumann_eigenvalue(spec);
  std::ostringstream os;
  os << "lambda_alpha,residual,positivity_margin\n";
  os << format_full(r.lambda_alpha) << "," << format_full(r.residual) << ","
     << format_full(r.positivity_margin) << "\n";
  const std::string out = output_or_default(cfg);
  atomic_write_file(out, os.str());
  std::ostringstream msg;
  msg << "lambda(alpha) = " << format_full(r.lambda_alpha);
  return {0, {out}, msg.str()};
}

RunResult run_minimize(const ExperimentConfig& cfg) {
  const auto exps = critical_exponents(cfg.get_int("N"), cfg.get_real("mu"));
  const DomainKind kind = domain_kind_from_string(cfg.get_string("kind"));
  const double R = cfg.get_real("radius");
  DomainOptions dopt;
  const std::string outer = cfg.get_string("outer");
  if (outer == "dirichlet") {
    dopt.gamma0_faces = {"0:hi"};
  } else if (outer != "neumann") {
    throw std::invalid_argument("minimize: outer must be dirichlet or neumann");
  }
  auto dom = std::make_shared<GridDomain>(
      make_domain(kind, exps.N, {0.0}, {R}, {cfg.get_int("nodes")}, {}, dopt));

  NormCoefficients coeffs = NormCoefficients::zero(dom);
  const std::string preset = cfg.get_string("a_preset");
  if (preset == "constant") {
    coeffs = NormCoefficients::bulk(GridFunction(dom, cfg.get_real("a_value")));
  } else if (preset == "lambda-alpha") {
    ExperimentConfig sub = cfg;
    sub.params["alpha_preset"] = "radial-well";
    const GridFunction alpha = alpha_from_config(sub, dom);
    coeffs = NormCoefficients::lambda_alpha(cfg.get_real("lambda"), alpha);
  } else if (preset != "zero") {
    throw std::invalid_argument("minimize: unknown a_preset " + preset);
  }
  coeffs.b = GridFunction(dom, cfg.get_real("b_value"));

  MinimizerOptions mopts;
  mopts.step = cfg.get_real("step");
  mopts.max_iters = cfg.get_int("max_iters");
  mopts.grad_tol = cfg.get_real("grad_tol");
  mopts.restarts = cfg.get_int("restarts");
  mopts.seed = cfg.seed;

  const MinimizeResult res = minimize_quotient(coeffs, exps, mopts);

  std::ostringstream os;
  os << "iteration,Q,grad_norm\n";
  for (const auto& p : res.trajectory) {
    os << p.iter << "," << format_full(p.Q) << "," << format_full(p.grad_norm) << "\n";
  }
  const std::string out = output_or_default(cfg);
  atomic_write_file(out, os.str());
  const std::string sol = sibling_output(out, "solution");
  atomic_write_file(sol, res.v.to_csv());

  std::ostringstream msg;
  msg << "S_disc = " << format_full(res.S_disc)
      << (res.converged ? "" : " (not converged)");
  return {0, {out, sol}, msg.str()};
}

RunResult run_asymptotics(const ExperimentConfig& cfg) {
  const auto exps = critical_exponents(cfg.get_int("N"), cfg.get_real("mu"));
  AsymptoticsSweep sweep;
  sweep.exps = exps;
  sweep.lambda = cfg.get_real("lambda");
  sweep.alpha0 = cfg.get_real("alpha0");
  sweep.flatness = FlatBoundarySpec{cfg.get_real("k"), cfg.get_real("c"),
                                    cfg.get_real("R")};
  sweep.ball_nodes = cfg.get_int("nodes");
  const double lo = cfg.get_real("eps_min");
  const double hi = cfg.get_real("eps_max");
  const int count = cfg.get_int("eps_count");
  for (int i = 0; i < count; ++i) {
    const double t = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
    sweep.epsilons.push_back(hi * std::pow(lo / hi, t));
  }

  const AsymptoticsContext ctx = make_asymptotics_context(sweep);
  const std::vector<CurvePoint> pts = quotient_curve(ctx);

  std::ostringstream os;
  os << "epsilon,grad_term,l2_term,choquard,D,E,Q,threshold,below_gate\n";
  bool any_below = false;
  for (const auto& p : pts) {
    any_below = any_below || p.below_gate;
    os << format_full(p.epsilon) << "," << format_full(p.grad_term) << ","
       << format_full(p.l2_term) << "," << format_full(p.choquard) << ","
       << format_full(p.D) << "," << format_full(p.E) << "," << format_full(p.Q)
       << "," << format_full(p.threshold) << "," << (p.below_gate ? 1 : 0) << "\n";
  }
  const std::string out = output_or_default(cfg);
  atomic_write_file(out, os.str());
  std::ostringstream msg;
  msg << (any_below ? "gate passed: quotient drops below the threshold"
                    : "gate not passed within the sweep");
  return {0, {out}, msg.str()};
}

RunResult run_quotient(const ExperimentConfig& cfg) {
  const auto exps = critical_exponents(cfg.get_int("N"), cfg.get_real("mu"));
  auto dom = domain_from_config(cfg);
  const GridFunction u =
      GridFunction::from_csv(dom, read_file(cfg.get_string("function_csv")));
  NormCoefficients coeffs = NormCoefficients::bulk(
      GridFunction(dom, cfg.get_real("a_value")));
  coeffs.b = GridFunction(dom, cfg.get_real("b_value"));
  const QuotientReport rep = sobolev_quotient(u, coeffs, exps);
  std::ostringstream os;
  os << "norm_sq,choquard_sq,Q,J\n";
  os << format_full(rep.norm_sq) << "," << format_full(rep.choquard_sq) << ","
     << format_full(rep.Q) << "," << format_full(rep.J) << "\n";
  const std::string out = output_or_default(cfg);
  atomic_write_file(out, os.str());
  std::ostringstream msg;
  msg << "Q = " << format_full(rep.Q);
  return {0, {out}, msg.str()};
}

}  // namespace

RunResult run(const ExperimentConfig& config) {
  try {
    if (config.command == "constants") return run_constants(config);
    if (config.command == "bubble-check") return run_bubble_check(config);
    if (config.command == "cherrier") return run_cherrier(config);
    if (config.command == "eigen") return run_eigen(config);
    if (config.command == "minimize") return run_minimize(config);
    if (config.command == "asymptotics") return run_asymptotics(config);
    if (config.command == "quotient") return run_quotient(config);
    return {2, {}, "unknown command: " + config.command};
  } catch (const std::exception& e) {
    return {1, {}, config.command + ": " + e.what()};
  }
}

}  // namespace choqlab
