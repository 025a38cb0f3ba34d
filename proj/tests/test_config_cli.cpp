#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <memory>
#include <sstream>

#include "choqlab/csv.hpp"
#include "choqlab/experiment.hpp"
#include "choqlab/grid_function.hpp"

using namespace choqlab;

namespace {

struct TempFile {
  std::string path;
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("parse_config: valid documents and defaults") {
  const auto ok = parse_config("command=constants\nN=4\nmu=2\n");
  REQUIRE(ok.errors.empty());
  CHECK(ok.config->command == "constants");
  CHECK(ok.config->get_int("N") == 4);
  CHECK(ok.config->get_real("mu") == 2.0);

  // defaults filled for the sweep command
  const auto sweep = parse_config("command=asymptotics\nk=4\nlambda=1\n");
  REQUIRE(sweep.errors.empty());
  CHECK(sweep.config->get_real("eps_min") == 1e-6);
  CHECK(sweep.config->get_real("eps_max") == 1e-1);
  CHECK(sweep.config->get_int("eps_count") == 12);
  CHECK(sweep.config->get_real("c") == 0.3);

  // sections flatten to prefixed keys, comments are stripped
  const auto sec = parse_config(
      "command = quotient\nmu = 1 # kernel\n[x]\ny = 1\n");
  CHECK_FALSE(sec.errors.empty());  // x.y is unknown, still strict
}

TEST_CASE("parse_config: every error is reported") {
  const auto bad = parse_config("command=constants\nmu=5\nN=4\nbogus=1\n");
  CHECK(!bad.config.has_value());
  REQUIRE(bad.errors.size() == 2);
  CHECK(std::any_of(bad.errors.begin(), bad.errors.end(), [](const std::string& e) {
    return e.find("mu must lie in (0,N)") != std::string::npos;
  }));
  CHECK(std::any_of(bad.errors.begin(), bad.errors.end(), [](const std::string& e) {
    return e.find("unknown key: bogus") != std::string::npos;
  }));

  const auto unknown_cmd = parse_config("command=frobnicate\n");
  CHECK(!unknown_cmd.config.has_value());

  const auto missing = parse_config("command=constants\n");
  CHECK(!missing.config.has_value());
  CHECK(missing.errors.size() == 2);  // N and mu both missing

  const auto dup = parse_config("command=constants\nN=4\nN=5\nmu=2\n");
  CHECK(!dup.config.has_value());
}

TEST_CASE("constants command: output content and determinism") {
  ExperimentConfig cfg = *parse_config("command=constants\nN=4\nmu=2\n").config;
  TempFile f1{"test_constants_a.csv"}, f2{"test_constants_b.csv"};
  cfg.output_path = f1.path;
  REQUIRE(run(cfg).exit_code == 0);
  cfg.output_path = f2.path;
  REQUIRE(run(cfg).exit_code == 0);

  const std::string a = read_file(f1.path);
  CHECK(a == read_file(f2.path));
  CHECK(a.find("N,mu,S,C,S_H,threshold") == 0);
  CHECK(a.find("10.2603") != std::string::npos);
  CHECK(a.find("3.8476") != std::string::npos);
  CHECK(a.find("6.5478") != std::string::npos);
}

TEST_CASE("bubble-check command reports a tiny identity deviation") {
  ExperimentConfig cfg =
      *parse_config("command=bubble-check\nN=4\nepsilons=1,0.3,0.1\n").config;
  TempFile f{"test_bubble_check.csv"};
  cfg.output_path = f.path;
  const RunResult r = run(cfg);
  REQUIRE(r.exit_code == 0);
  const std::string body = read_file(f.path);
  // three epsilon rows plus the header
  CHECK(std::count(body.begin(), body.end(), '\n') == 4);
  // the deviations land at the end of each row; all must be <= 1e-8
  std::istringstream is(body);
  std::string line;
  std::getline(is, line);
  while (std::getline(is, line)) {
    const double dev = std::stod(line.substr(line.rfind(',') + 1));
    CHECK(dev <= 1e-8);
  }
}

TEST_CASE("eigen command on a 1-d step weight") {
  ExperimentConfig cfg = *parse_config(
                              "command=eigen\nkind=box\ndim=1\nextents=0:1\n"
                              "resolution=150\nalpha_preset=step\nalpha_a=1\n"
                              "alpha_b=2\n")
                              .config;
  TempFile f{"test_eigen.csv"};
  cfg.output_path = f.path;
  const RunResult r = run(cfg);
  REQUIRE(r.exit_code == 0);
  const std::string body = read_file(f.path);
  CHECK(body.find("lambda_alpha,residual,positivity_margin") == 0);
}

TEST_CASE("quotient command round-trips a dumped function") {
  auto dom = std::make_shared<GridDomain>(
      make_domain(DomainKind::box, 1, {0.0}, {1.0}, {60}));
  const GridFunction u = GridFunction::sample(dom, [](const std::vector<double>& x) {
    return 1.0 + x[0];
  });
  TempFile df{"test_quotient_domain.txt"}, ff{"test_quotient_fn.csv"},
      of{"test_quotient_out.csv"};
  atomic_write_file(df.path, dom->serialize());
  atomic_write_file(ff.path, u.to_csv());

  ExperimentConfig cfg = *parse_config("command=quotient\nN=4\nmu=0.5\n"
                                       "domain_file=" +
                                       df.path + "\nfunction_csv=" + ff.path +
                                       "\na_value=-1\n")
                              .config;
  cfg.output_path = of.path;
  const RunResult r = run(cfg);
  REQUIRE(r.exit_code == 0);
  const std::string body = read_file(of.path);
  CHECK(body.find("norm_sq,choquard_sq,Q,J") == 0);
}

TEST_CASE("minimize command writes trajectory and solution, deterministically") {
  const std::string text =
      "command=minimize\nN=4\nmu=2\nkind=radial-half-ball\nradius=1\n"
      "nodes=200\na_preset=zero\nmax_iters=80\ngrad_tol=1e-6\nrestarts=2\n";
  ExperimentConfig cfg = *parse_config(text).config;
  cfg.seed = 7;
  TempFile t1{"test_min_a.csv"}, s1{"test_min_a_solution.csv"};
  TempFile t2{"test_min_b.csv"}, s2{"test_min_b_solution.csv"};
  cfg.output_path = t1.path;
  REQUIRE(run(cfg).exit_code == 0);
  cfg.output_path = t2.path;
  REQUIRE(run(cfg).exit_code == 0);
  CHECK(read_file(t1.path) == read_file(t2.path));
  CHECK(read_file(s1.path) == read_file(s2.path));
  CHECK(read_file(t1.path).find("iteration,Q,grad_norm") == 0);
}

TEST_CASE("asymptotics command emits the documented schema") {
  const std::string text =
      "command=asymptotics\nN=4\nmu=2\nk=4\nc=0.3\nR=1\nlambda=1\nalpha0=1\n"
      "eps_min=1e-4\neps_max=1e-1\neps_count=4\nnodes=1500\n";
  ExperimentConfig cfg = *parse_config(text).config;
  TempFile f1{"test_asym_a.csv"}, f2{"test_asym_b.csv"};
  cfg.output_path = f1.path;
  REQUIRE(run(cfg).exit_code == 0);
  cfg.output_path = f2.path;
  REQUIRE(run(cfg).exit_code == 0);
  const std::string a = read_file(f1.path);
  CHECK(a == read_file(f2.path));
  CHECK(a.find("epsilon,grad_term,l2_term,choquard,D,E,Q,threshold,below_gate") == 0);
  CHECK(std::count(a.begin(), a.end(), '\n') == 5);
}

TEST_CASE("run surfaces downstream errors with command context") {
  ExperimentConfig cfg = *parse_config("command=eigen\nkind=box\ndim=1\n"
                                       "extents=0:1\nresolution=50\n"
                                       "alpha_preset=linear\nalpha_shift=2\n")
                              .config;
  // alpha = x - 2 never changes sign: inadmissible
  const RunResult r = run(cfg);
  CHECK(r.exit_code == 1);
  CHECK(r.message.find("eigen") != std::string::npos);
}
