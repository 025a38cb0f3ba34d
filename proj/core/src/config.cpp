#include "choqlab/config.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace choqlab {

namespace {

enum class FieldType { integer, real, text, real_list };

struct FieldSpec {
  const char* name;
  FieldType type;
  bool required;
  const char* default_value;  // nullptr when required or truly optional
};

// Per-command schema. Optional fields without defaults may be absent.
const std::map<std::string, std::vector<FieldSpec>>& schemas() {
  static const std::map<std::string, std::vector<FieldSpec>> s = {
      {"constants",
       {{"N", FieldType::integer, true, nullptr},
        {"mu", FieldType::real, true, nullptr}}},
      {"bubble-check",
       {{"N", FieldType::integer, false, "4"},
        {"epsilons", FieldType::real_list, false, "1,0.3,0.1"}}},
      {"cherrier",
       {{"N", FieldType::integer, false, "4"},
        {"mu", FieldType::real, true, nullptr},
        {"eps", FieldType::real, true, nullptr},
        {"radius", FieldType::real, false, "1"},
        {"nodes", FieldType::integer, false, "1200"},
        {"bubbles", FieldType::integer, false, "6"}}},
      {"eigen",
       {{"domain_file", FieldType::text, false, nullptr},
        {"kind", FieldType::text, false, "box"},
        {"dim", FieldType::integer, false, "1"},
        {"extents", FieldType::text, false, "0:1"},
        {"resolution", FieldType::text, false, "200"},
        {"alpha_csv", FieldType::text, false, nullptr},
        {"alpha_preset", FieldType::text, false, "linear"},
        {"alpha_shift", FieldType::real, false, "0.6"},
        {"alpha_a", FieldType::real, false, "1"},
        {"alpha_b", FieldType::real, false, "2"},
        {"alpha_inner", FieldType::real, false, "1"},
        {"alpha_outer", FieldType::real, false, "-1.5"},
        {"alpha_r0", FieldType::real, false, "0.5"}}},
      {"minimize",
       {{"N", FieldType::integer, false, "4"},
        {"mu", FieldType::real, true, nullptr},
        {"kind", FieldType::text, false, "radial-half-ball"},
        {"radius", FieldType::real, false, "1"},
        {"nodes", FieldType::integer, false, "800"},
        {"outer", FieldType::text, false, "dirichlet"},
        {"a_preset", FieldType::text, false, "zero"},
        {"a_value", FieldType::real, false, "0"},
        {"lambda", FieldType::real, false, "0"},
        {"alpha_inner", FieldType::real, false, "1"},
        {"alpha_outer", FieldType::real, false, "-1.5"},
        {"alpha_r0", FieldType::real, false, "0.5"},
        {"b_value", FieldType::real, false, "0"},
        {"step", FieldType::real, false, "1"},
        {"max_iters", FieldType::integer, false, "2000"},
        {"grad_tol", FieldType::real, false, "1e-8"},
        {"restarts", FieldType::integer, false, "1"}}},
      {"asymptotics",
       {{"N", FieldType::integer, false, "4"},
        {"mu", FieldType::real, false, "2"},
        {"k", FieldType::real, false, "4"},
        {"c", FieldType::real, false, "0.3"},
        {"R", FieldType::real, false, "2"},
        {"lambda", FieldType::real, false, "1"},
        {"alpha0", FieldType::real, false, "1"},
        {"eps_min", FieldType::real, false, "1e-6"},
        {"eps_max", FieldType::real, false, "1e-1"},
        {"eps_count", FieldType::integer, false, "12"},
        {"nodes", FieldType::integer, false, "12000"}}},
      {"quotient",
       {{"N", FieldType::integer, false, "4"},
        {"mu", FieldType::real, true, nullptr},
        {"domain_file", FieldType::text, true, nullptr},
        {"function_csv", FieldType::text, true, nullptr},
        {"a_value", FieldType::real, false, "0"},
        {"b_value", FieldType::real, false, "0"}}},
  };
  return s;
}

bool parse_int_checked(const std::string& v, long long* out) {
  try {
    std::size_t pos = 0;
    const long long x = std::stoll(v, &pos);
    if (pos != v.size()) return false;
    *out = x;
    return true;
  } catch (...) {
    return false;
  }
}

bool parse_real_checked(const std::string& v, double* out) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) return false;
    *out = x;
    return true;
  } catch (...) {
    return false;
  }
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

}  // namespace

const std::vector<std::string>& known_commands() {
  static const std::vector<std::string> cmds = [] {
    std::vector<std::string> v;
    for (const auto& [name, fields] : schemas()) v.push_back(name);
    return v;
  }();
  return cmds;
}

int ExperimentConfig::get_int(const std::string& key) const {
  long long out = 0;
  if (!parse_int_checked(params.at(key), &out)) {
    throw std::invalid_argument("config: bad integer for " + key);
  }
  return static_cast<int>(out);
}

double ExperimentConfig::get_real(const std::string& key) const {
  double out = 0.0;
  if (!parse_real_checked(params.at(key), &out)) {
    throw std::invalid_argument("config: bad real for " + key);
  }
  return out;
}

std::string ExperimentConfig::get_string(const std::string& key) const {
  return params.at(key);
}

std::vector<double> ExperimentConfig::get_list(const std::string& key) const {
  std::vector<double> out;
  std::istringstream is(params.at(key));
  std::string tok;
  while (std::getline(is, tok, ',')) {
    double x;
    if (!parse_real_checked(trim(tok), &x)) {
      throw std::invalid_argument("config: bad list entry for " + key);
    }
    out.push_back(x);
  }
  return out;
}

ParseOutcome parse_config(const std::string& text) {
  ParseOutcome out;
  std::map<std::string, std::string> raw;
  std::string section;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash_pos = line.find('#');
    if (hash_pos != std::string::npos) line = line.substr(0, hash_pos);
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '[' && t.back() == ']') {
      section = trim(t.substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      out.errors.push_back("line " + std::to_string(lineno) + ": expected key=value");
      continue;
    }
    std::string key = trim(t.substr(0, eq));
    if (!section.empty()) key = section + "." + key;
    const std::string value = trim(t.substr(eq + 1));
    if (raw.count(key)) {
      out.errors.push_back("duplicate key: " + key);
      continue;
    }
    raw[key] = value;
  }

  ExperimentConfig cfg;
  auto take = [&](const char* key) -> std::optional<std::string> {
    auto it = raw.find(key);
    if (it == raw.end()) return std::nullopt;
    std::string v = it->second;
    raw.erase(it);
    return v;
  };

  if (auto cmd = take("command")) {
    cfg.command = *cmd;
  } else {
    out.errors.push_back("missing required key: command");
  }
  if (auto o = take("out")) cfg.output_path = *o;
  if (auto s = take("seed")) {
    long long v;
    if (parse_int_checked(*s, &v) && v >= 0) {
      cfg.seed = static_cast<std::uint64_t>(v);
    } else {
      out.errors.push_back("seed: expected a nonnegative integer");
    }
  }

  const auto& all = schemas();
  auto sit = all.find(cfg.command);
  if (!cfg.command.empty() && sit == all.end()) {
    out.errors.push_back("unknown command: " + cfg.command);
  }
  if (sit != all.end()) {
    for (const FieldSpec& f : sit->second) {
      auto v = take(f.name);
      if (!v) {
        if (f.required) {
          out.errors.push_back(std::string("missing required key: ") + f.name);
        } else if (f.default_value) {
          cfg.params[f.name] = f.default_value;
        }
        continue;
      }
      bool ok = true;
      if (f.type == FieldType::integer) {
        long long x;
        ok = parse_int_checked(*v, &x);
      } else if (f.type == FieldType::real) {
        double x;
        ok = parse_real_checked(*v, &x);
      } else if (f.type == FieldType::real_list) {
        std::istringstream ls(*v);
        std::string tok;
        while (ok && std::getline(ls, tok, ',')) {
          double x;
          ok = parse_real_checked(trim(tok), &x);
        }
      }
      if (!ok) {
        out.errors.push_back(std::string(f.name) + ": bad value '" + *v + "'");
      } else {
        cfg.params[f.name] = *v;
      }
    }
  }
  for (const auto& [key, value] : raw) {
    out.errors.push_back("unknown key: " + key);
  }

  // semantic checks run whenever the relevant fields parsed, so that a
  // config with several problems reports all of them at once
  if (cfg.params.count("N") && cfg.params.count("mu")) {
    try {
      const double N = cfg.get_int("N");
      const double mu = cfg.get_real("mu");
      if (N < 3) out.errors.push_back("N must be >= 3");
      if (!(mu > 0.0) || !(mu < N)) out.errors.push_back("mu must lie in (0,N)");
    } catch (const std::exception&) {
    }
  }
  if (cfg.command == "asymptotics" && cfg.params.count("k") &&
      cfg.params.count("eps_min") && cfg.params.count("eps_max")) {
    try {
      if (!(cfg.get_real("k") > 1.0)) out.errors.push_back("k must exceed 1");
      if (!(cfg.get_real("eps_min") > 0.0)) {
        out.errors.push_back("eps_min must be positive");
      }
      if (!(cfg.get_real("eps_max") > cfg.get_real("eps_min"))) {
        out.errors.push_back("eps_max must exceed eps_min");
      }
    } catch (const std::exception&) {
    }
  }

  if (out.errors.empty()) out.config = std::move(cfg);
  return out;
}

}  // namespace choqlab
