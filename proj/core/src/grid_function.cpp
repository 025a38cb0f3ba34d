#include "choqlab/grid_function.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace choqlab {

GridFunction::GridFunction(std::shared_ptr<const GridDomain> domain,
                           std::vector<double> values)
    : domain_(std::move(domain)), values_(std::move(values)) {
  if (!domain_) throw std::invalid_argument("GridFunction: null domain");
  if (values_.size() != domain_->n_nodes()) {
    throw std::invalid_argument("GridFunction: value count != node count");
  }
  check_finite();
}

GridFunction::GridFunction(std::shared_ptr<const GridDomain> domain, double constant)
    : GridFunction(domain, std::vector<double>(domain ? domain->n_nodes() : 0, constant)) {}

GridFunction GridFunction::sample(
    std::shared_ptr<const GridDomain> domain,
    const std::function<double(const std::vector<double>&)>& f) {
  std::vector<double> v(domain->n_nodes());
  std::vector<double> x(domain->dim());
  for (std::size_t i = 0; i < v.size(); ++i) {
    for (int a = 0; a < domain->dim(); ++a) x[a] = domain->coord(i, a);
    v[i] = f(x);
  }
  return GridFunction(std::move(domain), std::move(v));
}

GridFunction GridFunction::sample_radial(std::shared_ptr<const GridDomain> domain,
                                         const std::function<double(double)>& profile) {
  if (!domain->is_radial()) {
    throw std::invalid_argument("sample_radial: domain is not radial");
  }
  std::vector<double> v(domain->n_nodes());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = profile(domain->radius(i));
  return GridFunction(std::move(domain), std::move(v));
}

void GridFunction::check_finite() const {
  for (double v : values_) {
    if (!std::isfinite(v)) throw std::invalid_argument("GridFunction: non-finite value");
  }
}

void require_same_domain(const GridFunction& a, const GridFunction& b) {
  if (a.domain_ptr().get() == b.domain_ptr().get()) return;
  if (!a.domain().same_layout(b.domain())) {
    throw std::invalid_argument("GridFunction: domain mismatch");
  }
}

GridFunction GridFunction::operator+(const GridFunction& o) const {
  require_same_domain(*this, o);
  std::vector<double> v(values_.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = values_[i] + o.values_[i];
  return GridFunction(domain_, std::move(v));
}

GridFunction GridFunction::operator-(const GridFunction& o) const {
  require_same_domain(*this, o);
  std::vector<double> v(values_.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = values_[i] - o.values_[i];
  return GridFunction(domain_, std::move(v));
}

GridFunction GridFunction::scaled(double t) const {
  std::vector<double> v(values_.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = t * values_[i];
  return GridFunction(domain_, std::move(v));
}

GridFunction GridFunction::abs() const {
  std::vector<double> v(values_.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::fabs(values_[i]);
  return GridFunction(domain_, std::move(v));
}

GridFunction GridFunction::pow(double p) const {
  const bool integral_p = (p == std::floor(p));
  std::vector<double> v(values_.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!integral_p && values_[i] < 0.0) {
      throw std::domain_error("GridFunction::pow: negative value with fractional power");
    }
    v[i] = std::pow(values_[i], p);
  }
  return GridFunction(domain_, std::move(v));
}

double GridFunction::min_value() const {
  double m = values_.empty() ? 0.0 : values_[0];
  for (double v : values_) m = std::min(m, v);
  return m;
}

double GridFunction::max_value() const {
  double m = values_.empty() ? 0.0 : values_[0];
  for (double v : values_) m = std::max(m, v);
  return m;
}

std::string GridFunction::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  for (int a = 0; a < domain_->dim(); ++a) os << "x" << a << ",";
  os << "value\n";
  const bool radial = domain_->is_radial();
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (radial) {
      os << domain_->radius(i);
      for (int a = 1; a < domain_->dim(); ++a) os << ",0";
    } else {
      for (int a = 0; a < domain_->dim(); ++a) {
        if (a) os << ",";
        os << domain_->coord(i, a);
      }
    }
    os << "," << values_[i] << "\n";
  }
  return os.str();
}

GridFunction GridFunction::from_csv(std::shared_ptr<const GridDomain> domain,
                                    const std::string& csv) {
  std::istringstream is(csv);
  std::string line;
  if (!std::getline(is, line)) throw std::invalid_argument("from_csv: empty document");
  std::vector<double> v;
  v.reserve(domain->n_nodes());
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto comma = line.rfind(',');
    if (comma == std::string::npos) throw std::invalid_argument("from_csv: bad row");
    v.push_back(std::stod(line.substr(comma + 1)));
  }
  if (v.size() != domain->n_nodes()) {
    throw std::invalid_argument("from_csv: row count != node count");
  }
  return GridFunction(std::move(domain), std::move(v));
}

double integrate(const GridFunction& f) {
  const auto& w = f.domain().weights();
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * f[i];
  return s;
}

double inner_w(const GridFunction& f, const GridFunction& g) {
  require_same_domain(f, g);
  const auto& w = f.domain().weights();
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * f[i] * g[i];
  return s;
}

double l2_norm_sq(const GridFunction& f) { return inner_w(f, f); }

double integrate_pow(const GridFunction& f, double p) {
  const bool integral_p = (p == std::floor(p));
  const auto& w = f.domain().weights();
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!integral_p && f[i] < 0.0) {
      throw std::domain_error("integrate_pow: negative value with fractional power");
    }
    s += w[i] * std::pow(f[i], p);
  }
  return s;
}

}  // namespace choqlab
