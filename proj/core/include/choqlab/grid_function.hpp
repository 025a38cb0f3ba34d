#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "choqlab/domain.hpp"

namespace choqlab {

// Nodal values over a shared immutable domain. Arithmetic stays on the same
// domain; values are checked finite on construction.
class GridFunction {
 public:
  GridFunction(std::shared_ptr<const GridDomain> domain, std::vector<double> values);
  GridFunction(std::shared_ptr<const GridDomain> domain, double constant);

  static GridFunction sample(std::shared_ptr<const GridDomain> domain,
                             const std::function<double(const std::vector<double>&)>& f);
  // Radial kinds: sample a profile of r.
  static GridFunction sample_radial(std::shared_ptr<const GridDomain> domain,
                                    const std::function<double(double)>& profile);

  const GridDomain& domain() const { return *domain_; }
  std::shared_ptr<const GridDomain> domain_ptr() const { return domain_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  GridFunction operator+(const GridFunction& o) const;
  GridFunction operator-(const GridFunction& o) const;
  GridFunction scaled(double t) const;
  GridFunction abs() const;
  // Pointwise power; requires nonnegative values for fractional p.
  GridFunction pow(double p) const;

  double min_value() const;
  double max_value() const;

  void check_finite() const;

  std::string to_csv() const;
  static GridFunction from_csv(std::shared_ptr<const GridDomain> domain,
                               const std::string& csv);

 private:
  std::shared_ptr<const GridDomain> domain_;
  std::vector<double> values_;
};

// Discrete integral over the domain (linear in f, exact for constants).
double integrate(const GridFunction& f);

// Weighted L2 inner product and norms.
double inner_w(const GridFunction& f, const GridFunction& g);
double l2_norm_sq(const GridFunction& f);
// integral of f^p (p-th power, f >= 0 for fractional p).
double integrate_pow(const GridFunction& f, double p);

void require_same_domain(const GridFunction& a, const GridFunction& b);

}  // namespace choqlab
