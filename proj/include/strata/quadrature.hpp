#ifndef STRATA_QUADRATURE_HPP
#define STRATA_QUADRATURE_HPP

#include <cmath>
#include <complex>
#include <span>
#include <vector>

#include "strata/errors.hpp"
#include "strata/field.hpp"
#include "strata/measure.hpp"

namespace strata {

/// Pairwise sum over fixed 64-element leaves; the tree depends only on the
/// length, so any split of the leaves across threads gives the same bits.
inline double ordered_sum(std::span<const double> v) {
  if (v.size() <= 64) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  std::size_t leaves = (v.size() + 63) / 64;
  std::size_t half = (leaves / 2) * 64;
  return ordered_sum(v.subspan(0, half)) + ordered_sum(v.subspan(half));
}

/// Values with quadrature masses and optional per-node weight factors. The
/// same view serves grid fields and finite discrete measures.
struct WeightedView {
  std::span<const cplx> values;
  std::span<const double> mass;
  std::span<const double> factor;  // empty means 1

  double factor_at(std::size_t i) const { return factor.empty() ? 1.0 : factor[i]; }
};

/// sum of mass * factor * |v|^p
inline double power_integral(const WeightedView& v, double p) {
  std::vector<double> terms(v.values.size());
  for (std::size_t i = 0; i < terms.size(); ++i) {
    double a = std::abs(v.values[i]);
    terms[i] = a == 0.0 ? 0.0 : v.mass[i] * v.factor_at(i) * (p == 2.0 ? a * a : std::pow(a, p));
  }
  return ordered_sum(terms);
}

inline double lp_norm(const WeightedView& v, double p) {
  require(p >= 1.0, "L^p norm needs p >= 1");
  return std::pow(power_integral(v, p), 1.0 / p);
}

/// Entropy of the density factor*|v|^p / sum against the masses; 0 log 0 = 0.
inline double entropy(const WeightedView& v, double p) {
  const double total = power_integral(v, p);
  if (!(total > 0.0)) throw InputError("entropy of a zero field");
  std::vector<double> terms(v.values.size());
  for (std::size_t i = 0; i < terms.size(); ++i) {
    double a = std::abs(v.values[i]);
    if (a == 0.0) {
      terms[i] = 0.0;
      continue;
    }
    double rho = v.factor_at(i) * (p == 2.0 ? a * a : std::pow(a, p)) / total;
    terms[i] = rho == 0.0 ? 0.0 : v.mass[i] * rho * std::log(rho);
  }
  return ordered_sum(terms);
}

/// Quadrature data for one field, measure and (optional) weight at power p.
struct FieldQuadrature {
  std::vector<double> mass;
  std::vector<double> factor;
  WeightedView view(const ScalarField& u) const { return {u.values(), mass, factor}; }
};

inline FieldQuadrature field_quadrature(const ScalarField& u, const MeasureSpec& mu,
                                        const WeightSpec* w = nullptr, double p = 2.0) {
  return {measure_weights(u, mu), weight_factors(u, w, p)};
}

inline double lp_norm(const ScalarField& u, double p, const MeasureSpec& mu = MeasureSpec::lebesgue(),
                      const WeightSpec* w = nullptr) {
  auto fq = field_quadrature(u, mu, w, p);
  return lp_norm(fq.view(u), p);
}

inline double entropy(const ScalarField& u, double p, const MeasureSpec& mu = MeasureSpec::lebesgue(),
                      const WeightSpec* w = nullptr) {
  auto fq = field_quadrature(u, mu, w, p);
  return entropy(fq.view(u), p);
}

/// Trapezoidal integral of a real-valued function of the field's nodes.
template <class F>
double integrate_nodes(const ScalarField& u, const MeasureSpec& mu, F&& f) {
  auto mass = measure_weights(u, mu);
  std::vector<double> terms(u.size());
  u.grid().for_each_node([&](std::size_t i, std::span<const double> x, auto) { terms[i] = mass[i] * f(i, x); });
  return ordered_sum(terms);
}

}  // namespace strata

#endif  // STRATA_QUADRATURE_HPP
