#ifndef STRATA_QUASI_NORM_HPP
#define STRATA_QUASI_NORM_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "strata/errors.hpp"
#include "strata/group.hpp"
#include "strata/optimize.hpp"
#include "strata/random.hpp"

namespace strata {

class QuasiNorm {
 public:
  enum class Kind { EuclideanLp, Koranyi };

  static QuasiNorm euclidean_lp(double p) {
    require(p >= 1.0, "l^p quasi-norm needs p >= 1");
    return QuasiNorm(Kind::EuclideanLp, p);
  }
  /// ((|x'|^2)^2 + c |x''|^2)^(1/4) on step-two groups.
  static QuasiNorm koranyi(double c = 16.0) {
    require(c > 0.0, "Koranyi coefficient must be positive");
    return QuasiNorm(Kind::Koranyi, c);
  }

  Kind kind() const { return kind_; }
  double parameter() const { return parameter_; }

  std::string describe() const {
    if (kind_ == Kind::Koranyi) return "koranyi(c=" + fmt(parameter_) + ")";
    return std::isinf(parameter_) ? std::string("lp(inf)") : "lp(" + fmt(parameter_) + ")";
  }

  double operator()(const StratifiedGroup& g, std::span<const double> x) const {
    if (kind_ == Kind::EuclideanLp) {
      if (!g.is_abelian())
        throw UnsupportedOperation("l^p norms are not dilation-homogeneous on " + g.name());
      if (std::isinf(parameter_)) {
        double m = 0.0;
        for (double v : x) m = std::max(m, std::abs(v));
        return m;
      }
      if (parameter_ == 2.0) {
        double s = 0.0;
        for (double v : x) s += v * v;
        return std::sqrt(s);
      }
      double s = 0.0;
      for (double v : x) s += std::pow(std::abs(v), parameter_);
      return std::pow(s, 1.0 / parameter_);
    }
    if (g.step() > 2) throw UnsupportedOperation("Koranyi norm is only provided up to step two");
    const std::size_t n1 = g.first_stratum_dim();
    double h = 0.0, v = 0.0;
    for (std::size_t k = 0; k < n1; ++k) h += x[k] * x[k];
    for (std::size_t k = n1; k < x.size(); ++k) v += x[k] * x[k];
    return std::pow(h * h + parameter_ * v, 0.25);
  }

  double operator()(const StratifiedGroup& g, const Point& x) const {
    g.check(x);
    return (*this)(g, x.span());
  }

 private:
  QuasiNorm(Kind k, double p) : kind_(k), parameter_(p) {}
  static std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
  }
  Kind kind_;
  double parameter_;
};

struct QuasiNormAxiomReport {
  double max_symmetry_residual = 0.0;
  double max_homogeneity_residual = 0.0;
  bool definite = true;
  std::size_t samples = 0;
  bool ok(double tol = 1e-12) const {
    return definite && max_symmetry_residual < tol && max_homogeneity_residual < tol;
  }
};

/// Random points with mixed scales; relative residuals.
inline QuasiNormAxiomReport verify_quasi_norm_axioms(const StratifiedGroup& g, const QuasiNorm& q,
                                                     std::size_t samples, std::uint64_t seed) {
  Rng rng(seed);
  QuasiNormAxiomReport rep;
  rep.samples = samples;
  rep.definite = q(g, g.identity()) == 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    Point x(std::vector<double>(g.dim()));
    double scale = rng.log_uniform(1e-2, 1e2);
    for (auto& c : x.coords) c = scale * rng.normal();
    double nx = q(g, x);
    if (!(nx > 0.0)) rep.definite = false;
    double ni = q(g, g.inverse(x));
    rep.max_symmetry_residual = std::max(rep.max_symmetry_residual, std::abs(ni - nx) / nx);
    double lambda = rng.log_uniform(0.1, 10.0);
    double nd = q(g, g.dilate(lambda, x));
    rep.max_homogeneity_residual =
        std::max(rep.max_homogeneity_residual, std::abs(nd - lambda * nx) / (lambda * nx));
  }
  return rep;
}

struct MaxRatioResult {
  double value = 0.0;
  std::size_t starts = 0;
  std::size_t agreeing = 0;
};

/// Inflation applied before M enters a Gaussian normalization.
inline constexpr double kMaxRatioSafety = 1.01;

namespace detail {

inline std::vector<double> sphere_point(std::span<const double> angles, std::size_t n) {
  std::vector<double> w(n, 1.0);
  double tail = 1.0;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    w[k] = tail * std::cos(angles[k]);
    tail *= std::sin(angles[k]);
  }
  w[n - 1] = tail;
  return w;
}

inline double first_stratum_ratio(const StratifiedGroup& g, const QuasiNorm& q,
                                  const std::vector<double>& w) {
  double rho = q(g, std::span<const double>(w));
  Point x = g.dilate(1.0 / rho, Point(w));
  double s = 0.0;
  for (std::size_t k = 0; k < g.first_stratum_dim(); ++k) s += x[k] * x[k];
  return std::sqrt(s);
}

}  // namespace detail

/// max |x'| over the unit quasi-sphere by multi-start Nelder-Mead over
/// hyperspherical angles. Raw value; callers inflate by kMaxRatioSafety.
inline MaxRatioResult first_stratum_max_ratio(const StratifiedGroup& g, const QuasiNorm& q,
                                              std::size_t starts = 24, std::uint64_t seed = 7) {
  const std::size_t n = g.dim();
  MaxRatioResult res;
  if (n == 1) {
    res.value = std::max(detail::first_stratum_ratio(g, q, {1.0}),
                         detail::first_stratum_ratio(g, q, {-1.0}));
    res.starts = res.agreeing = 2;
    return res;
  }
  Rng rng(seed);
  auto objective = [&](std::span<const double> a) {
    return -detail::first_stratum_ratio(g, q, detail::sphere_point(a, n));
  };
  std::vector<double> found;
  for (std::size_t s = 0; s < starts; ++s) {
    std::vector<double> a0(n - 1);
    for (auto& v : a0) v = rng.uniform(0.0, 2.0 * std::numbers::pi);
    auto r = nelder_mead(objective, a0, 0.3, 1e-12, 40000);
    // restart from the result to escape premature collapse on kinks
    r = nelder_mead(objective, r.x, 0.05, 1e-13, 40000);
    found.push_back(-r.value);
  }
  res.value = *std::max_element(found.begin(), found.end());
  res.starts = starts;
  for (double v : found)
    if (res.value - v <= 1e-9 * std::max(1.0, res.value)) ++res.agreeing;
  if (res.agreeing < 2)
    throw ConvergenceError("quasi-sphere maximization did not reproduce its optimum", res.value);
  return res;
}

}  // namespace strata

#endif  // STRATA_QUASI_NORM_HPP
