#ifndef STRATA_MEASURE_HPP
#define STRATA_MEASURE_HPP

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <cstdio>
#include <span>
#include <string>
#include <vector>

#include "strata/errors.hpp"
#include "strata/field.hpp"
#include "strata/quasi_norm.hpp"

namespace strata {

struct MeasureSpec {
  enum class Kind { Lebesgue, SemiGaussian };
  Kind kind = Kind::Lebesgue;
  double gamma = 1.0;

  static MeasureSpec lebesgue() { return {}; }
  /// gamma * exp(-|x'|^2/2) on the first stratum, Lebesgue on the rest.
  static MeasureSpec semi_gaussian(double gamma) {
    require(gamma > 0.0 && std::isfinite(gamma), "semi-Gaussian normalization must be positive");
    return {Kind::SemiGaussian, gamma};
  }

  double density(const StratifiedGroup& g, std::span<const double> x) const {
    if (kind == Kind::Lebesgue) return 1.0;
    double r2 = 0.0;
    for (std::size_t k = 0; k < g.first_stratum_dim(); ++k) r2 += x[k] * x[k];
    return gamma * std::exp(-0.5 * r2);
  }

  std::string describe() const {
    if (kind == Kind::Lebesgue) return "lebesgue";
    char buf[64];
    std::snprintf(buf, sizeof buf, "semi-gaussian(%.17g)", gamma);
    return buf;
  }
};

/// The weight |x|^exponent for a quasi-norm |.|.
struct WeightSpec {
  QuasiNorm norm = QuasiNorm::euclidean_lp(2.0);
  double exponent = 0.0;
  bool trivial() const { return exponent == 0.0; }
};

namespace detail {

template <std::size_t M>
double tensor_gauss(const StratifiedGroup& g, const QuasiNorm& q, double s,
                    std::span<const double> lo, std::span<const double> hi) {
  using rule = boost::math::quadrature::gauss<double, M>;
  std::vector<double> node, wt;
  const auto& a = rule::abscissa();
  const auto& w = rule::weights();
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0) {
      node.push_back(0.0), wt.push_back(w[i]);
    } else {
      node.push_back(a[i]), wt.push_back(w[i]);
      node.push_back(-a[i]), wt.push_back(w[i]);
    }
  }
  const std::size_t n = lo.size(), m = node.size();
  std::size_t total = 1;
  for (std::size_t k = 0; k < n; ++k) total *= m;
  std::vector<double> x(n);
  double sum = 0.0;
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t r = idx;
    double weight = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
      std::size_t j = r % m;
      r /= m;
      double c = 0.5 * (lo[k] + hi[k]), h = 0.5 * (hi[k] - lo[k]);
      x[k] = c + h * node[j];
      weight *= h * wt[j];
    }
    sum += weight * std::pow(q(g, std::span<const double>(x)), s);
  }
  return sum;
}

inline double box_power_integral(const StratifiedGroup& g, const QuasiNorm& q, double s,
                                 std::span<const double> lo, std::span<const double> hi) {
  if (lo.size() <= 2) return tensor_gauss<10>(g, q, s, lo, hi);
  if (lo.size() == 3) return tensor_gauss<6>(g, q, s, lo, hi);
  if (lo.size() <= 5) return tensor_gauss<4>(g, q, s, lo, hi);
  return tensor_gauss<2>(g, q, s, lo, hi);
}

/// Integral of |x|^s over the box with one corner at the identity and the
/// opposite corner at `corner`. The half-dilate of the box is a copy scaled by
/// 2^-(Q+s), so the box integral is the ring integral over 1 - 2^-(Q+s).
inline double corner_box_power_integral(const StratifiedGroup& g, const QuasiNorm& q, double s,
                                        std::span<const double> corner) {
  const std::size_t n = corner.size();
  const double Q = g.homogeneous_dim();
  require(Q + s > 0.0, "weight exponent is not locally integrable");
  std::vector<double> inner(n);
  for (std::size_t k = 0; k < n; ++k) inner[k] = corner[k] * std::pow(0.5, g.weight(k));
  double ring = 0.0;
  std::vector<double> lo(n), hi(n);
  for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
    for (std::size_t k = 0; k < n; ++k) {
      double a = (mask >> k) & 1 ? inner[k] : 0.0;
      double b = (mask >> k) & 1 ? corner[k] : inner[k];
      lo[k] = std::min(a, b);
      hi[k] = std::max(a, b);
    }
    // one composite split so the integrand near the inner box stays resolved
    std::vector<double> l2(n), h2(n);
    for (std::size_t sub = 0; sub < (std::size_t{1} << n); ++sub) {
      for (std::size_t k = 0; k < n; ++k) {
        double mid = 0.5 * (lo[k] + hi[k]);
        l2[k] = (sub >> k) & 1 ? mid : lo[k];
        h2[k] = (sub >> k) & 1 ? hi[k] : mid;
      }
      ring += box_power_integral(g, q, s, l2, h2);
    }
  }
  return ring / (1.0 - std::pow(2.0, -(Q + s)));
}

}  // namespace detail

/// Average of |x|^s over the cell [lo, hi], which must contain the identity.
inline double identity_cell_average(const StratifiedGroup& g, const QuasiNorm& q, double s,
                                    std::span<const double> lo, std::span<const double> hi) {
  const std::size_t n = lo.size();
  double total = 0.0, volume = 1.0;
  for (std::size_t k = 0; k < n; ++k) volume *= hi[k] - lo[k];
  std::vector<double> corner(n);
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    bool empty = false;
    for (std::size_t k = 0; k < n; ++k) {
      corner[k] = (mask >> k) & 1 ? hi[k] : lo[k];
      if (corner[k] == 0.0) empty = true;
    }
    if (!empty) total += detail::corner_box_power_integral(g, q, s, corner);
  }
  return total / volume;
}

/// Per-node factor |x|^(exponent*power); nodes whose cell touches the identity
/// use the cell average when the power is negative. Empty when trivial.
inline std::vector<double> weight_factors(const ScalarField& u, const WeightSpec* w, double power) {
  if (w == nullptr || w->trivial()) return {};
  const auto& g = u.group();
  const auto& grid = u.grid();
  const double s = w->exponent * power;
  std::vector<double> out(u.size());
  std::vector<double> lo(grid.dim()), hi(grid.dim());
  grid.for_each_node([&](std::size_t i, std::span<const double> x, auto) {
    bool touches = s < 0.0;
    for (std::size_t k = 0; k < grid.dim() && touches; ++k) {
      double h = grid.spacing(k);
      lo[k] = x[k] - 0.5 * h;
      hi[k] = x[k] + 0.5 * h;
      // node coordinates carry rounding; an edge this close is on the identity
      if (std::abs(lo[k]) < 1e-9 * h) lo[k] = 0.0;
      if (std::abs(hi[k]) < 1e-9 * h) hi[k] = 0.0;
      touches = lo[k] <= 0.0 && hi[k] >= 0.0;
    }
    out[i] = touches ? identity_cell_average(g, w->norm, s, lo, hi) : std::pow(w->norm(g, x), s);
  });
  return out;
}

/// Trapezoidal weights times the measure density.
inline std::vector<double> measure_weights(const ScalarField& u, const MeasureSpec& mu) {
  const auto& grid = u.grid();
  std::vector<double> out(u.size());
  const double cell = grid.cell_volume();
  const bool flat_density = mu.kind == MeasureSpec::Kind::Lebesgue;
  grid.for_each_node([&](std::size_t i, std::span<const double> x, std::span<const std::size_t> idx) {
    double w = cell;
    for (std::size_t k = 0; k < idx.size(); ++k)
      if (idx[k] == 0 || idx[k] + 1 == grid.count(k)) w *= 0.5;
    out[i] = flat_density ? w : w * mu.density(u.group(), x);
  });
  return out;
}

}  // namespace strata

#endif  // STRATA_MEASURE_HPP
