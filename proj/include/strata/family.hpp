#ifndef STRATA_FAMILY_HPP
#define STRATA_FAMILY_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "strata/errors.hpp"
#include "strata/field.hpp"
#include "strata/random.hpp"

namespace strata {

struct ParameterRange {
  std::string name;
  double lower = 0.0, upper = 0.0, initial = 0.0;
};

/// A parametric set of fields on one grid.
class FieldFamily {
 public:
  using Formula = std::function<cplx(std::span<const double> params, std::span<const double> x)>;

  FieldFamily(std::string name, GroupPtr group, GridSpec grid, std::vector<ParameterRange> params,
              Formula formula)
      : name_(std::move(name)),
        group_(std::move(group)),
        grid_(std::move(grid)),
        params_(std::move(params)),
        formula_(std::move(formula)) {
    for (const auto& p : params_)
      require(p.lower <= p.initial && p.initial <= p.upper, "family parameter '" + p.name + "' starts outside its range");
  }

  const std::string& name() const { return name_; }
  const GroupPtr& group() const { return group_; }
  const GridSpec& grid() const { return grid_; }
  const std::vector<ParameterRange>& parameters() const { return params_; }

  std::vector<double> initial() const {
    std::vector<double> v;
    for (const auto& p : params_) v.push_back(p.initial);
    return v;
  }

  ScalarField member(std::span<const double> params) const {
    require(params.size() == params_.size(), "wrong number of family parameters for " + name_);
    return sample(group_, grid_, [&](std::span<const double> x) { return formula_(params, x); });
  }

  const Formula& formula() const { return formula_; }

 private:
  std::string name_;
  GroupPtr group_;
  GridSpec grid_;
  std::vector<ParameterRange> params_;
  Formula formula_;
};

/// exp(-|x|^2/2) + c exp(-|x|^2/(2 s^2)) on euclidean groups. Dilations are
/// handled analytically by the estimators, so only the shape is free.
inline FieldFamily centered_gaussian_mixture_family(GroupPtr g, GridSpec grid, double s_min = 0.4) {
  require(g->is_abelian(), "Gaussian-mixture family needs a euclidean group");
  require(s_min > 0.0 && s_min < 0.95, "Gaussian-mixture family needs 0 < s_min < 0.95");
  return FieldFamily("gaussian-mixture", g, std::move(grid),
                     {{"c", 0.0, 3.0, 0.0}, {"s", s_min, 0.95, std::max(s_min, 0.7)}},
                     [](std::span<const double> p, std::span<const double> x) {
                       double r2 = 0.0;
                       for (double v : x) r2 += v * v;
                       return cplx(std::exp(-0.5 * r2) + p[0] * std::exp(-0.5 * r2 / (p[1] * p[1])));
                     });
}

/// exp(-|x'|^2/2 - kappa |x''|^2) (1 + c |x'|^2 + e |x''|^2): graded anisotropic
/// Gaussians times even polynomials.
inline FieldFamily graded_gaussian_family(GroupPtr g, GridSpec grid) {
  const std::size_t n1 = g->first_stratum_dim();
  return FieldFamily("graded-gaussian", g, std::move(grid),
                     {{"kappa", 0.25, 2.0, 0.5}, {"c", 0.0, 1.0, 0.0}, {"e", 0.0, 1.0, 0.0}},
                     [n1](std::span<const double> p, std::span<const double> x) {
                       double h = 0.0, v = 0.0;
                       for (std::size_t k = 0; k < x.size(); ++k) (k < n1 ? h : v) += x[k] * x[k];
                       return cplx(std::exp(-0.5 * h - p[0] * v) * (1.0 + p[1] * h + p[2] * v));
                     });
}

/// Random sum of Gaussian bumps with independent widths, centres and signs
/// of the amplitude kept positive. Returned as a plain formula.
struct GaussianMixture {
  struct Component {
    double amplitude, width;
    std::vector<double> centre;
  };
  std::vector<Component> components;

  double operator()(std::span<const double> x) const {
    double s = 0.0;
    for (const auto& c : components) {
      double r2 = 0.0;
      for (std::size_t k = 0; k < x.size(); ++k) r2 += (x[k] - c.centre[k]) * (x[k] - c.centre[k]);
      s += c.amplitude * std::exp(-0.5 * r2 / (c.width * c.width));
    }
    return s;
  }

  static GaussianMixture random(Rng& rng, std::size_t dim, std::size_t count, double width_lo,
                                double width_hi, double centre_spread) {
    GaussianMixture m;
    for (std::size_t i = 0; i < count; ++i) {
      Component c{rng.uniform(0.2, 1.0), rng.uniform(width_lo, width_hi), std::vector<double>(dim)};
      for (auto& v : c.centre) v = rng.uniform(-centre_spread, centre_spread);
      m.components.push_back(std::move(c));
    }
    return m;
  }
};

/// Product bump on a step-two group, optionally left-translated by b:
/// u(x) = exp(-alpha |y'|^2 - beta |y''|^2) with y = b^{-1} x.
struct GradedBump {
  GroupPtr group;
  double alpha = 1.0, beta = 1.0;
  Point shift;

  double operator()(std::span<const double> x) const {
    Point y(std::vector<double>(x.begin(), x.end()));
    if (!shift.coords.empty()) y = group->product(group->inverse(shift), y);
    const std::size_t n1 = group->first_stratum_dim();
    double h = 0.0, v = 0.0;
    for (std::size_t k = 0; k < y.size(); ++k) (k < n1 ? h : v) += y[k] * y[k];
    return std::exp(-alpha * h - beta * v);
  }
};

}  // namespace strata

#endif  // STRATA_FAMILY_HPP
