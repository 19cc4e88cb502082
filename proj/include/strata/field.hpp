#ifndef STRATA_FIELD_HPP
#define STRATA_FIELD_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <ostream>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "strata/errors.hpp"
#include "strata/grid.hpp"
#include "strata/group.hpp"

namespace strata {

using cplx = std::complex<double>;

class ScalarField {
 public:
  ScalarField() = default;
  ScalarField(GroupPtr group, GridSpec grid)
      : group_(std::move(group)), grid_(std::move(grid)), values_(grid_.size()) {
    require(group_ != nullptr, "field needs a group");
    require(grid_.dim() == group_->dim(), "grid dimension does not match " + group_->name());
  }
  ScalarField(GroupPtr group, GridSpec grid, std::vector<cplx> values)
      : ScalarField(std::move(group), std::move(grid)) {
    require(values.size() == values_.size(), "value array length does not match the grid");
    values_ = std::move(values);
  }

  const StratifiedGroup& group() const { return *group_; }
  const GroupPtr& group_ptr() const { return group_; }
  const GridSpec& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  const std::vector<cplx>& values() const { return values_; }
  std::vector<cplx>& values() { return values_; }
  cplx operator[](std::size_t i) const { return values_[i]; }
  cplx& operator[](std::size_t i) { return values_[i]; }

  ScalarField same_shape() const { return ScalarField(group_, grid_); }

  ScalarField scaled(cplx c) const {
    ScalarField out = *this;
    for (auto& v : out.values_) v *= c;
    return out;
  }

  bool is_real(double tol = 0.0) const {
    return std::all_of(values_.begin(), values_.end(), [&](cplx v) { return std::abs(v.imag()) <= tol; });
  }

  double max_abs() const {
    double m = 0.0;
    for (auto v : values_) m = std::max(m, std::abs(v));
    return m;
  }

  double min_real() const {
    double m = values_.empty() ? 0.0 : values_[0].real();
    for (auto v : values_) m = std::min(m, v.real());
    return m;
  }

  /// Largest boundary modulus relative to the largest modulus overall.
  double boundary_decay() const {
    double top = max_abs();
    if (top == 0.0) return 0.0;
    double b = 0.0;
    for (std::size_t i = 0; i < size(); ++i)
      if (grid_.on_boundary(i)) b = std::max(b, std::abs(values_[i]));
    return b / top;
  }

  void write_csv(std::ostream& os) const {
    os << "index";
    for (std::size_t k = 0; k < grid_.dim(); ++k) os << ",x" << k;
    os << ",re,im\n";
    std::vector<double> x;
    char buf[64];
    for (std::size_t i = 0; i < size(); ++i) {
      grid_.coordinates(i, x);
      os << i;
      for (double c : x) std::snprintf(buf, sizeof buf, ",%.17g", c), os << buf;
      std::snprintf(buf, sizeof buf, ",%.17g,%.17g\n", values_[i].real(), values_[i].imag());
      os << buf;
    }
  }

 private:
  GroupPtr group_;
  GridSpec grid_;
  std::vector<cplx> values_;
};

/// Pointwise evaluation; formula takes the coordinate span and returns a real
/// or complex value.
template <class Formula>
ScalarField sample(GroupPtr group, const GridSpec& grid, Formula&& formula) {
  ScalarField u(std::move(group), grid);
  grid.for_each_node([&](std::size_t i, std::span<const double> x, auto) {
    cplx v = cplx(formula(x));
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw InputError("formula is not finite at grid index " + std::to_string(i));
    u[i] = v;
  });
  return u;
}

/// u o delta_lambda sampled on u's grid from the formula that produced u.
template <class Formula>
ScalarField sample_dilated(GroupPtr group, const GridSpec& grid, double lambda, Formula&& formula) {
  const auto& g = *group;
  return sample(group, grid, [&](std::span<const double> x) {
    std::vector<double> y(x.begin(), x.end());
    for (std::size_t k = 0; k < y.size(); ++k) y[k] *= std::pow(lambda, g.weight(k));
    return formula(std::span<const double>(y));
  });
}

inline void require_same_grid(const ScalarField& a, const ScalarField& b) {
  require(a.grid() == b.grid() && a.group().name() == b.group().name(), "fields live on different grids");
}

}  // namespace strata

#endif  // STRATA_FIELD_HPP
