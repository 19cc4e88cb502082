#ifndef STRATA_DERIVATIVES_HPP
#define STRATA_DERIVATIVES_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <vector>

#include "strata/errors.hpp"
#include "strata/field.hpp"
#include "strata/quadrature.hpp"
#include "strata/spectral.hpp"

namespace strata {

enum class DerivativeScheme { FiniteDifference4, Spectral };

namespace detail {

// 4th-order one-sided rows, written on differences u_k - u_i so constants
// map to exactly zero.
inline constexpr std::array<double, 5> kEdge0{0.0, 48.0, -36.0, 16.0, -3.0};  // at i = 0
inline constexpr std::array<double, 5> kEdge1{-3.0, 0.0, 18.0, -6.0, 1.0};    // at i = 1

inline ScalarField fd4_partial(const ScalarField& u, std::size_t axis) {
  const auto& grid = u.grid();
  const std::size_t n = grid.count(axis), st = grid.stride(axis);
  const double inv = 1.0 / (12.0 * grid.spacing(axis));
  ScalarField out = u.same_shape();
  for (std::size_t flat = 0; flat < u.size(); ++flat) {
    const std::size_t i = grid.index_along(flat, axis);
    const std::size_t base = flat - i * st;
    auto at = [&](std::size_t j) { return u[base + j * st]; };
    const cplx c = u[flat];
    cplx d;
    if (i >= 2 && i + 2 < n) {
      d = -(at(i + 2) - c) + 8.0 * (at(i + 1) - c) - 8.0 * (at(i - 1) - c) + (at(i - 2) - c);
    } else if (i < 2) {
      const auto& row = i == 0 ? kEdge0 : kEdge1;
      for (std::size_t k = 0; k < 5; ++k) d += row[k] * (at(k) - c);
    } else {
      const auto& row = i + 1 == n ? kEdge0 : kEdge1;
      for (std::size_t k = 0; k < 5; ++k) d -= row[k] * (at(n - 1 - k) - c);
    }
    out[flat] = d * inv;
  }
  return out;
}

}  // namespace detail

inline ScalarField partial(const ScalarField& u, std::size_t axis,
                           DerivativeScheme scheme = DerivativeScheme::FiniteDifference4) {
  require(axis < u.grid().dim(), "derivative axis out of range");
  return scheme == DerivativeScheme::Spectral ? spectral_partial(u, axis) : detail::fd4_partial(u, axis);
}

/// X_i u = d_{x'_i} u + sum_j p_j^i(x') d_{x''_j} u for i < n1.
inline std::vector<ScalarField> horizontal_gradient(
    const ScalarField& u, DerivativeScheme scheme = DerivativeScheme::FiniteDifference4) {
  const auto& g = u.group();
  const std::size_t n1 = g.first_stratum_dim(), n = g.dim();
  std::vector<ScalarField> upper;
  for (std::size_t j = n1; j < n; ++j) upper.push_back(partial(u, j, scheme));
  std::vector<ScalarField> out;
  for (std::size_t i = 0; i < n1; ++i) {
    ScalarField xi = partial(u, i, scheme);
    if (!upper.empty()) {
      u.grid().for_each_node([&](std::size_t flat, std::span<const double> x, auto) {
        for (std::size_t j = n1; j < n; ++j)
          xi[flat] += g.frame_coefficient(i, j - n1, x.first(n1)) * upper[j - n1][flat];
      });
    }
    out.push_back(std::move(xi));
  }
  return out;
}

/// integral of |grad_H u|^2 against the measure.
inline double horizontal_dirichlet(const ScalarField& u, const MeasureSpec& mu = MeasureSpec::lebesgue(),
                                   DerivativeScheme scheme = DerivativeScheme::FiniteDifference4) {
  auto grad = horizontal_gradient(u, scheme);
  auto mass = measure_weights(u, mu);
  std::vector<double> terms(u.size(), 0.0);
  for (std::size_t i = 0; i < u.size(); ++i) {
    double s = 0.0;
    for (const auto& gi : grad) s += std::norm(gi[i]);
    terms[i] = mass[i] * s;
  }
  return ordered_sum(terms);
}

/// Second-order stencil of sum_i X_i^2 with zero exterior values. Rows are
/// precomputed so repeated application (heat stepping) is a tight loop.
class StencilOperator {
 public:
  explicit StencilOperator(const ScalarField& like) : grid_(like.grid()) {
    const auto& g = like.group();
    const std::size_t n = g.dim(), n1 = g.first_stratum_dim();
    std::vector<double> x;
    row_start_.push_back(0);
    for (std::size_t flat = 0; flat < grid_.size(); ++flat) {
      grid_.coordinates(flat, x);
      std::span<const double> first(x.data(), n1);
      std::map<long, double> row;
      auto d2 = [&](std::size_t a, double c) {
        double h2 = grid_.spacing(a) * grid_.spacing(a);
        add(row, flat, a, +1, c / h2);
        add(row, flat, a, -1, c / h2);
        row[0] += -2.0 * c / h2;
      };
      auto dab = [&](std::size_t a, std::size_t b, double c) {
        double f = c / (4.0 * grid_.spacing(a) * grid_.spacing(b));
        add2(row, flat, a, +1, b, +1, f);
        add2(row, flat, a, +1, b, -1, -f);
        add2(row, flat, a, -1, b, +1, -f);
        add2(row, flat, a, -1, b, -1, f);
      };
      auto d1 = [&](std::size_t a, double c) {
        double f = c / (2.0 * grid_.spacing(a));
        add(row, flat, a, +1, f);
        add(row, flat, a, -1, -f);
      };
      for (std::size_t i = 0; i < n1; ++i) {
        // X_i^2 = d_i^2 + 2 p_j d_i d_j + p_j p_k d_j d_k + (d_i p_j) d_j
        d2(i, 1.0);
        std::vector<double> p(n - n1), dp(n - n1);
        for (std::size_t j = n1; j < n; ++j) {
          p[j - n1] = g.frame_coefficient(i, j - n1, first);
          std::vector<double> xp(first.begin(), first.end()), xm = xp;
          const double e = 1e-3;
          xp[i] += e;
          xm[i] -= e;
          dp[j - n1] = (g.frame_coefficient(i, j - n1, xp) - g.frame_coefficient(i, j - n1, xm)) / (2.0 * e);
        }
        for (std::size_t j = n1; j < n; ++j) {
          double pj = p[j - n1];
          if (pj != 0.0) dab(i, j, 2.0 * pj);
          if (std::abs(dp[j - n1]) > 1e-12) d1(j, dp[j - n1]);
          for (std::size_t k = n1; k < n; ++k) {
            double c = pj * p[k - n1];
            if (c == 0.0) continue;
            if (j == k) d2(j, c);
            else dab(j, k, c);
          }
        }
      }
      for (auto [offset, c] : row) {
        if (c == 0.0 && offset != 0) continue;
        if (offset == kOutside) continue;
        cols_.push_back(static_cast<std::size_t>(static_cast<long>(flat) + offset));
        coef_.push_back(c);
      }
      row_start_.push_back(cols_.size());
    }
  }

  void apply(const std::vector<double>& in, std::vector<double>& out) const {
    out.resize(in.size());
    for (std::size_t r = 0; r + 1 < row_start_.size(); ++r) {
      double s = 0.0;
      for (std::size_t k = row_start_[r]; k < row_start_[r + 1]; ++k) s += coef_[k] * in[cols_[k]];
      out[r] = s;
    }
  }

  void apply(const std::vector<cplx>& in, std::vector<cplx>& out) const {
    out.resize(in.size());
    for (std::size_t r = 0; r + 1 < row_start_.size(); ++r) {
      cplx s = 0.0;
      for (std::size_t k = row_start_[r]; k < row_start_[r + 1]; ++k) s += coef_[k] * in[cols_[k]];
      out[r] = s;
    }
  }

  /// Gershgorin bound on the spectral radius.
  double gershgorin_radius() const {
    double m = 0.0;
    for (std::size_t r = 0; r + 1 < row_start_.size(); ++r) {
      double s = 0.0;
      for (std::size_t k = row_start_[r]; k < row_start_[r + 1]; ++k) s += std::abs(coef_[k]);
      m = std::max(m, s);
    }
    return m;
  }

  double max_diagonal() const {
    double m = 0.0;
    for (std::size_t r = 0; r + 1 < row_start_.size(); ++r)
      for (std::size_t k = row_start_[r]; k < row_start_[r + 1]; ++k)
        if (cols_[k] == r) m = std::max(m, std::abs(coef_[k]));
    return m;
  }

  /// Most negative off-diagonal entry; zero means the stencil is monotone.
  double min_offdiagonal() const {
    double m = 0.0;
    for (std::size_t r = 0; r + 1 < row_start_.size(); ++r)
      for (std::size_t k = row_start_[r]; k < row_start_[r + 1]; ++k)
        if (cols_[k] != r) m = std::min(m, coef_[k]);
    return m;
  }

 private:
  static constexpr long kOutside = -(1L << 62);

  long shift(std::size_t flat, std::size_t a, int da) const {
    std::size_t i = grid_.index_along(flat, a);
    if ((da < 0 && i == 0) || (da > 0 && i + 1 == grid_.count(a))) return kOutside;
    return da * static_cast<long>(grid_.stride(a));
  }
  void add(std::map<long, double>& row, std::size_t flat, std::size_t a, int da, double c) const {
    long s = shift(flat, a, da);
    if (s != kOutside) row[s] += c;
  }
  void add2(std::map<long, double>& row, std::size_t flat, std::size_t a, int da, std::size_t b, int db,
            double c) const {
    long s1 = shift(flat, a, da);
    if (s1 == kOutside) return;
    long s2 = shift(static_cast<std::size_t>(static_cast<long>(flat) + s1), b, db);
    if (s2 == kOutside) return;
    row[s1 + s2] += c;
  }

  GridSpec grid_;
  std::vector<std::size_t> row_start_;
  std::vector<std::size_t> cols_;
  std::vector<double> coef_;
};

/// sum_i X_i^2 u with the second-order stencil; boundary rows treat values
/// outside the box as zero.
inline ScalarField sub_laplacian(const ScalarField& u) {
  StencilOperator op(u);
  ScalarField out = u.same_shape();
  op.apply(u.values(), out.values());
  return out;
}

}  // namespace strata

#endif  // STRATA_DERIVATIVES_HPP
