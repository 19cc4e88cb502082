#ifndef STRATA_GRID_HPP
#define STRATA_GRID_HPP

#include <cstddef>
#include <cstdio>
#include <span>
#include <string>
#include <vector>

#include "strata/errors.hpp"

namespace strata {

/// Uniform grid on the box [-L_k, L_k]; last coordinate varies fastest.
class GridSpec {
 public:
  GridSpec() = default;
  GridSpec(std::vector<double> half_width, std::vector<std::size_t> count)
      : half_width_(std::move(half_width)), count_(std::move(count)) {
    require(!count_.empty() && count_.size() == half_width_.size(),
            "grid needs one half-width and one count per coordinate");
    for (std::size_t k = 0; k < count_.size(); ++k) {
      require(count_[k] >= 16, "grid needs at least 16 points per coordinate");
      require(half_width_[k] > 0.0, "grid half-width must be positive");
    }
    strides_.assign(count_.size(), 1);
    for (std::size_t k = count_.size() - 1; k-- > 0;) strides_[k] = strides_[k + 1] * count_[k + 1];
    size_ = strides_[0] * count_[0];
  }

  static GridSpec uniform(std::size_t dim, double L, std::size_t N) {
    return GridSpec(std::vector<double>(dim, L), std::vector<std::size_t>(dim, N));
  }

  std::size_t dim() const { return count_.size(); }
  std::size_t size() const { return size_; }
  std::size_t count(std::size_t k) const { return count_[k]; }
  double half_width(std::size_t k) const { return half_width_[k]; }
  const std::vector<std::size_t>& counts() const { return count_; }
  const std::vector<double>& half_widths() const { return half_width_; }
  std::size_t stride(std::size_t k) const { return strides_[k]; }
  double spacing(std::size_t k) const { return 2.0 * half_width_[k] / static_cast<double>(count_[k] - 1); }
  double coordinate(std::size_t k, std::size_t i) const {
    return -half_width_[k] + static_cast<double>(i) * spacing(k);
  }
  double cell_volume() const {
    double v = 1.0;
    for (std::size_t k = 0; k < dim(); ++k) v *= spacing(k);
    return v;
  }

  std::size_t index_along(std::size_t flat, std::size_t k) const { return (flat / strides_[k]) % count_[k]; }

  void coordinates(std::size_t flat, std::vector<double>& x) const {
    x.resize(dim());
    for (std::size_t k = 0; k < dim(); ++k) x[k] = coordinate(k, index_along(flat, k));
  }

  /// Visits nodes in flat order with their coordinates and multi-index.
  template <class F>
  void for_each_node(F&& f) const {
    const std::size_t n = dim();
    std::vector<std::size_t> idx(n, 0);
    std::vector<double> x(n);
    for (std::size_t k = 0; k < n; ++k) x[k] = coordinate(k, 0);
    for (std::size_t flat = 0; flat < size_; ++flat) {
      f(flat, std::span<const double>(x), std::span<const std::size_t>(idx));
      for (std::size_t k = n; k-- > 0;) {
        if (++idx[k] < count_[k]) {
          x[k] = coordinate(k, idx[k]);
          break;
        }
        idx[k] = 0;
        x[k] = coordinate(k, 0);
      }
    }
  }

  bool on_boundary(std::size_t flat) const {
    for (std::size_t k = 0; k < dim(); ++k) {
      std::size_t i = index_along(flat, k);
      if (i == 0 || i + 1 == count_[k]) return true;
    }
    return false;
  }

  std::string describe() const {
    std::string s;
    for (std::size_t k = 0; k < dim(); ++k) {
      if (k) s += " x ";
      char buf[64];
      std::snprintf(buf, sizeof buf, "%zu@[-%g,%g]", count_[k], half_width_[k], half_width_[k]);
      s += buf;
    }
    return s;
  }

  friend bool operator==(const GridSpec& a, const GridSpec& b) {
    return a.count_ == b.count_ && a.half_width_ == b.half_width_;
  }

 private:
  std::vector<double> half_width_;
  std::vector<std::size_t> count_;
  std::vector<std::size_t> strides_;
  std::size_t size_ = 0;
};

}  // namespace strata

#endif  // STRATA_GRID_HPP
