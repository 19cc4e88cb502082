#ifndef STRATA_GROUP_HPP
#define STRATA_GROUP_HPP

#include <cmath>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "strata/errors.hpp"

namespace strata {

/// Exponential coordinates of a group element, first stratum first.
struct Point {
  std::vector<double> coords;

  Point() = default;
  explicit Point(std::vector<double> c) : coords(std::move(c)) {}
  Point(std::initializer_list<double> c) : coords(c) {}

  std::size_t size() const { return coords.size(); }
  double operator[](std::size_t k) const { return coords[k]; }
  double& operator[](std::size_t k) { return coords[k]; }
  std::span<const double> span() const { return coords; }

  friend bool operator==(const Point&, const Point&) = default;
};

class StratifiedGroup {
 public:
  using ProductRule = std::function<Point(const Point&, const Point&)>;
  using InverseRule = std::function<Point(const Point&)>;
  /// p_j^i(x'): coefficient of the derivative along upper coordinate j in X_i.
  using FrameCoefficient =
      std::function<double(std::size_t i, std::size_t j, std::span<const double> first)>;

  StratifiedGroup(std::string name, std::vector<int> strata_dims, ProductRule product,
                  InverseRule inverse, FrameCoefficient frame)
      : name_(std::move(name)),
        strata_dims_(std::move(strata_dims)),
        product_(std::move(product)),
        inverse_(std::move(inverse)),
        frame_(std::move(frame)) {
    require(!strata_dims_.empty(), "group needs at least one stratum");
    for (int d : strata_dims_) require(d > 0, "strata dimensions must be positive");
    for (std::size_t s = 0; s < strata_dims_.size(); ++s)
      for (int k = 0; k < strata_dims_[s]; ++k) weights_.push_back(static_cast<int>(s) + 1);
  }

  const std::string& name() const { return name_; }
  const std::vector<int>& strata_dims() const { return strata_dims_; }
  std::size_t dim() const { return weights_.size(); }
  std::size_t first_stratum_dim() const { return static_cast<std::size_t>(strata_dims_[0]); }
  std::size_t step() const { return strata_dims_.size(); }
  bool is_abelian() const { return strata_dims_.size() == 1; }
  int weight(std::size_t k) const { return weights_.at(k); }
  const std::vector<int>& weights() const { return weights_; }

  double homogeneous_dim() const {
    return static_cast<double>(std::accumulate(weights_.begin(), weights_.end(), 0));
  }

  void check(const Point& x) const {
    if (x.size() != dim())
      throw InputError("point of dimension " + std::to_string(x.size()) + " used on " + name_ +
                       " (dimension " + std::to_string(dim()) + ")");
  }

  Point identity() const { return Point(std::vector<double>(dim(), 0.0)); }

  Point product(const Point& a, const Point& b) const {
    check(a);
    check(b);
    return product_(a, b);
  }

  Point inverse(const Point& x) const {
    check(x);
    return inverse_(x);
  }

  Point dilate(double lambda, const Point& x) const {
    check(x);
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw InputError("dilation factor must be positive");
    Point out = x;
    for (std::size_t k = 0; k < dim(); ++k) out[k] *= std::pow(lambda, weights_[k]);
    return out;
  }

  /// Coordinate volume of the dilated box; equals lambda^Q times the original.
  double dilated_box_volume(double lambda, std::span<const double> lo,
                            std::span<const double> hi) const {
    double v = 1.0;
    for (std::size_t k = 0; k < dim(); ++k) v *= std::pow(lambda, weights_[k]) * (hi[k] - lo[k]);
    return v;
  }

  double frame_coefficient(std::size_t i, std::size_t j, std::span<const double> first) const {
    return frame_ ? frame_(i, j, first) : 0.0;
  }

 private:
  std::string name_;
  std::vector<int> strata_dims_;
  std::vector<int> weights_;
  ProductRule product_;
  InverseRule inverse_;
  FrameCoefficient frame_;
};

using GroupPtr = std::shared_ptr<const StratifiedGroup>;

inline GroupPtr euclidean(int n) {
  require(n >= 1 && n <= 8, "euclidean dimension must be in 1..8");
  auto add = [](const Point& a, const Point& b) {
    Point c = a;
    for (std::size_t k = 0; k < c.size(); ++k) c[k] += b[k];
    return c;
  };
  auto neg = [](const Point& a) {
    Point c = a;
    for (auto& v : c.coords) v = -v;
    return c;
  };
  return std::make_shared<StratifiedGroup>("euclidean:" + std::to_string(n), std::vector<int>{n},
                                           add, neg, nullptr);
}

/// H^1 with (x,y,t)(x',y',t') = (x+x', y+y', t+t'+(xy'-yx')/2).
inline GroupPtr heisenberg() {
  auto mul = [](const Point& a, const Point& b) {
    return Point{a[0] + b[0], a[1] + b[1], a[2] + b[2] + 0.5 * (a[0] * b[1] - a[1] * b[0])};
  };
  auto inv = [](const Point& a) { return Point{-a[0], -a[1], -a[2]}; };
  // X = d_x - (y/2) d_t,  Y = d_y + (x/2) d_t
  auto frame = [](std::size_t i, std::size_t, std::span<const double> x) {
    return i == 0 ? -0.5 * x[1] : 0.5 * x[0];
  };
  return std::make_shared<StratifiedGroup>("heisenberg:1", std::vector<int>{2, 1}, mul, inv, frame);
}

using GroupFactory = std::function<GroupPtr(int)>;

inline std::map<std::string, GroupFactory>& group_registry_() {
  static std::map<std::string, GroupFactory> reg{
      {"euclidean", [](int n) { return euclidean(n); }},
      {"heisenberg",
       [](int n) {
         require(n == 1, "only heisenberg:1 is built in");
         return heisenberg();
       }},
  };
  return reg;
}

inline std::mutex& group_registry_mutex_() {
  static std::mutex m;
  return m;
}

/// Registers a group family under a prefix, selected later as "prefix:n".
inline void register_group(const std::string& prefix, GroupFactory factory) {
  std::lock_guard lock(group_registry_mutex_());
  group_registry_()[prefix] = std::move(factory);
}

inline GroupPtr make_group(const std::string& spec) {
  auto colon = spec.find(':');
  if (colon == std::string::npos) throw InputError("group name must look like 'family:n', got '" + spec + "'");
  std::string prefix = spec.substr(0, colon);
  int n = 0;
  try {
    std::size_t used = 0;
    n = std::stoi(spec.substr(colon + 1), &used);
    if (used != spec.size() - colon - 1) throw std::invalid_argument(spec);
  } catch (const std::exception&) {
    throw InputError("bad group index in '" + spec + "'");
  }
  GroupFactory f;
  {
    std::lock_guard lock(group_registry_mutex_());
    auto it = group_registry_().find(prefix);
    if (it == group_registry_().end()) throw InputError("unknown group '" + spec + "'");
    f = it->second;
  }
  return f(n);
}

}  // namespace strata

#endif  // STRATA_GROUP_HPP
