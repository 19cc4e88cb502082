#ifndef STRATA_CONSTANTS_HPP
#define STRATA_CONSTANTS_HPP

#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "strata/derivatives.hpp"
#include "strata/errors.hpp"
#include "strata/family.hpp"
#include "strata/optimize.hpp"
#include "strata/quadrature.hpp"
#include "strata/spectral.hpp"

namespace strata {

enum class BoundDirection { Exact, LowerBound, UpperBoundOnD0 };

inline const char* to_string(BoundDirection d) {
  switch (d) {
    case BoundDirection::Exact: return "exact";
    case BoundDirection::LowerBound: return "lower-bound";
    case BoundDirection::UpperBoundOnD0: return "upper-bound-on-d0";
  }
  return "?";
}

struct ConstantEstimate {
  double value = 0.0;
  BoundDirection direction = BoundDirection::Exact;
  std::string provenance;
  bool converged = true;

  static ConstantEstimate checked(double v, BoundDirection d, std::string prov, bool conv = true) {
    if (!(v > 0.0) || !std::isfinite(v)) throw InternalConsistencyError("constant " + prov + " is not positive and finite");
    return {v, d, std::move(prov), conv};
  }
};

/// I, J and the Nehari manifold for
///   J(u) = ||R^a u||_p^p + ||R^a2 u||_p^p - ||u||_q^q
/// (a2 = 0 gives the inhomogeneous Sobolev form). With `second_term` off only
/// the leading seminorm is kept.
struct NehariProblem {
  GroupPtr group;
  double a = 1.0;
  double a2 = 0.0;
  double p = 2.0;
  double q = 3.0;
  bool second_term = true;
  DerivativeScheme scheme = DerivativeScheme::Spectral;

  double Q() const { return group->homogeneous_dim(); }

  /// Upper end of the q-window; infinite when Q <= a p (low-dimensional
  /// euclidean cases where every q > p is admissible).
  double q_upper() const {
    double Qd = Q();
    return Qd > a * p ? Qd * p / (Qd - a * p) : std::numeric_limits<double>::infinity();
  }
  double q_lower() const {
    double Qd = Q();
    if (!second_term || a2 == 0.0) return p;
    return Qd > a2 * p ? Qd * p / (Qd - a2 * p) : std::numeric_limits<double>::infinity();
  }

  void validate() const {
    require(group != nullptr, "Nehari problem needs a group");
    require(p > 1.0, "Nehari problem needs p > 1");
    require(a > 0.0 && a2 >= 0.0 && a > a2, "Nehari problem needs a > a2 >= 0");
    require(q > q_lower() && q < q_upper(), "q outside the admissible window");
    if (!group->is_abelian())
      require(a == 1.0 && a2 == 0.0 && p == 2.0,
              "on " + group->name() + " only the sub-Laplacian case a = 1, p = 2 is available");
  }
};

struct NehariNorms {
  double lead = 0.0;    // ||R^a u||_p^p
  double second = 0.0;  // ||R^a2 u||_p^p, or 0 without the second term
  double lq = 0.0;      // ||u||_q^q
  double total() const { return lead + second; }
};

/// ||R^a u||_p^p against Lebesgue measure.
inline double operator_power(const ScalarField& u, double a, double p,
                             DerivativeScheme scheme = DerivativeScheme::Spectral) {
  if (a == 0.0) return std::pow(lp_norm(u, p), p);
  if (u.group().is_abelian()) {
    if (p == 2.0) {
      double n = fractional_sobolev_norm(u, a);
      return n * n;
    }
    return std::pow(lp_norm(fractional_apply(u, a), p), p);
  }
  if (a == 1.0 && p == 2.0) return horizontal_dirichlet(u, MeasureSpec::lebesgue(), scheme);
  throw UnsupportedOperation("fractional powers are only available on euclidean groups; use a = 1, p = 2 on " +
                             u.group().name());
}

inline NehariNorms nehari_norms(const ScalarField& u, const NehariProblem& prob) {
  NehariNorms n;
  n.lead = operator_power(u, prob.a, prob.p, prob.scheme);
  n.second = prob.second_term ? operator_power(u, prob.a2, prob.p, prob.scheme) : 0.0;
  n.lq = std::pow(lp_norm(u, prob.q), prob.q);
  return n;
}

inline double nehari_scale(const NehariNorms& n, const NehariProblem& prob) {
  if (!(n.lq > 0.0)) throw InputError("Nehari projection of a zero field");
  return std::pow(n.total() / n.lq, 1.0 / (prob.q - prob.p));
}

inline double nehari_scale(const ScalarField& u, const NehariProblem& prob) {
  return nehari_scale(nehari_norms(u, prob), prob);
}

/// I(t u) on the Nehari manifold: (1/p - 1/q) t^q ||u||_q^q.
inline double nehari_energy(const NehariNorms& n, const NehariProblem& prob) {
  double t = nehari_scale(n, prob);
  return (1.0 / prob.p - 1.0 / prob.q) * std::pow(t, prob.q) * n.lq;
}

/// ||u||_q^p / (sum of p-th power seminorms).
inline double sobolev_quotient(const NehariNorms& n, const NehariProblem& prob) {
  return std::pow(n.lq, prob.p / prob.q) / n.total();
}

inline double sobolev_constant_from_d0(double d0, double p, double q) {
  return std::pow(p * q / (q - p) * d0, (p - q) / q);
}

/// Best Gagliardo-Nirenberg constant in terms of d0 (two-operator form; a2 = 0
/// gives the Sobolev-norm version).
inline double gn_constant_from_d0(double d0, const NehariProblem& prob) {
  const double Q = prob.Q(), a1 = prob.a, a2 = prob.a2, p = prob.p, q = prob.q;
  const double D = a1 * p * q - Q * (q - p);
  const double E = Q * (q - p) - a2 * p * q;
  return (a1 - a2) * p * q / D * std::pow(E / D, -E / ((a1 - a2) * p * p)) *
         std::pow(D / ((a1 - a2) * (q - p)) * d0, (p - q) / p);
}

/// ||u||_q^q / (lead^theta1 second^theta2) with the GN exponents.
inline double gn_quotient(const NehariNorms& n, const NehariProblem& prob) {
  const double Q = prob.Q(), a1 = prob.a, a2 = prob.a2, p = prob.p, q = prob.q;
  const double t1 = (Q * (q - p) - a2 * p * q) / ((a1 - a2) * p * p);
  const double t2 = (a1 * p * q - Q * (q - p)) / ((a1 - a2) * p * p);
  return n.lq / (std::pow(n.lead, t1) * std::pow(n.second, t2));
}

/// Norms of u o delta_lambda from those of u (exact scaling laws).
inline NehariNorms dilate_norms(const NehariNorms& n, const NehariProblem& prob, double lambda) {
  const double Q = prob.Q();
  return {n.lead * std::pow(lambda, prob.a * prob.p - Q), n.second * std::pow(lambda, prob.a2 * prob.p - Q),
          n.lq * std::pow(lambda, -Q)};
}

/// Dilation minimizing I(t u_lambda); closed form from the stationarity
/// condition in log lambda.
inline double optimal_dilation(const NehariNorms& n, const NehariProblem& prob) {
  require(prob.second_term, "the homogeneous form has no optimal dilation");
  const double Q = prob.Q(), p = prob.p, q = prob.q;
  const double num = n.second * (Q * (q - p) - prob.a2 * p * q);
  const double den = n.lead * (prob.a * p * q - Q * (q - p));
  return std::pow(num / den, 1.0 / ((prob.a - prob.a2) * p));
}

/// Sobolev quotient and the d0-map of I(t u) for one field, cross-checked.
inline ConstantEstimate per_function_constant(const NehariNorms& n, const NehariProblem& prob) {
  double direct = sobolev_quotient(n, prob);
  double mapped = sobolev_constant_from_d0(nehari_energy(n, prob), prob.p, prob.q);
  if (std::abs(direct - mapped) > 1e-10 * std::abs(direct))
    throw InternalConsistencyError("Sobolev quotient and energy map disagree: " + std::to_string(direct) +
                                   " vs " + std::to_string(mapped));
  return ConstantEstimate::checked(direct, BoundDirection::LowerBound, "per-function");
}

inline ConstantEstimate per_function_constant(const ScalarField& u, const NehariProblem& prob) {
  prob.validate();
  return per_function_constant(nehari_norms(u, prob), prob);
}

/// Norms of family members, with the q-independent seminorms memoized.
class FamilyNorms {
 public:
  explicit FamilyNorms(FieldFamily family) : family_(std::move(family)) {}

  const FieldFamily& family() const { return family_; }

  NehariNorms operator()(std::span<const double> shape, const NehariProblem& prob) const {
    ScalarField u = family_.member(shape);
    Key key{std::vector<double>(shape.begin(), shape.end()), prob.a, prob.a2, prob.p, prob.second_term};
    NehariNorms n;
    bool hit = false;
    {
      std::lock_guard lock(mutex_);
      auto it = cache_.find(key);
      if (it != cache_.end()) n = it->second, hit = true;
    }
    if (!hit) {
      n.lead = operator_power(u, prob.a, prob.p, prob.scheme);
      n.second = prob.second_term ? operator_power(u, prob.a2, prob.p, prob.scheme) : 0.0;
      std::lock_guard lock(mutex_);
      cache_[key] = n;
    }
    n.lq = std::pow(lp_norm(u, prob.q), prob.q);
    return n;
  }

 private:
  using Key = std::tuple<std::vector<double>, double, double, double, bool>;
  FieldFamily family_;
  mutable std::mutex mutex_;
  mutable std::map<Key, NehariNorms> cache_;
};

struct D0Estimate {
  ConstantEstimate d0;
  std::vector<double> shape;
  double dilation = 1.0;
  NehariNorms norms;  // at the optimal dilation
  std::size_t evaluations = 0;
};

namespace detail {

inline double dilated_energy(const NehariNorms& base, const NehariProblem& prob, double& lambda) {
  lambda = optimal_dilation(base, prob);
  return nehari_energy(dilate_norms(base, prob, lambda), prob);
}

inline Box family_box(const FieldFamily& f) {
  Box b;
  for (const auto& p : f.parameters()) b.lower.push_back(p.lower), b.upper.push_back(p.upper);
  return b;
}

}  // namespace detail

/// Minimizes I(t u) over shape parameters (dilation in closed form) by
/// coordinate descent with golden-section line searches. Starting point
/// defaults to the family's initial parameters.
inline D0Estimate estimate_d0(const NehariProblem& prob, const FamilyNorms& fam,
                              std::vector<double> start = {}, double tol = 1e-3) {
  prob.validate();
  if (start.empty()) start = fam.family().initial();
  auto objective = [&](std::span<const double> s) {
    double lambda;
    return detail::dilated_energy(fam(s, prob), prob, lambda);
  };
  MinimizeResult r = coordinate_descent(objective, start, detail::family_box(fam.family()), tol);
  D0Estimate out;
  out.shape = r.x;
  NehariNorms base = fam(r.x, prob);
  double e = detail::dilated_energy(base, prob, out.dilation);
  out.norms = dilate_norms(base, prob, out.dilation);
  out.d0 = ConstantEstimate::checked(e, BoundDirection::UpperBoundOnD0, "family-optimized:" + fam.family().name(),
                                     r.converged);
  out.evaluations = r.evaluations;
  return out;
}

/// Same search, maximizing the per-function Sobolev quotient instead.
inline ConstantEstimate empirical_sup_sobolev(const NehariProblem& prob, const FamilyNorms& fam,
                                              std::vector<double> start = {}, double tol = 1e-3) {
  prob.validate();
  if (start.empty()) start = fam.family().initial();
  auto objective = [&](std::span<const double> s) {
    NehariNorms base = fam(s, prob);
    double lambda = optimal_dilation(base, prob);
    return -sobolev_quotient(dilate_norms(base, prob, lambda), prob);
  };
  MinimizeResult r = coordinate_descent(objective, start, detail::family_box(fam.family()), tol);
  return ConstantEstimate::checked(-r.value, BoundDirection::LowerBound, "empirical-sup:" + fam.family().name(),
                                   r.converged);
}

inline std::vector<double> log_q_grid(const NehariProblem& base, std::size_t count = 33, double margin = 1e-3,
                                      double cap_factor = 3.0) {
  require(count >= 1, "empty q-grid");
  double lo = base.p * (1.0 + margin);
  double upper = base.q_upper();
  double hi = std::isfinite(upper) ? upper * (1.0 - margin) : cap_factor * base.p;
  std::vector<double> qs;
  for (std::size_t i = 0; i < count; ++i) {
    double t = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
    qs.push_back(std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo))));
  }
  return qs;
}

struct ACurvePoint {
  double q, d0, c_gn, a_q;
  bool converged;
};

struct AEstimate {
  ConstantEstimate A;
  double argmin_q = 0.0;
  std::vector<ACurvePoint> curve;
};

/// A = min over the q-grid of C_GN(q)^(a p^2 / (Q (q - p))), with C_GN from the
/// family d0 estimate at each q. Warm-started along the grid.
inline AEstimate constant_A(NehariProblem base, const FamilyNorms& fam, const std::vector<double>& qs,
                            double tol = 1e-3) {
  if (qs.empty()) throw InputError("empty q-grid");
  base.a2 = 0.0;
  base.second_term = true;
  AEstimate out;
  double best = std::numeric_limits<double>::infinity();
  bool all_converged = true;
  std::vector<double> start = fam.family().initial();
  for (double q : qs) {
    NehariProblem prob = base;
    prob.q = q;
    D0Estimate d = estimate_d0(prob, fam, start, tol);
    start = d.shape;
    double c = gn_constant_from_d0(d.d0.value, prob);
    double aq = std::pow(c, prob.a * prob.p * prob.p / (prob.Q() * (q - prob.p)));
    out.curve.push_back({q, d.d0.value, c, aq, d.d0.converged});
    all_converged = all_converged && d.d0.converged;
    if (aq < best) best = aq, out.argmin_q = q;
  }
  out.A = ConstantEstimate::checked(best, BoundDirection::LowerBound, "family-optimized:" + fam.family().name(),
                                    all_converged);
  return out;
}

/// 2/(pi e n): the euclidean log-Sobolev constant (a = 1, p = 2).
inline ConstantEstimate exact_euclidean_A(int n) {
  require(n >= 1, "dimension must be positive");
  return ConstantEstimate::checked(2.0 / (std::numbers::pi * std::numbers::e * n), BoundDirection::Exact,
                                   "closed-form");
}

/// (Q/4 e^(2 n1/Q - 1) A)^(Q/2)
inline double gamma_from_A(double Q, double n1, double A) {
  require(Q >= n1 && n1 >= 1.0 && A > 0.0, "gamma needs Q >= n1 >= 1 and A > 0");
  return std::pow(0.25 * Q * std::exp(2.0 * n1 / Q - 1.0) * A, 0.5 * Q);
}

/// ((Q-b)/(2(2-b)) C e^((n1 + M^2/2)(2-b)/(Q-b) - 1))^((Q-b)/(2-b))
inline double gamma_weighted(double Q, double n1, double beta, double C, double M) {
  if (beta >= 2.0) throw InputError("beta >= 2: log-Hardy regime excluded");
  require(beta >= 0.0 && Q > 2.0, "weighted gamma needs 0 <= beta < 2 < Q");
  require(C > 0.0 && M > 0.0, "weighted gamma needs C, M > 0");
  const double r = (Q - beta) / (2.0 - beta);
  return std::pow((Q - beta) / (2.0 * (2.0 - beta)) * C * std::exp((n1 + 0.5 * M * M) / r - 1.0), r);
}

}  // namespace strata

#endif  // STRATA_CONSTANTS_HPP
