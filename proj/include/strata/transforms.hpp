#ifndef STRATA_TRANSFORMS_HPP
#define STRATA_TRANSFORMS_HPP

#include <cmath>
#include <numbers>
#include <vector>

#include "strata/constants.hpp"
#include "strata/derivatives.hpp"
#include "strata/errors.hpp"
#include "strata/field.hpp"
#include "strata/inequalities.hpp"
#include "strata/quadrature.hpp"

namespace strata {

namespace detail {

inline std::vector<double> tilt_factors(const ScalarField& u, double gamma) {
  require(gamma > 0.0 && std::isfinite(gamma), "tilt needs gamma > 0");
  const std::size_t n1 = u.group().first_stratum_dim();
  const double root = std::sqrt(gamma);
  std::vector<double> out(u.size());
  u.grid().for_each_node([&](std::size_t i, std::span<const double> x, auto) {
    double r2 = 0.0;
    for (std::size_t k = 0; k < n1; ++k) r2 += x[k] * x[k];
    out[i] = root * std::exp(-0.25 * r2);
  });
  return out;
}

inline void require_unit_l2(const ScalarField& f, const char* what) {
  double n = lp_norm(f, 2.0);
  if (std::abs(n - 1.0) > 1e-8)
    throw InputError(std::string(what) + " needs ||f||_2 = 1 (got " + std::to_string(n) + ")");
}

}  // namespace detail

/// f = gamma^(1/2) exp(-|x'|^2/4) g
inline ScalarField tilt(const ScalarField& g, double gamma) {
  auto k = detail::tilt_factors(g, gamma);
  ScalarField f = g;
  for (std::size_t i = 0; i < f.size(); ++i) f[i] *= k[i];
  return f;
}

/// g = gamma^(-1/2) exp(|x'|^2/4) f
inline ScalarField untilt(const ScalarField& f, double gamma) {
  auto k = detail::tilt_factors(f, gamma);
  ScalarField g = f;
  for (std::size_t i = 0; i < g.size(); ++i) g[i] /= k[i];
  return g;
}

struct TiltPair {
  ScalarField g, f;
  double gamma;

  static TiltPair from_g(ScalarField g, double gamma) {
    ScalarField f = tilt(g, gamma);
    return {std::move(g), std::move(f), gamma};
  }
  static TiltPair from_f(ScalarField f, double gamma) {
    ScalarField g = untilt(f, gamma);
    return {std::move(g), std::move(f), gamma};
  }

  /// ||g||_{L^2(mu)} - ||f||_{L^2}
  double norm_gap() const {
    return lp_norm(g, 2.0, MeasureSpec::semi_gaussian(gamma)) - lp_norm(f, 2.0);
  }
};

/// normalizes f in L^2(dx); pure helper for the identities below
inline ScalarField normalized_l2(const ScalarField& f) {
  double n = lp_norm(f, 2.0);
  require(n > 0.0, "cannot normalize a zero field");
  return f.scaled(1.0 / n);
}

struct DirichletIdentity {
  double lhs = 0.0;  // integral of |grad_H g|^2 dmu
  double rhs = 0.0;  // integral of |grad_H f|^2 + |x'|^2/4 |f|^2 dx - n1/2
  double residual = 0.0;
  double energy = 0.0;  // integral of |grad_H f|^2 dx
  double moment = 0.0;  // integral of |x'|^2/4 |f|^2 dx
};

/// Left side from the untilted g with finite differences under the
/// semi-Gaussian measure; right side from f with spectral derivatives under
/// Lebesgue measure. gamma cancels and only sets the scale of g.
inline DirichletIdentity dirichlet_identity(const ScalarField& f, double gamma = 1.0) {
  detail::require_unit_l2(f, "Dirichlet identity");
  const std::size_t n1 = f.group().first_stratum_dim();
  ScalarField g = untilt(f, gamma);
  DirichletIdentity d;
  d.lhs = horizontal_dirichlet(g, MeasureSpec::semi_gaussian(gamma), DerivativeScheme::FiniteDifference4);
  d.energy = horizontal_dirichlet(f, MeasureSpec::lebesgue(), DerivativeScheme::Spectral);
  d.moment = integrate_nodes(f, MeasureSpec::lebesgue(), [&](std::size_t i, std::span<const double> x) {
    double r2 = 0.0;
    for (std::size_t k = 0; k < n1; ++k) r2 += x[k] * x[k];
    return 0.25 * r2 * std::norm(f[i]);
  });
  d.rhs = d.energy + d.moment - 0.5 * static_cast<double>(n1);
  d.residual = d.lhs - d.rhs;
  return d;
}

struct PartsResiduals {
  std::vector<double> first;  // Re integral conj(d_i f) x'_i f + 1/2, per first-stratum i
  std::vector<double> mixed;  // Re integral p_j^i conj(d_j'' f) x'_i f, per (i, j) pair
  double max_imag = 0.0;      // largest |Im| among the integrals
  double max_abs() const {
    double m = 0.0;
    for (double v : first) m = std::max(m, std::abs(v));
    for (double v : mixed) m = std::max(m, std::abs(v));
    return m;
  }
};

/// The two integration-by-parts identities behind the Dirichlet identity.
inline PartsResiduals parts_identities(const ScalarField& f) {
  detail::require_unit_l2(f, "integration-by-parts identities");
  const auto& G = f.group();
  const std::size_t n1 = G.first_stratum_dim(), n = G.dim();
  auto mass = measure_weights(f, MeasureSpec::lebesgue());
  PartsResiduals out;
  std::vector<ScalarField> upper;
  for (std::size_t j = n1; j < n; ++j) upper.push_back(partial(f, j, DerivativeScheme::Spectral));
  auto integrate = [&](auto&& term) {
    std::vector<double> re(f.size()), im(f.size());
    f.grid().for_each_node([&](std::size_t k, std::span<const double> x, auto) {
      cplx v = term(k, x);
      re[k] = mass[k] * v.real();
      im[k] = mass[k] * v.imag();
    });
    out.max_imag = std::max(out.max_imag, std::abs(ordered_sum(im)));
    return ordered_sum(re);
  };
  for (std::size_t i = 0; i < n1; ++i) {
    ScalarField di = partial(f, i, DerivativeScheme::Spectral);
    out.first.push_back(
        integrate([&](std::size_t k, std::span<const double> x) { return std::conj(di[k]) * x[i] * f[k]; }) + 0.5);
    for (std::size_t j = n1; j < n; ++j) {
      const auto& dj = upper[j - n1];
      out.mixed.push_back(integrate([&](std::size_t k, std::span<const double> x) {
        return G.frame_coefficient(i, j - n1, x.first(n1)) * std::conj(dj[k]) * x[i] * f[k];
      }));
    }
  }
  return out;
}

struct DilationOptimum {
  double epsilon = 0.0;
  double bound = 0.0;        // minimized right-hand side
  double closed_form = 0.0;  // (Q/4) log(A E)
  double residual = 0.0;
};

/// Minimizes eps^2 E - (Q/2) log eps + (Q/4) log(Q A/(4e)) over eps > 0.
inline DilationOptimum optimize_dilation(double E, double Q, double A) {
  if (!(E > 0.0)) throw InputError("dilation optimum needs a positive Dirichlet energy (constant field?)");
  require(Q > 0.0 && A > 0.0, "dilation optimum needs Q, A > 0");
  DilationOptimum d;
  d.epsilon = std::sqrt(Q / (4.0 * E));
  const double e = d.epsilon;
  d.bound = e * e * E - 0.5 * Q * std::log(e) + 0.25 * Q * std::log(Q * A / (4.0 * std::numbers::e));
  d.closed_form = 0.25 * Q * std::log(A * E);
  d.residual = d.bound - d.closed_form;
  if (std::abs(d.residual) > 1e-10 * std::max(1.0, std::abs(d.closed_form)))
    throw InternalConsistencyError("dilation optimum does not reproduce (Q/4) log(A E)");
  return d;
}

inline DilationOptimum optimize_dilation(const ScalarField& f, double A,
                                         DerivativeScheme scheme = DerivativeScheme::Spectral) {
  return optimize_dilation(horizontal_dirichlet(f, MeasureSpec::lebesgue(), scheme), f.group().homogeneous_dim(), A);
}

struct EquivalenceRoundtrip {
  double slack_gross = 0.0;     // slack of the semi-Gaussian form for g = untilt(f)
  double slack_lebesgue = 0.0;  // slack of (Q/4) log(A E) - integral |f|^2 log|f|
  double predicted_gap = 0.0;   // (Q/4)(r - 1 - log r), r = 4E/Q
  double residual = 0.0;        // (slack_gross - slack_lebesgue) - predicted_gap
};

/// Closes the chain between the two equivalent forms numerically; gamma is
/// taken from A.
inline EquivalenceRoundtrip equivalence_roundtrip(const ScalarField& f, const ConstantEstimate& A,
                                                  const CheckOptions& opt = {}) {
  detail::require_unit_l2(f, "equivalence roundtrip");
  const auto& G = f.group();
  const double Q = G.homogeneous_dim(), n1 = static_cast<double>(G.first_stratum_dim());
  const double gamma = gamma_from_A(Q, n1, A.value);
  auto gamma_est = ConstantEstimate::checked(gamma, A.direction, "from-A:" + A.provenance, A.converged);
  auto rep = check_gross(untilt(f, gamma), gamma_est, 0.0, nullptr, opt);
  const double E = horizontal_dirichlet(f, MeasureSpec::lebesgue(), opt.scheme_or(DerivativeScheme::Spectral));
  std::vector<double> terms(f.size());
  auto mass = measure_weights(f, MeasureSpec::lebesgue());
  for (std::size_t i = 0; i < f.size(); ++i) {
    double a = std::abs(f[i]);
    terms[i] = a == 0.0 ? 0.0 : mass[i] * a * a * std::log(a);
  }
  EquivalenceRoundtrip out;
  out.slack_gross = rep.slack;
  out.slack_lebesgue = 0.25 * Q * std::log(A.value * E) - ordered_sum(terms);
  const double r = 4.0 * E / Q;
  out.predicted_gap = 0.25 * Q * (r - 1.0 - std::log(r));
  out.residual = out.slack_gross - out.slack_lebesgue - out.predicted_gap;
  return out;
}

/// The split estimate used by the weighted form: integral of |x'|^2/4 w^2|f|^2
/// is at most M^2/4 plus integral of |x'|^2/4 |f|^2, when ||w f||_2 = 1 and
/// w = |x|^s with s <= 0. Returns right minus left.
inline double moment_split_slack(const ScalarField& f, const QuasiNorm& norm, double s, double M) {
  require(s <= 0.0, "moment split needs a nonpositive weight exponent");
  const auto& G = f.group();
  const std::size_t n1 = G.first_stratum_dim();
  WeightSpec w{norm, s};
  auto fq = field_quadrature(f, MeasureSpec::lebesgue(), &w, 2.0);
  const double nrm = power_integral(fq.view(f), 2.0);
  require(std::abs(nrm - 1.0) <= 1e-8, "moment split needs ||w f||_2 = 1");
  std::vector<double> left(f.size()), right(f.size());
  f.grid().for_each_node([&](std::size_t i, std::span<const double> x, auto) {
    double r2 = 0.0;
    for (std::size_t k = 0; k < n1; ++k) r2 += x[k] * x[k];
    double a2 = std::norm(f[i]);
    double wf = fq.factor.empty() ? 1.0 : fq.factor[i];
    left[i] = fq.mass[i] * 0.25 * r2 * wf * a2;
    right[i] = fq.mass[i] * 0.25 * r2 * a2;
  });
  return 0.25 * M * M + ordered_sum(right) - ordered_sum(left);
}

}  // namespace strata

#endif  // STRATA_TRANSFORMS_HPP
