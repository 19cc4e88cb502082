#ifndef STRATA_INEQUALITIES_HPP
#define STRATA_INEQUALITIES_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "strata/constants.hpp"
#include "strata/derivatives.hpp"
#include "strata/errors.hpp"
#include "strata/field.hpp"
#include "strata/measure.hpp"
#include "strata/quadrature.hpp"
#include "strata/quasi_norm.hpp"

namespace strata {

enum class Verdict { Holds, Violated, ConstantRefined };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Holds: return "holds";
    case Verdict::Violated: return "violated";
    case Verdict::ConstantRefined: return "constant-refined";
  }
  return "?";
}

/// Relative slack tolerances. "strict" keeps 1e-8 on euclidean groups and
/// relaxes quadrature-dominated (non-abelian) cases; "grid" relaxes all.
struct ToleranceProfile {
  std::string name = "strict";
  double analytic = 1e-8;
  double quadrature = 1e-3;
  bool all_quadrature = false;

  static ToleranceProfile strict() { return {}; }
  static ToleranceProfile grid() { return {"grid", 1e-8, 1e-3, true}; }
  static ToleranceProfile from_name(const std::string& n) {
    if (n == "strict") return strict();
    if (n == "grid") return grid();
    throw InputError("unknown tolerance profile '" + n + "' (expected strict or grid)");
  }

  double relative_for(const StratifiedGroup* g) const {
    return all_quadrature || (g != nullptr && !g->is_abelian()) ? quadrature : analytic;
  }
};

struct CheckOptions {
  double rel_tol = 1e-8;
  std::optional<DerivativeScheme> scheme;

  DerivativeScheme scheme_or(DerivativeScheme d) const { return scheme.value_or(d); }
};

struct VerificationReport {
  std::string tag;
  std::string group;
  double lhs = 0.0, rhs = 0.0, slack = 0.0;
  double tolerance = 0.0;
  Verdict verdict = Verdict::Holds;
  std::string constant_name;
  std::optional<ConstantEstimate> constant;
  double normalization = 1.0;  // factor applied to the input before checking
  std::optional<double> boundary_decay;
  std::string grid;
  std::string measure;
  std::vector<std::pair<std::string, double>> diagnostics;

  bool holds() const { return verdict == Verdict::Holds; }
};

namespace detail {

inline VerificationReport finish(VerificationReport r, double rel_tol) {
  r.slack = r.rhs - r.lhs;
  r.tolerance = rel_tol * std::max(1.0, std::abs(r.rhs));
  if (!std::isfinite(r.lhs) || !std::isfinite(r.rhs))
    throw InternalConsistencyError(r.tag + ": non-finite side (lhs " + std::to_string(r.lhs) + ", rhs " +
                                   std::to_string(r.rhs) + ")");
  if (r.slack >= -r.tolerance) {
    r.verdict = Verdict::Holds;
  } else {
    bool estimated = r.constant && r.constant->direction != BoundDirection::Exact;
    r.verdict = estimated ? Verdict::ConstantRefined : Verdict::Violated;
  }
  return r;
}

inline VerificationReport field_report(std::string tag, const ScalarField& u, const MeasureSpec& mu) {
  VerificationReport r;
  r.tag = std::move(tag);
  r.group = u.group().name();
  r.grid = u.grid().describe();
  r.measure = mu.describe();
  r.boundary_decay = u.boundary_decay();
  return r;
}

inline void require_exponents(double p, double q) {
  require(p > 1.0, "exponent p must exceed 1");
  require(q > p, "exponents must satisfy p < q");
  require(std::isfinite(q), "exponent q must be finite");
}

}  // namespace detail

// ---- constant-free checks --------------------------------------------------

/// ||u||_r <= ||u||_p^a ||u||_q^(1-a) with 1/r = a/p + (1-a)/q.
inline VerificationReport check_interp(const WeightedView& v, double p, double r, double q, double a_mix,
                                       const CheckOptions& opt = {}) {
  require(p > 1.0 && p <= r && r <= q, "interpolation needs 1 < p <= r <= q");
  require(a_mix >= 0.0 && a_mix <= 1.0, "interpolation weight must lie in [0, 1]");
  require(std::abs(1.0 / r - (a_mix / p + (1.0 - a_mix) / q)) <= 1e-12,
          "interpolation exponents violate 1/r = a/p + (1-a)/q");
  VerificationReport rep;
  rep.tag = "interp";
  rep.lhs = lp_norm(v, r);
  rep.rhs = std::pow(lp_norm(v, p), a_mix) * std::pow(lp_norm(v, q), 1.0 - a_mix);
  return detail::finish(rep, opt.rel_tol);
}

inline VerificationReport check_interp(const ScalarField& u, double p, double r, double q, double a_mix,
                                       const MeasureSpec& mu = MeasureSpec::lebesgue(), const CheckOptions& opt = {}) {
  auto fq = field_quadrature(u, mu);
  auto rep = check_interp(fq.view(u), p, r, q, a_mix, opt);
  auto base = detail::field_report("interp", u, mu);
  base.lhs = rep.lhs, base.rhs = rep.rhs;
  return detail::finish(base, opt.rel_tol);
}

/// Entropy of |u|^p against (q/(q-p)) log(||u||_q^p / ||u||_p^p).
inline VerificationReport check_log_holder(const WeightedView& v, double p, double q, const CheckOptions& opt = {}) {
  detail::require_exponents(p, q);
  const double pp = power_integral(v, p);
  if (!(pp > 0.0)) throw InputError("log-Holder check needs a nonzero function");
  VerificationReport rep;
  rep.tag = "log-holder";
  rep.lhs = entropy(v, p);
  rep.rhs = q / (q - p) * (p / q * std::log(power_integral(v, q)) - std::log(pp));
  return detail::finish(rep, opt.rel_tol);
}

inline VerificationReport check_log_holder(const ScalarField& u, double p, double q,
                                           const MeasureSpec& mu = MeasureSpec::lebesgue(),
                                           const WeightSpec* w = nullptr, const CheckOptions& opt = {}) {
  detail::require_exponents(p, q);
  // the weight enters as |w u|, so the factor differs between the two powers
  auto fp = field_quadrature(u, mu, w, p);
  auto fqq = field_quadrature(u, mu, w, q);
  const double pp = power_integral(fp.view(u), p);
  if (!(pp > 0.0)) throw InputError("log-Holder check needs a nonzero function");
  auto rep = detail::field_report("log-holder", u, mu);
  rep.lhs = entropy(fp.view(u), p);
  rep.rhs = q / (q - p) * (p / q * std::log(power_integral(fqq.view(u), q)) - std::log(pp));
  return detail::finish(rep, opt.rel_tol);
}

/// log(||v||_2^2 / ||v||_1) <= integral of (|v|^2/||v||_2^2) log|v|.
inline VerificationReport check_jensen_step(const WeightedView& v, const CheckOptions& opt = {}) {
  const double p2 = power_integral(v, 2.0), p1 = power_integral(v, 1.0);
  if (!(p2 > 0.0)) throw InputError("Jensen step needs a nonzero function");
  std::vector<double> terms(v.values.size());
  for (std::size_t i = 0; i < terms.size(); ++i) {
    double a = std::abs(v.values[i]);
    terms[i] = a == 0.0 ? 0.0 : v.mass[i] * v.factor_at(i) * a * a * std::log(a);
  }
  VerificationReport rep;
  rep.tag = "jensen-step";
  rep.lhs = std::log(p2 / p1);
  rep.rhs = ordered_sum(terms) / p2;
  return detail::finish(rep, opt.rel_tol);
}

inline VerificationReport check_jensen_step(const ScalarField& v, const MeasureSpec& mu = MeasureSpec::lebesgue(),
                                            const CheckOptions& opt = {}) {
  auto fq = field_quadrature(v, mu);
  auto rep = check_jensen_step(fq.view(v), opt);
  auto base = detail::field_report("jensen-step", v, mu);
  base.lhs = rep.lhs, base.rhs = rep.rhs;
  return detail::finish(base, opt.rel_tol);
}

// ---- log-Sobolev family ----------------------------------------------------

/// 0 <= beta < a p < Q. On euclidean groups with p = 2 and beta = 0 any a > 0
/// is accepted (the sharp euclidean inequality needs no upper bound on a).
inline void validate_log_sobolev_window(const StratifiedGroup& g, double a, double p, double beta) {
  const double Q = g.homogeneous_dim();
  require(p > 1.0, "log-Sobolev needs p > 1");
  require(a > 0.0, "log-Sobolev needs a > 0");
  require(beta >= 0.0, "weight exponent beta must be nonnegative");
  if (beta >= a * p)
    throw InputError("beta >= a p: log-Hardy regime excluded (need 0 <= beta < a p < Q)");
  const bool relaxed = g.is_abelian() && p == 2.0 && beta == 0.0;
  if (!relaxed) require(a * p < Q, "log-Sobolev needs a p < Q");
  if (!g.is_abelian() && !(a == 1.0 && p == 2.0))
    throw UnsupportedOperation("on " + g.name() + " only a = 1, p = 2 (horizontal gradient) is available");
}

/// The weight exponent -beta/q with q = (Q - beta) p / (Q - a p).
inline double log_sobolev_weight_exponent(double Q, double a, double p, double beta) {
  if (beta == 0.0) return 0.0;
  const double q = (Q - beta) * p / (Q - a * p);
  return -beta / q;
}

namespace detail {

struct LogSobolevParts {
  double entropy = 0.0;
  double op = 0.0;  // ||R^a u||_p^p
  double np = 0.0;  // ||w u||_p^p
  double prefactor = 0.0;
};

inline LogSobolevParts log_sobolev_parts(const ScalarField& u, double a, double p, double beta,
                                         const QuasiNorm* norm, DerivativeScheme scheme) {
  const auto& g = u.group();
  validate_log_sobolev_window(g, a, p, beta);
  const double Q = g.homogeneous_dim();
  std::optional<WeightSpec> w;
  if (beta > 0.0) {
    require(norm != nullptr, "weighted log-Sobolev needs a quasi-norm");
    w = WeightSpec{*norm, log_sobolev_weight_exponent(Q, a, p, beta)};
  }
  auto fq = field_quadrature(u, MeasureSpec::lebesgue(), w ? &*w : nullptr, p);
  LogSobolevParts out;
  out.np = power_integral(fq.view(u), p);
  if (!(out.np > 0.0)) throw InputError("log-Sobolev check needs a nonzero function");
  out.entropy = entropy(fq.view(u), p);
  out.op = operator_power(u, a, p, scheme);
  out.prefactor = (Q - beta) / (a * p - beta);
  return out;
}

inline VerificationReport log_sobolev_core(std::string tag, const ScalarField& u, double a, double p, double beta,
                                           const QuasiNorm* norm, const ConstantEstimate& C, const CheckOptions& opt) {
  auto parts = log_sobolev_parts(u, a, p, beta, norm, opt.scheme_or(DerivativeScheme::Spectral));
  auto rep = field_report(std::move(tag), u, MeasureSpec::lebesgue());
  rep.constant_name = beta == 0.0 ? "A" : "C";
  rep.constant = C;
  rep.normalization = std::pow(parts.np, -1.0 / p);
  rep.lhs = parts.entropy;
  rep.rhs = parts.prefactor * std::log(C.value * parts.op / parts.np);
  rep.diagnostics = {{"operator_power", parts.op}, {"weighted_lp_power", parts.np}, {"prefactor", parts.prefactor}};
  return finish(rep, opt.rel_tol);
}

}  // namespace detail

/// Entropy of |u|^p <= (Q/(a p)) log(A ||u||_{dot L^p_a}^p / ||u||_p^p).
inline VerificationReport check_log_sobolev(const ScalarField& u, double a, double p, const ConstantEstimate& A,
                                            const CheckOptions& opt = {}) {
  return detail::log_sobolev_core("log-sobolev", u, a, p, 0.0, nullptr, A, opt);
}

/// Weighted version with w = |x|^(-beta/q); beta = 0 runs the unweighted path.
inline VerificationReport check_log_sobolev_weighted(const ScalarField& u, double a, double p, double beta,
                                                     const QuasiNorm& norm, const ConstantEstimate& C,
                                                     const CheckOptions& opt = {}) {
  return detail::log_sobolev_core("log-sobolev-weighted", u, a, p, beta, &norm, C, opt);
}

/// Smallest C for which the (weighted) log-Sobolev inequality holds for u.
inline double minimal_log_sobolev_constant(const ScalarField& u, double a, double p, double beta = 0.0,
                                           const QuasiNorm* norm = nullptr,
                                           DerivativeScheme scheme = DerivativeScheme::Spectral) {
  auto parts = detail::log_sobolev_parts(u, a, p, beta, norm, scheme);
  return parts.np / parts.op * std::exp(parts.entropy / parts.prefactor);
}

/// Norm exponents of the two-operator log-GN inequality; they sum to p.
inline std::pair<double, double> log_gn_exponents(double Q, double a1, double a2, double p, double q) {
  return {(Q * (q - p) - a2 * p * q) / ((a1 - a2) * q), (a1 * p * q - Q * (q - p)) / ((a1 - a2) * q)};
}

namespace detail {

inline NehariProblem log_gn_problem(const GroupPtr& g, double a1, double a2, double p, double q) {
  if (!g->is_abelian()) throw UnsupportedOperation("two-operator log-GN is only available on euclidean groups");
  NehariProblem prob{g, a1, a2, p, q, true};
  prob.validate();
  const double Q = prob.Q();
  if (!(p == 2.0)) require(p < Q / a1, "log-GN needs p < Q / a1");
  return prob;
}

struct LogGnParts {
  double entropy, log_mixed, np;
};

inline LogGnParts log_gn_parts(const ScalarField& u, double a1, double a2, double p, double q,
                               DerivativeScheme scheme) {
  auto prob = log_gn_problem(u.group_ptr(), a1, a2, p, q);
  auto [e1, e2] = log_gn_exponents(prob.Q(), a1, a2, p, q);
  auto fq = field_quadrature(u, MeasureSpec::lebesgue());
  LogGnParts out;
  out.np = power_integral(fq.view(u), p);
  if (!(out.np > 0.0)) throw InputError("log-GN check needs a nonzero function");
  out.entropy = entropy(fq.view(u), p);
  const double n1 = operator_power(u, a1, p, scheme), n2 = operator_power(u, a2, p, scheme);
  out.log_mixed = e1 / p * std::log(n1) + e2 / p * std::log(n2);
  return out;
}

}  // namespace detail

/// Entropy <= (q/(q-p)) log(C^(p/q) ||u||_{a1}^e1 ||u||_{a2}^e2 / ||u||_p^p).
inline VerificationReport check_log_gn(const ScalarField& u, double a1, double a2, double p, double q,
                                       const ConstantEstimate& C, const CheckOptions& opt = {}) {
  auto parts = detail::log_gn_parts(u, a1, a2, p, q, opt.scheme_or(DerivativeScheme::Spectral));
  auto rep = detail::field_report("log-gn", u, MeasureSpec::lebesgue());
  rep.constant_name = "C_GN";
  rep.constant = C;
  rep.normalization = std::pow(parts.np, -1.0 / p);
  rep.lhs = parts.entropy;
  rep.rhs = q / (q - p) * (p / q * std::log(C.value) + parts.log_mixed - std::log(parts.np));
  return detail::finish(rep, opt.rel_tol);
}

inline double minimal_log_gn_constant(const ScalarField& u, double a1, double a2, double p, double q,
                                      DerivativeScheme scheme = DerivativeScheme::Spectral) {
  auto parts = detail::log_gn_parts(u, a1, a2, p, q, scheme);
  return std::exp(q / p * (parts.entropy * (q - p) / q - parts.log_mixed + std::log(parts.np)));
}

/// Parameters of the logarithmic Caffarelli-Kohn-Nirenberg inequality.
struct CknParameters {
  double a = 1.0, p = 2.0, q = 3.0, r = 2.0;
  double delta = 1.0, beta = 0.0, gamma = 0.0;

  double balance(double Q) const {
    return q * (delta * Q + r * (beta * (1.0 - delta) - gamma - a * delta)) / (r * Q) + q * (1.0 - delta) / p;
  }

  void validate(double Q) const {
    require(p > 1.0 && r > 1.0 && std::isfinite(p) && std::isfinite(r), "CKN needs 1 < p, r < infinity");
    require(delta > 0.0 && delta <= 1.0, "CKN needs delta in (0, 1]");
    require(q > p && std::isfinite(q), "CKN needs q in (p, infinity)");
    if (delta != 1.0) require(q <= p / (1.0 - delta), "CKN needs q <= p/(1 - delta) for delta < 1");
    require(a * r > 0.0 && a * r < Q, "CKN needs 0 < a r < Q");
    require(delta * q * (Q - a * r - beta * r) <= r * (Q + q * gamma - q * beta) + 1e-12,
            "CKN needs delta q (Q - a r - beta r) <= r (Q + q gamma - q beta)");
    require(gamma > beta * (1.0 - delta) - delta * a, "CKN needs gamma > beta (1 - delta) - delta a");
    require(gamma <= beta * (1.0 - delta), "CKN needs gamma <= beta (1 - delta)");
    require(std::abs(balance(Q) - 1.0) <= 1e-12, "CKN balance equation violated");
  }
};

namespace detail {

struct CknParts {
  double entropy, log_ratio;
};

inline CknParts ckn_parts(const ScalarField& u, const CknParameters& k, const QuasiNorm& norm,
                          DerivativeScheme scheme) {
  k.validate(u.group().homogeneous_dim());
  WeightSpec wg{norm, k.gamma}, wb{norm, k.beta};
  auto fg = field_quadrature(u, MeasureSpec::lebesgue(), &wg, k.p);
  const double G = power_integral(fg.view(u), k.p);
  if (!(G > 0.0)) throw InputError("CKN check needs a nonzero function");
  const double B = k.delta == 1.0 ? 1.0 : power_integral(field_quadrature(u, MeasureSpec::lebesgue(), &wb, k.p).view(u), k.p);
  const double R = operator_power(u, k.a, k.r, scheme);
  CknParts out;
  out.entropy = entropy(fg.view(u), k.p);
  out.log_ratio = k.delta * k.p / k.r * std::log(R) + (1.0 - k.delta) * std::log(B) - std::log(G);
  return out;
}

}  // namespace detail

/// Weighted entropy <= (q/(q-p)) log(C ||R^a u||_r^(delta p) |||x|^beta u||_p^((1-delta) p) / |||x|^gamma u||_p^p).
inline VerificationReport check_log_ckn(const ScalarField& u, const CknParameters& k, const QuasiNorm& norm,
                                        const ConstantEstimate& C, const CheckOptions& opt = {}) {
  auto parts = detail::ckn_parts(u, k, norm, opt.scheme_or(DerivativeScheme::Spectral));
  auto rep = detail::field_report("log-ckn", u, MeasureSpec::lebesgue());
  rep.constant_name = "C";
  rep.constant = C;
  rep.lhs = parts.entropy;
  rep.rhs = k.q / (k.q - k.p) * (std::log(C.value) + parts.log_ratio);
  return detail::finish(rep, opt.rel_tol);
}

inline double minimal_log_ckn_constant(const ScalarField& u, const CknParameters& k, const QuasiNorm& norm,
                                       DerivativeScheme scheme = DerivativeScheme::Spectral) {
  auto parts = detail::ckn_parts(u, k, norm, scheme);
  return std::exp(parts.entropy * (k.q - k.p) / k.q - parts.log_ratio);
}

// ---- Nash ------------------------------------------------------------------

/// 0 <= beta < 2a < Q; euclidean beta = 0 accepts any a > 0.
inline void validate_nash_window(const StratifiedGroup& g, double a, double beta) {
  const double Q = g.homogeneous_dim();
  require(a > 0.0, "Nash needs a > 0");
  require(beta >= 0.0, "weight exponent beta must be nonnegative");
  if (beta >= 2.0 * a) throw InputError("beta >= 2a: log-Hardy regime excluded (need 0 <= beta < 2a < Q)");
  if (!(g.is_abelian() && beta == 0.0)) require(2.0 * a < Q, "Nash needs 2a < Q");
  if (!g.is_abelian() && a != 1.0)
    throw UnsupportedOperation("on " + g.name() + " only a = 1 (horizontal gradient) is available");
}

/// 2(2a - beta)/(Q - beta): the L^1 exponent; the L^2 exponent is 2 plus this.
inline double nash_exponent(double Q, double a, double beta) { return 2.0 * (2.0 * a - beta) / (Q - beta); }

namespace detail {

struct NashParts {
  double l2, l1, op, e;
};

inline NashParts nash_parts(const ScalarField& u, double a, double beta, const QuasiNorm* norm,
                            DerivativeScheme scheme) {
  const auto& g = u.group();
  validate_nash_window(g, a, beta);
  const double Q = g.homogeneous_dim();
  std::optional<WeightSpec> w;
  if (beta > 0.0) {
    require(norm != nullptr, "weighted Nash needs a quasi-norm");
    w = WeightSpec{*norm, -beta * (Q - 2.0 * a) / (2.0 * (Q - beta))};
  }
  const WeightSpec* wp = w ? &*w : nullptr;
  NashParts out;
  out.l2 = std::sqrt(power_integral(field_quadrature(u, MeasureSpec::lebesgue(), wp, 2.0).view(u), 2.0));
  out.l1 = power_integral(field_quadrature(u, MeasureSpec::lebesgue(), wp, 1.0).view(u), 1.0);
  if (!(out.l2 > 0.0)) throw InputError("Nash check needs a nonzero function");
  out.op = operator_power(u, a, 2.0, scheme);
  out.e = nash_exponent(Q, a, beta);
  return out;
}

}  // namespace detail

/// ||w u||_2^(2+e) <= C ||w u||_1^e ||u||_{dot H^a}^2, e = 2(2a-beta)/(Q-beta).
inline VerificationReport check_nash(const ScalarField& u, double a, const ConstantEstimate& C, double beta = 0.0,
                                     const QuasiNorm* norm = nullptr, const CheckOptions& opt = {}) {
  auto n = detail::nash_parts(u, a, beta, norm, opt.scheme_or(DerivativeScheme::Spectral));
  auto rep = detail::field_report(beta == 0.0 ? "nash" : "nash-weighted", u, MeasureSpec::lebesgue());
  rep.constant_name = beta == 0.0 ? "A2" : "C";
  rep.constant = C;
  rep.lhs = std::pow(n.l2, 2.0 + n.e);
  rep.rhs = C.value * std::pow(n.l1, n.e) * n.op;
  rep.diagnostics = {{"l1", n.l1}, {"l2", n.l2}, {"operator_power", n.op}, {"exponent", n.e}};
  return detail::finish(rep, opt.rel_tol);
}

inline double minimal_nash_constant(const ScalarField& u, double a, double beta = 0.0, const QuasiNorm* norm = nullptr,
                                    DerivativeScheme scheme = DerivativeScheme::Spectral) {
  auto n = detail::nash_parts(u, a, beta, norm, scheme);
  return std::pow(n.l2, 2.0 + n.e) / (std::pow(n.l1, n.e) * n.op);
}

// ---- Gross -------------------------------------------------------------------

/// -beta (Q - 2) / (2 (Q - beta)): the weight exponent of the weighted Gross form.
inline double gross_weight_exponent(double Q, double beta) {
  if (beta == 0.0) return 0.0;
  if (beta >= 2.0) throw InputError("beta >= 2: log-Hardy regime excluded");
  require(beta > 0.0, "weight exponent beta must be nonnegative");
  require(Q > 2.0, "weighted Gross needs Q > 2");
  return -beta * (Q - 2.0) / (2.0 * (Q - beta));
}

/// Integral of w^2 |g|^2 log(w |g|) dmu <= integral of |grad_H g|^2 dmu with
/// mu semi-Gaussian(gamma). g is rescaled to ||w g||_{L^2(mu)} = 1 unless it
/// already is to 1e-8; the applied factor is reported.
inline VerificationReport check_gross(const ScalarField& g, const ConstantEstimate& gamma, double beta = 0.0,
                                      const QuasiNorm* norm = nullptr, const CheckOptions& opt = {}) {
  const auto& G = g.group();
  const double s = gross_weight_exponent(G.homogeneous_dim(), beta);
  std::optional<WeightSpec> w;
  if (beta > 0.0) {
    require(norm != nullptr, "weighted Gross needs a quasi-norm");
    w = WeightSpec{*norm, s};
  }
  const auto mu = MeasureSpec::semi_gaussian(gamma.value);
  auto fq = field_quadrature(g, mu, w ? &*w : nullptr, 2.0);
  double nrm = std::sqrt(power_integral(fq.view(g), 2.0));
  if (!(nrm > 0.0)) throw InputError("Gross check needs a nonzero function");
  double factor = 1.0;
  ScalarField h = g;
  if (std::abs(nrm - 1.0) > 1e-8) {
    factor = 1.0 / nrm;
    h = g.scaled(factor);
    nrm = std::sqrt(power_integral(fq.view(h), 2.0));
    if (std::abs(nrm - 1.0) > 1e-8) throw InputError("Gross check: renormalization failed");
  }
  std::vector<double> terms(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    double a = std::abs(h[i]);
    if (a == 0.0) continue;
    double f2 = fq.factor.empty() ? 1.0 : fq.factor[i];
    double logw = fq.factor.empty() ? 0.0 : 0.5 * std::log(f2);
    terms[i] = fq.mass[i] * f2 * a * a * (std::log(a) + logw);
  }
  std::string tag = beta == 0.0 ? "gross" : (G.is_abelian() ? "gross-euclidean-lp" : "gross-weighted");
  auto rep = detail::field_report(tag, h, mu);
  rep.constant_name = "gamma";
  rep.constant = gamma;
  rep.normalization = factor;
  rep.lhs = ordered_sum(terms);
  rep.rhs = horizontal_dirichlet(h, mu, opt.scheme_or(DerivativeScheme::FiniteDifference4));
  return detail::finish(rep, opt.rel_tol);
}

/// M_p = max(n^(1/2 - 1/p), 1) for the l^p norm on R^n.
inline double euclidean_lp_max_ratio(int n, double p) {
  require(n >= 1 && p >= 1.0, "l^p ratio needs n >= 1 and p >= 1");
  double e = std::isinf(p) ? 0.5 : 0.5 - 1.0 / p;
  return std::max(std::pow(static_cast<double>(n), e), 1.0);
}

// ---- empirical mode ----------------------------------------------------------

/// Supremum of per-function minimal constants over a set of fields. A lower
/// bound on the sharp constant.
template <class Fields, class Minimal>
ConstantEstimate empirical_constant(const Fields& fields, Minimal&& minimal, const std::string& family_name) {
  require(!std::empty(fields), "empirical constant needs at least one field");
  double best = 0.0;
  for (const auto& u : fields) best = std::max(best, minimal(u));
  return ConstantEstimate::checked(best, BoundDirection::LowerBound, "empirical-sup:" + family_name);
}

}  // namespace strata

#endif  // STRATA_INEQUALITIES_HPP
