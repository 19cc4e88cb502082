#ifndef STRATA_SUITE_HPP
#define STRATA_SUITE_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "strata/config.hpp"
#include "strata/constants.hpp"
#include "strata/family.hpp"
#include "strata/field.hpp"
#include "strata/group.hpp"
#include "strata/inequalities.hpp"
#include "strata/quasi_norm.hpp"
#include "strata/random.hpp"
#include "strata/report_io.hpp"
#include "strata/transforms.hpp"

namespace strata {

/// splitmix64 step; gives each case an independent stream from one seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline GridSpec default_estimation_grid(const StratifiedGroup& g) {
  std::vector<double> L;
  for (std::size_t k = 0; k < g.dim(); ++k) L.push_back(g.weight(k) == 1 ? 6.0 : 9.0);
  return GridSpec(L, std::vector<std::size_t>(g.dim(), 32));
}

/// Estimated constants shared by the cases of one run, computed once per group.
class ConstantProvider {
 public:
  explicit ConstantProvider(EstimationConfig cfg = {}) : cfg_(std::move(cfg)) {}

  const EstimationConfig& config() const { return cfg_; }

  /// Family estimate of the p = 2 log-Sobolev constant A (no safety factor).
  AEstimate raw_A(const GroupPtr& g) {
    std::lock_guard lock(mutex_);
    auto it = cache_.find(g->name());
    if (it != cache_.end()) return it->second;
    GridSpec grid = cfg_.grid && cfg_.grid->dim() == g->dim() ? *cfg_.grid : default_estimation_grid(*g);
    FamilyNorms fam(g->is_abelian() ? centered_gaussian_mixture_family(g, grid) : graded_gaussian_family(g, grid));
    NehariProblem base{g, 1.0, 0.0, 2.0, 3.0, true, DerivativeScheme::Spectral};
    auto est = constant_A(base, fam, log_q_grid(base, cfg_.q_points), cfg_.tol);
    cache_.emplace(g->name(), est);
    return est;
  }

  /// Raw estimate times the safety factor.
  ConstantEstimate inflated_A(const GroupPtr& g) {
    auto raw = raw_A(g).A;
    return inflate(raw, raw.value);
  }

  ConstantEstimate inflate(const ConstantEstimate& like, double raw_value) const {
    char buf[32];
    std::snprintf(buf, sizeof buf, "*%.4g", cfg_.safety);
    return ConstantEstimate::checked(raw_value * cfg_.safety, BoundDirection::LowerBound, like.provenance + buf,
                                     like.converged);
  }

 private:
  EstimationConfig cfg_;
  std::mutex mutex_;
  std::map<std::string, AEstimate> cache_;
};

namespace detail {

/// Calls f(i) for i < n on up to `jobs` threads. The first exception in index
/// order is rethrown after all work stops, so failures do not depend on timing.
template <class F>
void parallel_indexed(std::size_t n, unsigned jobs, F&& f) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      try {
        f(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  jobs = static_cast<unsigned>(std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(n, 1)));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace detail

// ---- members ------------------------------------------------------------------

struct DiscreteInstance {
  std::vector<cplx> values;
  std::vector<double> mass;
  double p = 2.0, q = 4.0, r = 3.0, a_mix = 0.5;

  WeightedView view() const { return {values, mass, {}}; }
};

/// ≤ atoms point masses with values in [0, 1]; exponents come from the case
/// or are drawn from (1, 8].
inline std::vector<DiscreteInstance> build_discrete(const CaseConfig& c, Rng& rng) {
  std::vector<DiscreteInstance> out;
  for (std::size_t m = 0; m < c.family.count; ++m) {
    DiscreteInstance d;
    std::size_t n = 1 + static_cast<std::size_t>(rng.index(c.family.atoms));
    for (std::size_t i = 0; i < n; ++i) {
      d.values.emplace_back(rng.uniform(0.01, 1.0));
      d.mass.push_back(rng.uniform(0.05, 1.0));
    }
    double e1 = rng.uniform(1.0 + 1e-3, 8.0), e2 = rng.uniform(1.0 + 1e-3, 8.0);
    if (e1 == e2) e2 = std::min(8.0, e1 + 0.5);
    d.p = c.params.p.value_or(std::min(e1, e2));
    d.q = c.params.q.value_or(std::max(e1, e2));
    d.a_mix = c.params.a_mix.value_or(rng.uniform());
    d.r = c.params.r.value_or(1.0 / (d.a_mix / d.p + (1.0 - d.a_mix) / d.q));
    out.push_back(std::move(d));
  }
  return out;
}

inline std::vector<ScalarField> build_fields(const CaseConfig& c, const GroupPtr& g, Rng& rng) {
  const auto& f = c.family;
  const GridSpec& grid = *c.grid;
  std::vector<ScalarField> out;
  for (std::size_t m = 0; m < f.count; ++m) {
    if (f.kind == "gaussian-mixture") {
      auto mix = GaussianMixture::random(rng, g->dim(), f.components, f.width.first, f.width.second, f.spread);
      out.push_back(sample(g, grid, mix));
    } else if (f.kind == "graded-bump") {
      GradedBump b{g, rng.uniform(f.alpha.first, f.alpha.second), rng.uniform(f.beta.first, f.beta.second), {}};
      if (f.shift > 0.0) {
        std::vector<double> s(g->dim());
        for (auto& v : s) v = rng.uniform(-f.shift, f.shift);
        b.shift = Point(s);
      }
      out.push_back(sample(g, grid, b));
    } else if (f.kind == "constant") {
      const double v = f.value;
      out.push_back(sample(g, grid, [v](std::span<const double>) { return v; }));
    } else {
      throw InputError("family '" + f.kind + "' does not produce grid fields");
    }
  }
  return out;
}

// ---- validation ---------------------------------------------------------------------

namespace detail {

inline double need(const std::optional<double>& v, const CaseConfig& c, const char* what) {
  if (!v) throw InputError(c.tag + " needs parameter " + what);
  return *v;
}

inline const QuasiNorm& need_norm(const CaseConfig& c) {
  if (!c.norm) throw InputError(c.tag + " needs a quasi-norm");
  return *c.norm;
}

inline CknParameters ckn_params(const CaseConfig& c) {
  CknParameters k;
  k.a = need(c.params.a, c, "a");
  k.p = need(c.params.p, c, "p");
  k.q = need(c.params.q, c, "q");
  k.r = need(c.params.r, c, "r");
  k.delta = need(c.params.delta, c, "delta");
  k.beta = c.params.beta.value_or(0.0);
  k.gamma = c.params.gamma.value_or(0.0);
  return k;
}

/// Parameters that are fixed for a whole case.
struct ResolvedCase {
  GroupPtr group;
  double a = 1.0, p = 2.0, beta = 0.0;
};

}  // namespace detail

/// Checks every parameter window before anything is computed. Throws
/// InputError (or UnsupportedOperation) with the reason.
inline detail::ResolvedCase validate_case(const CaseConfig& c) {
  using detail::need;
  detail::ResolvedCase rc;
  const auto& P = c.params;
  if (c.family.kind == "discrete") {
    if (c.tag == "interp" && P.p && P.q) {
      double r = P.r.value_or(1.0 / (P.a_mix.value_or(0.5) / *P.p + (1.0 - P.a_mix.value_or(0.5)) / *P.q));
      require(*P.p > 1.0 && *P.p <= r && r <= *P.q, "interpolation needs 1 < p <= r <= q");
    }
    return rc;
  }
  rc.group = make_group(c.group);
  const auto& G = *rc.group;
  const double Q = G.homogeneous_dim();
  rc.a = P.a.value_or(1.0);
  rc.p = P.p.value_or(2.0);
  rc.beta = P.beta.value_or(0.0);
  const std::string& t = c.tag;
  if (t == "interp") {
    double p = need(P.p, c, "p"), q = need(P.q, c, "q");
    double am = P.a_mix.value_or(0.5);
    double r = P.r.value_or(1.0 / (am / p + (1.0 - am) / q));
    require(p > 1.0 && p <= r && r <= q, "interpolation needs 1 < p <= r <= q");
    require(std::abs(1.0 / r - (am / p + (1.0 - am) / q)) <= 1e-12,
            "interpolation exponents violate 1/r = a/p + (1-a)/q");
  } else if (t == "log-holder") {
    require(need(P.p, c, "p") > 1.0 && need(P.q, c, "q") > *P.p, "need 1 < p < q");
  } else if (t == "log-sobolev" || t == "log-sobolev-weighted") {
    if (t == "log-sobolev-weighted") {
      rc.beta = need(P.beta, c, "beta");
      detail::need_norm(c);
    } else {
      require(rc.beta == 0.0, "unweighted log-Sobolev takes no beta");
    }
    validate_log_sobolev_window(G, rc.a, rc.p, rc.beta);
  } else if (t == "log-gn") {
    detail::log_gn_problem(rc.group, need(P.a1, c, "a1"), need(P.a2, c, "a2"), need(P.p, c, "p"),
                           need(P.q, c, "q"));
  } else if (t == "log-ckn") {
    detail::ckn_params(c).validate(Q);
    detail::need_norm(c);
  } else if (t == "nash" || t == "nash-weighted") {
    if (t == "nash-weighted") {
      rc.beta = need(P.beta, c, "beta");
      detail::need_norm(c);
    } else {
      require(rc.beta == 0.0, "unweighted Nash takes no beta");
    }
    rc.p = 2.0;
    validate_nash_window(G, rc.a, rc.beta);
    validate_log_sobolev_window(G, rc.a, 2.0, rc.beta);
  } else if (t == "gross" || t == "gross-weighted" || t == "gross-euclidean-lp") {
    rc.a = 1.0, rc.p = 2.0;
    if (t == "gross") {
      require(rc.beta == 0.0, "unweighted Gross takes no beta");
    } else {
      gross_weight_exponent(Q, rc.beta);
      const auto& n = detail::need_norm(c);
      if (t == "gross-weighted")
        require(!G.is_abelian() && n.kind() == QuasiNorm::Kind::Koranyi,
                "gross-weighted runs on a step-two group with a Koranyi norm");
      else
        require(G.is_abelian() && n.kind() == QuasiNorm::Kind::EuclideanLp,
                "gross-euclidean-lp runs on R^n with an l^p norm");
      require(Q > 2.0, "weighted Gross needs Q > 2");
      if (rc.beta > 0.0) validate_log_sobolev_window(G, 1.0, 2.0, rc.beta);
    }
    if (!G.is_abelian()) require(G.step() == 2, "Gross cases need a step-two group");
  }
  if (c.constant.kind == ConstantSource::Kind::Table) lookup_constant(read_constants_csv(c.constant.table), c.constant.name, c.group);
  if (is_constant_free(t) && c.constant.kind != ConstantSource::Kind::Auto)
    throw InputError("constant-free tags take no constant");
  return rc;
}

// ---- running ---------------------------------------------------------------------

struct SuiteOptions {
  ToleranceProfile profile = ToleranceProfile::strict();
  unsigned jobs = 1;
};

struct SuiteResult {
  std::uint64_t seed = 0;
  std::string profile;
  std::vector<CaseReport> reports;

  std::size_t count(Verdict v) const {
    return static_cast<std::size_t>(
        std::count_if(reports.begin(), reports.end(), [v](const CaseReport& r) { return r.report.verdict == v; }));
  }
};

namespace detail {

inline bool uses_log_sobolev_constant(const std::string& t) {
  return t == "log-sobolev" || t == "log-sobolev-weighted" || t == "nash" || t == "nash-weighted" ||
         t.rfind("gross", 0) == 0;
}

inline bool is_gross(const std::string& t) { return t.rfind("gross", 0) == 0; }

class CaseRunner {
 public:
  CaseRunner(const CaseConfig& c, const ResolvedCase& rc, ConstantProvider& provider, double rel_tol)
      : c_(c), rc_(rc), provider_(provider) {
    opt_.rel_tol = rel_tol;
    opt_.scheme = c.scheme;
  }

  std::vector<VerificationReport> run(const std::vector<ScalarField>& fields) {
    fields_ = &fields;
    if (is_constant_free(c_.tag)) {
      std::vector<VerificationReport> out;
      for (const auto& u : fields) out.push_back(constant_free(u));
      return out;
    }
    bool estimated = false;
    ConstantEstimate K = check_constant(estimated);
    auto out = check_all(K);
    bool refine = false;
    for (const auto& r : out) refine = refine || r.verdict == Verdict::ConstantRefined;
    if (estimated && refine) {
      // enlarge the family behind the estimate with the case's own members
      auto base = provider_.raw_A(rc_.group).A;
      double raw = std::max(base.value, member_sup());
      base.provenance += "+case-members";
      underlying_ = provider_.inflate(base, raw);
      double before = K.value;
      K = map_underlying(underlying_);
      out = check_all(K);
      for (auto& r : out) r.diagnostics.emplace_back("refined_from", before);
    }
    return out;
  }

 private:
  const CaseConfig& c_;
  ResolvedCase rc_;
  ConstantProvider& provider_;
  CheckOptions opt_;
  const std::vector<ScalarField>* fields_ = nullptr;
  ConstantEstimate underlying_;

  VerificationReport constant_free(const ScalarField& u) const {
    const auto& P = c_.params;
    MeasureSpec mu = c_.measure == "semi-gaussian" ? MeasureSpec::semi_gaussian(c_.measure_gamma) : MeasureSpec::lebesgue();
    if (c_.tag == "interp") {
      double am = P.a_mix.value_or(0.5);
      double r = P.r.value_or(1.0 / (am / *P.p + (1.0 - am) / *P.q));
      return check_interp(u, *P.p, r, *P.q, am, mu, opt_);
    }
    if (c_.tag == "log-holder") return check_log_holder(u, *P.p, *P.q, mu, nullptr, opt_);
    return check_jensen_step(u, mu, opt_);
  }

  const QuasiNorm* norm() const { return c_.norm ? &*c_.norm : nullptr; }

  /// Per-member constant of the inequality the check constant is derived from.
  double member_constant(const ScalarField& u) const {
    const auto scheme = opt_.scheme_or(DerivativeScheme::Spectral);
    if (is_gross(c_.tag)) return minimal_log_sobolev_constant(tilt(u, 1.0), 1.0, 2.0, rc_.beta, norm(), scheme);
    if (uses_log_sobolev_constant(c_.tag))
      return minimal_log_sobolev_constant(u, rc_.a, rc_.p, rc_.beta, norm(), scheme);
    const auto& P = c_.params;
    if (c_.tag == "log-gn") return minimal_log_gn_constant(u, *P.a1, *P.a2, *P.p, *P.q, scheme);
    return minimal_log_ckn_constant(u, ckn_params(c_), *c_.norm, scheme);
  }

  double member_sup() const {
    double best = 0.0;
    for (const auto& u : *fields_) best = std::max(best, member_constant(u));
    return best;
  }

  /// Turns the underlying constant into the one the verifier takes.
  ConstantEstimate map_underlying(const ConstantEstimate& C) const {
    if (!is_gross(c_.tag)) return C;
    const auto& G = *rc_.group;
    const double Q = G.homogeneous_dim(), n1 = static_cast<double>(G.first_stratum_dim());
    double gamma;
    std::string how;
    if (c_.tag == "gross") {
      gamma = gamma_from_A(Q, n1, C.value);
      how = "gamma-from-A:";
    } else {
      double M;
      if (c_.tag == "gross-euclidean-lp") {
        M = euclidean_lp_max_ratio(static_cast<int>(G.dim()), c_.norm->parameter());
      } else {
        M = first_stratum_max_ratio(G, *c_.norm).value * kMaxRatioSafety;
      }
      gamma = gamma_weighted(Q, n1, rc_.beta, C.value, M);
      how = "gamma-weighted(M=" + fmt_double(M) + "):";
    }
    return ConstantEstimate::checked(gamma, C.direction, how + C.provenance, C.converged);
  }

  ConstantEstimate check_constant(bool& estimated) {
    estimated = false;
    const auto& src = c_.constant;
    if (src.kind == ConstantSource::Kind::Value) {
      return ConstantEstimate::checked(src.value, src.direction == "exact" ? BoundDirection::Exact : BoundDirection::LowerBound,
                                       "config");
    }
    if (src.kind == ConstantSource::Kind::Table) {
      auto K = lookup_constant(read_constants_csv(src.table), src.name, c_.group);
      K.provenance = "table:" + src.name + ":" + K.provenance;
      return K;
    }
    const auto& G = *rc_.group;
    const bool lsob = uses_log_sobolev_constant(c_.tag);
    if (src.kind == ConstantSource::Kind::Auto && lsob && rc_.a == 1.0 && rc_.p == 2.0 && rc_.beta == 0.0) {
      if (G.is_abelian()) {
        underlying_ = exact_euclidean_A(static_cast<int>(G.dim()));
        return map_underlying(underlying_);
      }
      estimated = true;
      underlying_ = provider_.inflated_A(rc_.group);
      return map_underlying(underlying_);
    }
    underlying_ = ConstantEstimate::checked(member_sup(), BoundDirection::LowerBound, "empirical-sup:" + c_.family.kind);
    return map_underlying(underlying_);
  }

  VerificationReport check_one(const ScalarField& u, const ConstantEstimate& K) const {
    const auto& t = c_.tag;
    const auto& P = c_.params;
    if (t == "log-sobolev") return check_log_sobolev(u, rc_.a, rc_.p, K, opt_);
    if (t == "log-sobolev-weighted") return check_log_sobolev_weighted(u, rc_.a, rc_.p, rc_.beta, *c_.norm, K, opt_);
    if (t == "nash" || t == "nash-weighted") return check_nash(u, rc_.a, K, rc_.beta, norm(), opt_);
    if (is_gross(t)) return check_gross(u, K, rc_.beta, norm(), opt_);
    if (t == "log-gn") return check_log_gn(u, *P.a1, *P.a2, *P.p, *P.q, K, opt_);
    return check_log_ckn(u, ckn_params(c_), *c_.norm, K, opt_);
  }

  std::vector<VerificationReport> check_all(const ConstantEstimate& K) const {
    std::vector<VerificationReport> out;
    for (const auto& u : *fields_) out.push_back(check_one(u, K));
    return out;
  }
};

inline std::vector<CaseReport> run_case(const CaseConfig& c, const ResolvedCase& rc, std::uint64_t seed,
                                        ConstantProvider& provider, const ToleranceProfile& profile) {
  Rng rng(seed);
  std::vector<CaseReport> out;
  if (c.family.kind == "discrete") {
    CheckOptions opt;
    opt.rel_tol = profile.relative_for(nullptr);
    auto members = build_discrete(c, rng);
    for (std::size_t m = 0; m < members.size(); ++m) {
      const auto& d = members[m];
      VerificationReport r;
      if (c.tag == "interp") {
        r = check_interp(d.view(), d.p, d.r, d.q, d.a_mix, opt);
      } else if (c.tag == "log-holder") {
        r = check_log_holder(d.view(), d.p, d.q, opt);
      } else {
        r = check_jensen_step(d.view(), opt);
      }
      r.group = c.group;
      r.measure = "discrete(" + std::to_string(d.values.size()) + " atoms)";
      out.push_back({c.name, m, seed, std::move(r)});
    }
    return out;
  }
  auto fields = build_fields(c, rc.group, rng);
  CaseRunner runner(c, rc, provider, profile.relative_for(rc.group.get()));
  auto reps = runner.run(fields);
  for (std::size_t m = 0; m < reps.size(); ++m) out.push_back({c.name, m, seed, std::move(reps[m])});
  return out;
}

}  // namespace detail

/// Validates every case, then runs them (case-parallel with opt.jobs
/// workers). Reports come back in case order; the first failure in case order
/// is rethrown.
inline SuiteResult run_suite(const SuiteConfig& cfg, const SuiteOptions& opt) {
  std::vector<detail::ResolvedCase> resolved;
  for (const auto& c : cfg.cases) {
    try {
      resolved.push_back(validate_case(c));
    } catch (const InputError& e) {
      throw InputError("case '" + c.name + "': " + e.what());
    } catch (const UnsupportedOperation& e) {
      throw UnsupportedOperation("case '" + c.name + "': " + e.what());
    }
  }

  ConstantProvider provider(cfg.estimation);
  std::vector<std::vector<CaseReport>> per_case(cfg.cases.size());
  detail::parallel_indexed(cfg.cases.size(), opt.jobs, [&](std::size_t i) {
    per_case[i] = detail::run_case(cfg.cases[i], resolved[i], mix_seed(cfg.seed, i), provider, opt.profile);
  });

  SuiteResult res;
  res.seed = cfg.seed;
  res.profile = opt.profile.name;
  for (auto& v : per_case)
    for (auto& r : v) res.reports.push_back(std::move(r));
  return res;
}

}  // namespace strata

#endif  // STRATA_SUITE_HPP
