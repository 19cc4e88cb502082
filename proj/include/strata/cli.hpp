#ifndef STRATA_CLI_HPP
#define STRATA_CLI_HPP

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "strata/config.hpp"
#include "strata/constants.hpp"
#include "strata/errors.hpp"
#include "strata/family.hpp"
#include "strata/heat.hpp"
#include "strata/report_io.hpp"
#include "strata/suite.hpp"

namespace strata {

enum ExitCode : int { kExitOk = 0, kExitViolated = 1, kExitConfig = 2, kExitInternal = 3, kExitOther = 4 };

struct CliOptions {
  std::string config;
  std::filesystem::path out = "out";
  unsigned jobs = 1;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> tolerance_profile;
  std::ostream* log = &std::cerr;
};

namespace detail {

/// Maps exceptions to exit codes; body returns the success code.
template <class Body>
int guarded(const CliOptions& o, const char* cmd, Body&& body) {
  try {
    return body();
  } catch (const InputError& e) {
    *o.log << cmd << ": config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const UnsupportedOperation& e) {
    *o.log << cmd << ": config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const InternalConsistencyError& e) {
    *o.log << cmd << ": internal consistency error: " << e.what() << "\n";
    return kExitInternal;
  } catch (const std::exception& e) {
    *o.log << cmd << ": error: " << e.what() << "\n";
    return kExitOther;
  }
}

inline std::string file_stem(const std::string& s) {
  std::string out = s;
  for (auto& c : out)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.')) c = '_';
  return out;
}

}  // namespace detail

/// Runs a verification suite; writes reports.json and summary.csv. Exit 0 iff
/// no case is violated.
inline int cmd_verify(const CliOptions& o) {
  return detail::guarded(o, "verify", [&] {
    SuiteConfig cfg = parse_suite(load_json_file(o.config), o.config);
    if (o.seed) cfg.seed = *o.seed;
    SuiteOptions so;
    so.profile = ToleranceProfile::from_name(o.tolerance_profile.value_or(cfg.tolerance_profile.value_or("strict")));
    so.jobs = o.jobs;
    SuiteResult res = run_suite(cfg, so);
    write_atomic(o.out / "reports.json", [&](std::ostream& os) { write_reports_json(os, res.reports); });
    write_atomic(o.out / "summary.csv", [&](std::ostream& os) { write_summary_csv(os, res.reports); });
    const auto bad = res.count(Verdict::Violated);
    *o.log << "verify: " << res.reports.size() << " reports, " << res.count(Verdict::Holds) << " holds, "
           << res.count(Verdict::ConstantRefined) << " constant-refined, " << bad << " violated (seed " << res.seed
           << ", profile " << res.profile << ")\n";
    return bad == 0 ? kExitOk : kExitViolated;
  });
}

namespace detail {

inline FieldFamily estimation_family(const GroupPtr& g, const GridSpec& grid) {
  return g->is_abelian() ? centered_gaussian_mixture_family(g, grid) : graded_gaussian_family(g, grid);
}

inline void write_curve(const std::filesystem::path& path, const AEstimate& est) {
  write_atomic(path, [&](std::ostream& os) {
    for (const auto& c : est.curve) os << fmt_double(c.q) << ' ' << fmt_double(c.a_q) << '\n';
  });
}

}  // namespace detail

/// Writes constants.csv (plus q-curves of estimated A). Stalled optimizers are
/// flagged in the table, not treated as errors.
inline int cmd_constants(const CliOptions& o) {
  return detail::guarded(o, "constants", [&] {
    ConstantsConfig cfg = parse_constants(load_json_file(o.config), o.config);
    std::vector<ConstantRecord> rows;
    std::map<std::string, AEstimate> a_cache;
    std::size_t stalled = 0;
    for (const auto& row : cfg.rows) {
      GroupPtr g = make_group(row.group);
      const double Q = g->homogeneous_dim(), n1 = static_cast<double>(g->first_stratum_dim());
      GridSpec grid = row.grid ? *row.grid : default_estimation_grid(*g);
      ConstantRecord rec;
      rec.name = row.quantity;
      rec.group = row.group;
      rec.p = row.p;
      rec.a = row.a;
      if (row.quantity == "A" || row.quantity == "gamma") {
        require(row.a == 1.0 && row.p == 2.0, row.quantity + " rows are defined for a = 1, p = 2");
        bool exact = row.method == "exact" || (row.method == "auto" && g->is_abelian());
        ConstantEstimate A;
        if (exact) {
          require(g->is_abelian(), "no closed-form A on " + row.group);
          A = exact_euclidean_A(static_cast<int>(g->dim()));
        } else {
          const std::string key = row.group + "|" + grid.describe() + "|" + std::to_string(row.q_points) + "|" +
                                  fmt_double(row.tol);
          auto it = a_cache.find(key);
          if (it == a_cache.end()) {
            FamilyNorms fam(detail::estimation_family(g, grid));
            NehariProblem base{g, 1.0, 0.0, 2.0, 3.0, true, DerivativeScheme::Spectral};
            it = a_cache.emplace(key, constant_A(base, fam, log_q_grid(base, row.q_points), row.tol)).first;
          }
          const AEstimate& est = it->second;
          A = est.A;
          rec.q = est.argmin_q;
          detail::write_curve(o.out / ("A_curve_" + detail::file_stem(row.group) + ".dat"), est);
        }
        if (row.quantity == "A") {
          rec.estimate = A;
        } else {
          rec.estimate = ConstantEstimate::checked(gamma_from_A(Q, n1, A.value), A.direction,
                                                   "gamma-from-A:" + A.provenance, A.converged);
        }
      } else {
        require(row.method != "exact", "no closed form for " + row.quantity);
        NehariProblem prob{g, row.a, row.a2, row.p, *row.q, true, DerivativeScheme::Spectral};
        prob.validate();
        rec.q = *row.q;
        FamilyNorms fam(detail::estimation_family(g, grid));
        D0Estimate d = estimate_d0(prob, fam, {}, row.tol);
        if (row.quantity == "d0") {
          rec.estimate = d.d0;
        } else {
          double v = row.quantity == "gn" ? gn_constant_from_d0(d.d0.value, prob)
                                          : sobolev_constant_from_d0(d.d0.value, prob.p, prob.q);
          rec.estimate = ConstantEstimate::checked(v, BoundDirection::LowerBound, "from-d0:" + d.d0.provenance,
                                                   d.d0.converged);
        }
      }
      rec.flagged = !rec.estimate.converged;
      stalled += rec.flagged;
      rows.push_back(std::move(rec));
    }
    write_atomic(o.out / "constants.csv", [&](std::ostream& os) { write_constants_csv(os, rows); });
    *o.log << "constants: " << rows.size() << " rows, " << stalled << " flagged as stalled\n";
    return kExitOk;
  });
}

/// ||u(t)||_2 for u0 = exp(-|x|^2 / (2 w^2)) under the euclidean heat flow.
inline double gaussian_heat_l2(double t, double w, int n) {
  const double s = w * w + 2.0 * t;
  return std::sqrt(std::pow(w * w / s, n) * std::pow(std::numbers::pi * s, 0.5 * n));
}

/// One heat simulation with its bound verdict and, for Gaussian data on R^n,
/// the error against the closed form.
inline HeatRecord run_heat(const HeatRunConfig& run, const GroupPtr& g, ConstantProvider& provider) {
  ScalarField u0;
  if (run.initial == "gaussian") {
    const double w = run.width;
    u0 = sample(g, run.grid, [w](std::span<const double> x) {
      double r2 = 0.0;
      for (double v : x) r2 += v * v;
      return std::exp(-0.5 * r2 / (w * w));
    });
  } else if (run.initial == "graded-bump") {
    u0 = sample(g, run.grid, GradedBump{g, run.alpha, run.beta, {}});
  } else {
    u0 = ScalarField(g, run.grid);
  }
  HeatOptions ho;
  ho.cfl = run.cfl;
  if (run.A2) {
    ho.A2 = *run.A2;
  } else if (g->is_abelian()) {
    ho.A2 = exact_euclidean_A(static_cast<int>(g->dim())).value;
  } else {
    ho.A2 = provider.inflated_A(g).value;
  }
  HeatRecord rec{run.name, heat_evolve(u0, run.T, run.steps, ho), std::nullopt, true};
  const auto& tr = rec.trajectory;
  rec.bound_holds = tr.bound_holds(ho.bound_tolerance);
  if (run.initial == "gaussian" && g->is_abelian()) {
    double worst = 0.0;
    for (std::size_t k = 0; k < tr.t.size(); ++k) {
      double ex = gaussian_heat_l2(tr.t[k], run.width, static_cast<int>(g->dim()));
      worst = std::max(worst, std::abs(tr.l2[k] - ex) / ex);
    }
    rec.exact_error = worst;
  }
  return rec;
}

/// Runs each heat simulation; writes trajectories, log-log plot data and
/// heat_summary.csv. Exit 0 iff every bound holds (leaks only warn).
inline int cmd_heat(const CliOptions& o) {
  return detail::guarded(o, "heat", [&] {
    HeatConfig cfg = parse_heat(load_json_file(o.config), o.config);
    std::vector<GroupPtr> groups;
    for (const auto& run : cfg.runs) groups.push_back(make_group(run.group));
    ConstantProvider provider(cfg.estimation);
    std::vector<HeatRecord> records(cfg.runs.size());
    detail::parallel_indexed(cfg.runs.size(), o.jobs,
                             [&](std::size_t i) { records[i] = run_heat(cfg.runs[i], groups[i], provider); });
    bool all_hold = true;
    for (const auto& rec : records) {
      const auto& tr = rec.trajectory;
      all_hold = all_hold && rec.bound_holds;
      const auto stem = (o.out / "heat" / detail::file_stem(rec.name)).string();
      write_atomic(stem + ".csv", [&](std::ostream& os) { tr.write_csv(os); });
      if (!tr.bound.empty()) {
        write_atomic(stem + ".l2.dat", [&](std::ostream& os) { tr.write_loglog(os, false); });
        write_atomic(stem + ".bound.dat", [&](std::ostream& os) { tr.write_loglog(os, true); });
      }
      if (tr.leak) *o.log << "heat: warning: run '" << rec.name << "' leaks mass (" << tr.max_mass_drift << ")\n";
    }
    write_atomic(o.out / "heat_summary.csv", [&](std::ostream& os) { write_heat_summary(os, records); });
    *o.log << "heat: " << records.size() << " runs, bounds " << (all_hold ? "hold" : "VIOLATED") << "\n";
    return all_hold ? kExitOk : kExitViolated;
  });
}

}  // namespace strata

#endif  // STRATA_CLI_HPP
