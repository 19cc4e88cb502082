// Acceptance run: one PASS/FAIL line per criterion. Exit 0 iff the failing
// criteria are exactly those passed with --expect-fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "strata/cli.hpp"
#include "strata/strata.hpp"

using namespace strata;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool ok = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string title;
  double limit_s;
  std::function<Outcome()> run;
};

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::string config_dir = STRATA_CONFIG_DIR;
unsigned jobs = 1;

// ---- 1 ---------------------------------------------------------------------

Outcome gamma_closed_form() {
  double worst = 0.0;
  for (int n = 1; n <= 10; ++n) {
    double g = gamma_from_A(n, n, exact_euclidean_A(n).value);
    worst = std::max(worst, std::abs(g / std::pow(2.0 * std::numbers::pi, -0.5 * n) - 1.0));
  }
  return {worst <= 1e-12, fmt("max rel error %.2e", worst)};
}

// ---- 2 ---------------------------------------------------------------------

Outcome discrete_inequalities() {
  CheckOptions opt;
  opt.rel_tol = 1e-10;
  Rng rng(20240602);
  std::size_t failures = 0;
  double worst_plateau = 0.0;
  for (int k = 0; k < 1000; ++k) {
    std::size_t n = 1 + rng.index(16);
    std::vector<cplx> vals;
    std::vector<double> mass;
    for (std::size_t i = 0; i < n; ++i) {
      vals.emplace_back(rng.uniform(0.01, 1.0));
      mass.push_back(rng.uniform(0.05, 1.0));
    }
    double e1 = rng.uniform(1.0 + 1e-3, 8.0), e2 = rng.uniform(1.0 + 1e-3, 8.0);
    double p = std::min(e1, e2), q = std::max(e1, e2);
    if (q - p < 1e-6) q = std::min(8.0, p + 0.5);
    double a = rng.uniform();
    double r = 1.0 / (a / p + (1.0 - a) / q);
    WeightedView v{vals, mass, {}};
    failures += !check_interp(v, p, r, q, a, opt).holds();
    failures += !check_log_holder(v, p, q, opt).holds();
    failures += !check_jensen_step(v, opt).holds();

    // |u| constant on a probability measure: all three are equalities
    std::vector<cplx> flat(n, cplx(rng.uniform(0.1, 1.0)));
    std::vector<double> prob(n, 1.0 / static_cast<double>(n));
    WeightedView pv{flat, prob, {}};
    for (const auto& rep : {check_interp(pv, p, r, q, a, opt), check_log_holder(pv, p, q, opt), check_jensen_step(pv, opt)})
      worst_plateau = std::max(worst_plateau, std::abs(rep.slack));
  }
  return {failures == 0 && worst_plateau <= 1e-9,
          fmt("%zu failing of 3000, max plateau |slack| %.2e", failures, worst_plateau)};
}

// ---- 3 ---------------------------------------------------------------------

Outcome gross_euclidean() {
  CheckOptions opt;
  opt.rel_tol = 1e-6;
  const std::vector<std::pair<double, std::size_t>> grids = {{10.0, 256}, {8.0, 128}, {6.0, 48}};
  std::size_t failures = 0, total = 0;
  double worst = INFINITY, one_slack = 0.0;
  for (int n = 1; n <= 3; ++n) {
    auto g = euclidean(n);
    auto gamma = ConstantEstimate::checked(gamma_from_A(n, n, exact_euclidean_A(n).value), BoundDirection::Exact,
                                           "closed-form");
    GridSpec grid = GridSpec::uniform(n, grids[n - 1].first, grids[n - 1].second);
    Rng rng(1000 + n);
    for (int k = 0; k < 200; ++k) {
      auto m = GaussianMixture::random(rng, n, 1 + rng.index(3), 0.6, 1.6, 1.5);
      auto rep = check_gross(sample(g, grid, m), gamma, 0.0, nullptr, opt);
      failures += !rep.holds();
      worst = std::min(worst, rep.slack / std::max(1.0, std::abs(rep.rhs)));
      ++total;
    }
    auto one = sample(g, GridSpec::uniform(n, 8.0, n == 3 ? 48 : 128), [](auto) { return 1.0; });
    one_slack = std::max(one_slack, std::abs(check_gross(one, gamma).slack));
  }
  return {failures == 0 && one_slack == 0.0,
          fmt("%zu/%zu hold, min rel slack %.3e, |slack| for g=1 is %.1e", total - failures, total, worst,
              one_slack)};
}

// ---- 4 ---------------------------------------------------------------------

Outcome heisenberg_identities() {
  auto h = heisenberg();
  GridSpec grid({6, 6, 6}, {64, 64, 64});
  auto fam = graded_gaussian_family(h, grid);
  ConstantProvider provider;
  const double A = provider.raw_A(h).A.value;
  const std::vector<std::vector<double>> members = {
      {0.5, 0.0, 0.0}, {1.0, 0.3, 0.0}, {0.25, 0.0, 0.5}, {0.5, 0.5, 0.2}, {0.75, 0.2, 0.1}};
  double dir = 0.0, parts = 0.0, dil = 0.0;
  for (const auto& p : members) {
    auto f = normalized_l2(fam.member(p));
    dir = std::max(dir, std::abs(dirichlet_identity(f).residual));
    parts = std::max(parts, parts_identities(f).max_abs());
    dil = std::max(dil, std::abs(optimize_dilation(f, A).residual));
  }
  return {dir < 1e-3 && parts < 1e-6 && dil <= 1e-10,
          fmt("%zu members: Dirichlet %.2e, parts %.2e, dilation %.2e", members.size(), dir, parts, dil)};
}

// ---- 5 ---------------------------------------------------------------------

Outcome dilation_invariance() {
  auto g = euclidean(2);
  const auto A = exact_euclidean_A(2);
  const double L = 8.0;
  const std::size_t N = 128;
  Rng rng(505);
  double worst = 0.0;
  for (int k = 0; k < 5; ++k) {
    auto m = GaussianMixture::random(rng, 2, 2, 0.7, 1.4, 1.0);
    const double s0 = check_log_sobolev(sample(g, GridSpec::uniform(2, L, N), m), 1.0, 2.0, A).slack;
    for (double eps : {0.25, 0.5, 2.0, 4.0}) {
      // u_eps = eps^(Q/2) u o delta_eps, on the grid dilated along with it
      auto ue = sample_dilated(g, GridSpec::uniform(2, L / eps, N), eps, m).scaled(eps);
      worst = std::max(worst, std::abs(check_log_sobolev(ue, 1.0, 2.0, A).slack - s0));
    }
  }
  return {worst <= 1e-8, fmt("max slack change %.2e", worst)};
}

// ---- 6 ---------------------------------------------------------------------

Outcome quotient_vs_energy_map() {
  auto g = euclidean(2);
  GridSpec grid = GridSpec::uniform(2, 8.0, 64);
  NehariProblem prob{g, 1.0, 0.0, 2.0, 3.0, true, DerivativeScheme::Spectral};
  prob.validate();
  Rng rng(606);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    auto m = GaussianMixture::random(rng, 2, 1 + rng.index(3), 0.6, 1.5, 1.5);
    auto n = nehari_norms(sample(g, grid, m), prob);
    double direct = sobolev_quotient(n, prob);
    double mapped = sobolev_constant_from_d0(nehari_energy(n, prob), prob.p, prob.q);
    worst = std::max(worst, std::abs(direct - mapped) / direct);
  }
  return {worst <= 1e-10, fmt("max rel difference %.2e", worst)};
}

// ---- 7 ---------------------------------------------------------------------

Outcome estimated_A_euclidean() {
  const std::vector<std::pair<double, std::size_t>> grids = {{10.0, 257}, {8.0, 128}, {6.0, 64}};
  bool ok = true;
  std::ostringstream d;
  for (int n = 1; n <= 3; ++n) {
    auto g = euclidean(n);
    FamilyNorms fam(centered_gaussian_mixture_family(g, GridSpec::uniform(n, grids[n - 1].first, grids[n - 1].second)));
    NehariProblem base{g, 1.0, 0.0, 2.0, 3.0, true, DerivativeScheme::Spectral};
    auto est = constant_A(base, fam, log_q_grid(base, 33));
    const double ref = exact_euclidean_A(n).value, rel = est.A.value / ref - 1.0;
    ok = ok && est.A.value <= ref && std::abs(rel) <= 0.05;
    d << (n > 1 ? ", " : "") << "R^" << n << " A/ref-1 = " << fmt("%+.2e", rel);
  }
  return {ok, d.str()};
}

// ---- 8 ---------------------------------------------------------------------

Outcome heat_runs() {
  HeatConfig cfg = parse_heat(load_json_file(config_dir + "/heat.json"), "heat.json");
  ConstantProvider provider(cfg.estimation);
  std::vector<HeatRecord> recs(cfg.runs.size());
  detail::parallel_indexed(cfg.runs.size(), jobs, [&](std::size_t i) {
    recs[i] = run_heat(cfg.runs[i], make_group(cfg.runs[i].group), provider);
  });
  bool ok = true;
  double drift = 0.0, minv = 0.0, exact = 0.0;
  bool have_exact = false;
  for (const auto& r : recs) {
    ok = ok && r.bound_holds;
    drift = std::max(drift, r.trajectory.max_mass_drift);
    minv = std::min(minv, r.trajectory.min_value);
    if (r.exact_error) {
      have_exact = true;
      exact = std::max(exact, *r.exact_error);
    }
  }
  ok = ok && have_exact && exact < 5e-3 && drift < 1e-6 && minv >= -1e-12;
  return {ok, fmt("%zu runs, bounds %s, exact error %.2e, mass drift %.2e, min %.1e", recs.size(),
                  ok ? "hold" : "checked", exact, drift, minv)};
}

// ---- 9 ---------------------------------------------------------------------

bool same(const VerificationReport& a, const VerificationReport& b) {
  return a.lhs == b.lhs && a.rhs == b.rhs && a.slack == b.slack;
}

Outcome weighted_reductions() {
  Rng rng(909);
  auto l2 = QuasiNorm::euclidean_lp(2.0);
  std::size_t mismatches = 0, compared = 0;
  for (int n = 1; n <= 3; ++n) {
    auto g = euclidean(n);
    GridSpec grid = GridSpec::uniform(n, 7.0, n == 3 ? 32 : 96);
    auto A = exact_euclidean_A(n);
    auto gamma = ConstantEstimate::checked(gamma_from_A(n, n, A.value), BoundDirection::Exact, "closed-form");
    for (int k = 0; k < 5; ++k) {
      auto u = sample(g, grid, GaussianMixture::random(rng, n, 2, 0.7, 1.4, 1.0));
      mismatches += !same(check_log_sobolev(u, 1.0, 2.0, A), check_log_sobolev_weighted(u, 1.0, 2.0, 0.0, l2, A));
      mismatches += !same(check_nash(u, 1.0, A), check_nash(u, 1.0, A, 0.0, &l2));
      mismatches += !same(check_gross(u, gamma), check_gross(u, gamma, 0.0, &l2));
      compared += 3;
    }
  }

  SuiteConfig suite = parse_suite(load_json_file(config_dir + "/default_suite.json"), "default_suite.json");
  std::erase_if(suite.cases, [](const CaseConfig& c) { return c.tag != "gross-euclidean-lp"; });
  SuiteOptions so;
  so.jobs = jobs;
  auto res = run_suite(suite, so);
  const std::size_t holds = res.count(Verdict::Holds);
  bool ok = mismatches == 0 && suite.cases.size() == 3 && !res.reports.empty() && holds == res.reports.size();
  return {ok, fmt("beta = 0: %zu/%zu identical; l^p Gross on R^3: %zu cases, %zu/%zu hold", compared - mismatches,
                  compared, suite.cases.size(), holds, res.reports.size())};
}

// ---- 10 --------------------------------------------------------------------

Outcome default_suite() {
  std::ostringstream log;
  CliOptions o;
  o.config = config_dir + "/default_suite.json";
  o.out = fs::temp_directory_path() / "strata_acceptance_suite";
  o.jobs = jobs;
  o.log = &log;
  fs::remove_all(o.out);
  int rc = cmd_verify(o);
  std::string last = log.str();
  while (!last.empty() && last.back() == '\n') last.pop_back();
  if (auto pos = last.rfind('\n'); pos != std::string::npos) last = last.substr(pos + 1);
  fs::remove_all(o.out);
  return {rc == kExitOk, fmt("exit %d; ", rc) + last};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  std::vector<int> expect_fail, only;
  app.add_option("--expect-fail", expect_fail, "criteria expected to fail");
  app.add_option("--only", only, "run only these criteria");
  app.add_option("--configs", config_dir, "directory holding heat.json and default_suite.json")->capture_default_str();
  app.add_option("--jobs", jobs, "worker threads")->check(CLI::Range(1u, 1024u));
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria = {
      {1, "gamma from the sharp euclidean A", 1, gamma_closed_form},
      {2, "discrete interpolation, log-Holder, Jensen", 10, discrete_inequalities},
      {3, "Gross on R^1..R^3 with exact gamma", 120, gross_euclidean},
      {4, "Heisenberg identities on the standard set", 300, heisenberg_identities},
      {5, "log-Sobolev slack invariant under dilation", 30, dilation_invariance},
      {6, "Sobolev quotient against the energy map", 60, quotient_vs_energy_map},
      {7, "estimated A on R^1..R^3 below the sharp value", 300, estimated_A_euclidean},
      {8, "heat flow decay bounds", 300, heat_runs},
      {9, "weighted forms at beta = 0; l^p Gross on R^3", 300, weighted_reductions},
      {10, "default verification suite", 600, default_suite},
  };

  std::set<int> failed;
  for (const auto& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("error: ") + e.what()};
    }
    double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool in_time = s < c.limit_s;
    bool pass = out.ok && in_time;
    if (!pass) failed.insert(c.id);
    std::cout << "criterion " << c.id << ": " << (pass ? "PASS" : "FAIL") << "  " << c.title << "  (" << out.detail
              << "; " << fmt("%.2f s of %.0f s", s, c.limit_s) << (in_time ? "" : ", over time") << ")"
              << std::endl;
  }

  std::set<int> expected;
  for (int id : expect_fail)
    if (only.empty() || std::find(only.begin(), only.end(), id) != only.end()) expected.insert(id);
  if (failed == expected) {
    std::cout << "acceptance: " << (failed.empty() ? "all criteria pass" : "failures match the expected set") << "\n";
    return 0;
  }
  std::cout << "acceptance: failing set differs from the expected set\n";
  return 1;
}
