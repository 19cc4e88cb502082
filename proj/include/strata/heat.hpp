#ifndef STRATA_HEAT_HPP
#define STRATA_HEAT_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <ostream>
#include <vector>

#include "strata/derivatives.hpp"
#include "strata/errors.hpp"
#include "strata/field.hpp"
#include "strata/quadrature.hpp"

namespace strata {

/// (||u0||_2^(-4/Q) + 4 t / (Q A2) ||u0||_1^(-4/Q))^(-Q/4)
inline double decay_bound(double t, double l1_0, double l2_0, double Q, double A2) {
  require(t >= 0.0, "decay bound needs t >= 0");
  require(l1_0 > 0.0 && l2_0 > 0.0 && Q > 0.0 && A2 > 0.0, "decay bound needs positive norms, Q and A2");
  const double e = 4.0 / Q;
  return std::pow(std::pow(l2_0, -e) + e / A2 * std::pow(l1_0, -e) * t, -1.0 / e);
}

struct HeatOptions {
  std::optional<double> A2;       // decay-bound constant; no bound without it
  double leak_tolerance = 1e-6;   // relative L^1 loss that flags truncation
  double bound_tolerance = 1e-12; // relative slack allowed against the bound
  double cfl = 0.9;
};

struct HeatTrajectory {
  std::vector<double> t, l1, l2, min, bound;
  double l1_0 = 0.0, l2_0 = 0.0;
  double Q = 0.0;
  std::optional<double> A2;
  std::size_t steps = 0, requested_steps = 0;
  double dt = 0.0, dt_limit = 0.0;
  double max_mass_drift = 0.0;     // max over steps of |l1 - l1_0| / l1_0
  double max_boundary_ratio = 0.0; // max over steps of boundary / overall modulus
  double min_value = 0.0;
  bool leak = false;
  bool l2_monotone = true;

  /// Every recorded ||u||_2 is below the bound (true when there is no bound).
  bool bound_holds(double rel_tol = 1e-12) const {
    for (std::size_t k = 0; k < t.size(); ++k)
      if (!bound.empty() && l2[k] > bound[k] * (1.0 + rel_tol)) return false;
    return true;
  }

  double worst_bound_ratio() const {
    double m = 0.0;
    for (std::size_t k = 0; k < bound.size(); ++k) m = std::max(m, l2[k] / bound[k]);
    return m;
  }

  void write_csv(std::ostream& os) const {
    os << "t,l1,l2,bound,min\n";
    char buf[160];
    for (std::size_t k = 0; k < t.size(); ++k) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", t[k], l1[k], l2[k],
                    bound.empty() ? std::nan("") : bound[k], min[k]);
      os << buf;
    }
  }

  /// Two columns per line (log t, log value) for t > 0; gnuplot-ready.
  void write_loglog(std::ostream& os, bool use_bound) const {
    char buf[80];
    for (std::size_t k = 0; k < t.size(); ++k) {
      if (t[k] <= 0.0) continue;
      double v = use_bound ? bound[k] : l2[k];
      std::snprintf(buf, sizeof buf, "%.17g %.17g\n", std::log(t[k]), std::log(v));
      os << buf;
    }
  }
};

/// Forward Euler for d_t u = sum X_i^2 u with zero exterior. The step is the
/// smaller of T/steps and cfl * min(1/max diagonal, 2/Gershgorin radius); when
/// the request is too coarse the step count is raised.
inline HeatTrajectory heat_evolve(const ScalarField& u0, double T, std::size_t steps, const HeatOptions& opt = {}) {
  require(T > 0.0 && steps >= 1, "heat evolution needs T > 0 and at least one step");
  require(u0.is_real(), "heat evolution needs a real initial datum");
  require(u0.min_real() >= 0.0, "heat evolution needs a nonnegative initial datum");
  const StencilOperator op(u0);
  HeatTrajectory tr;
  tr.Q = u0.group().homogeneous_dim();
  tr.A2 = opt.A2;
  tr.requested_steps = steps;
  const double rho = op.gershgorin_radius(), diag = op.max_diagonal();
  tr.dt_limit = opt.cfl * std::min(diag > 0.0 ? 1.0 / diag : INFINITY, rho > 0.0 ? 2.0 / rho : INFINITY);
  tr.steps = steps;
  if (T / static_cast<double>(steps) > tr.dt_limit) tr.steps = static_cast<std::size_t>(std::ceil(T / tr.dt_limit));
  tr.dt = T / static_cast<double>(tr.steps);

  auto mass = measure_weights(u0, MeasureSpec::lebesgue());
  std::vector<double> u(u0.size()), lu, terms(u0.size());
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = u0[i].real();
  const auto& grid = u0.grid();
  std::vector<std::size_t> boundary;
  for (std::size_t i = 0; i < u.size(); ++i)
    if (grid.on_boundary(i)) boundary.push_back(i);

  auto record = [&](double t) {
    for (std::size_t i = 0; i < u.size(); ++i) terms[i] = mass[i] * std::abs(u[i]);
    double l1 = ordered_sum(terms);
    for (std::size_t i = 0; i < u.size(); ++i) terms[i] = mass[i] * u[i] * u[i];
    double l2 = std::sqrt(ordered_sum(terms));
    double mn = *std::min_element(u.begin(), u.end());
    double mx = 0.0, mb = 0.0;
    for (double v : u) mx = std::max(mx, std::abs(v));
    for (auto i : boundary) mb = std::max(mb, std::abs(u[i]));
    if (tr.t.empty()) tr.l1_0 = l1, tr.l2_0 = l2;
    if (!tr.l2.empty() && l2 > tr.l2.back()) tr.l2_monotone = false;
    tr.t.push_back(t);
    tr.l1.push_back(l1);
    tr.l2.push_back(l2);
    tr.min.push_back(mn);
    if (tr.l1_0 > 0.0) tr.max_mass_drift = std::max(tr.max_mass_drift, std::abs(l1 - tr.l1_0) / tr.l1_0);
    if (mx > 0.0) tr.max_boundary_ratio = std::max(tr.max_boundary_ratio, mb / mx);
  };

  record(0.0);
  for (std::size_t s = 1; s <= tr.steps; ++s) {
    op.apply(u, lu);
    for (std::size_t i = 0; i < u.size(); ++i) u[i] += tr.dt * lu[i];
    record(tr.dt * static_cast<double>(s));
  }
  tr.min_value = *std::min_element(tr.min.begin(), tr.min.end());
  tr.leak = tr.max_mass_drift > opt.leak_tolerance;
  if (opt.A2 && tr.l1_0 > 0.0) {
    for (double t : tr.t) tr.bound.push_back(decay_bound(t, tr.l1_0, tr.l2_0, tr.Q, *opt.A2));
  }
  return tr;
}

}  // namespace strata

#endif  // STRATA_HEAT_HPP
