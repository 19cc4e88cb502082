#ifndef STRATA_OPTIMIZE_HPP
#define STRATA_OPTIMIZE_HPP

// Comparison-only minimizers. None of them looks at objective values other
// than through "<", so composing the objective with a strictly increasing map
// leaves the visited points unchanged.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <vector>

namespace strata {

struct MinimizeResult {
  std::vector<double> x;
  double value = 0.0;
  std::size_t evaluations = 0;
  bool converged = false;
};

using Objective = std::function<double(std::span<const double>)>;

inline MinimizeResult golden_section(const std::function<double(double)>& f, double lo, double hi,
                                     double tol, std::size_t max_iter = 200) {
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = f(c), fd = f(d);
  std::size_t evals = 2, it = 0;
  while (b - a > tol && it++ < max_iter) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = f(d);
    }
    ++evals;
  }
  MinimizeResult out;
  out.x = {fc < fd ? c : d};
  out.value = std::min(fc, fd);
  out.evaluations = evals;
  out.converged = b - a <= tol;
  return out;
}

struct Box {
  std::vector<double> lower, upper;
};

/// Cyclic golden-section sweeps inside a box. Converged when a full sweep
/// moves no coordinate by more than tol times its range.
inline MinimizeResult coordinate_descent(const Objective& f, std::vector<double> x, const Box& box,
                                         double tol = 1e-6, std::size_t max_sweeps = 12) {
  MinimizeResult out;
  double fx = f(x);
  out.evaluations = 1;
  for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
    double moved = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
      double width = box.upper[k] - box.lower[k];
      if (width <= 0.0) continue;
      std::vector<double> trial = x;
      auto line = [&](double v) {
        trial[k] = v;
        return f(trial);
      };
      auto r = golden_section(line, box.lower[k], box.upper[k], tol * width);
      out.evaluations += r.evaluations;
      if (r.value < fx) {
        moved = std::max(moved, std::abs(r.x[0] - x[k]) / width);
        x[k] = r.x[0];
        fx = r.value;
      }
    }
    if (moved <= tol) {
      out.converged = true;
      break;
    }
  }
  out.x = std::move(x);
  out.value = fx;
  return out;
}

/// Standard Nelder-Mead (reflection 1, expansion 2, contraction 1/2, shrink 1/2).
inline MinimizeResult nelder_mead(const Objective& f, const std::vector<double>& x0, double step,
                                  double xtol = 1e-12, std::size_t max_evals = 20000) {
  const std::size_t n = x0.size();
  std::vector<std::vector<double>> s(n + 1, x0);
  for (std::size_t k = 0; k < n; ++k) s[k + 1][k] += step;
  std::vector<double> fs(n + 1);
  std::size_t evals = 0;
  for (std::size_t k = 0; k <= n; ++k) fs[k] = f(s[k]), ++evals;
  std::vector<std::size_t> order(n + 1);
  bool converged = false;
  auto combine = [&](const std::vector<double>& c, const std::vector<double>& w, double t) {
    std::vector<double> p(n);
    for (std::size_t k = 0; k < n; ++k) p[k] = c[k] + t * (w[k] - c[k]);
    return p;
  };
  while (evals < max_evals) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return fs[a] < fs[b]; });
    double size = 0.0;
    for (std::size_t v = 1; v <= n; ++v)
      for (std::size_t k = 0; k < n; ++k)
        size = std::max(size, std::abs(s[order[v]][k] - s[order[0]][k]));
    if (size <= xtol) {
      converged = true;
      break;
    }
    std::size_t worst = order[n], second = order[n - 1], best = order[0];
    std::vector<double> c(n, 0.0);
    for (std::size_t v = 0; v < n; ++v)
      for (std::size_t k = 0; k < n; ++k) c[k] += s[order[v]][k] / static_cast<double>(n);
    auto xr = combine(c, s[worst], -1.0);
    double fr = f(xr);
    ++evals;
    if (fr < fs[best]) {
      auto xe = combine(c, s[worst], -2.0);
      double fe = f(xe);
      ++evals;
      if (fe < fr) s[worst] = xe, fs[worst] = fe;
      else s[worst] = xr, fs[worst] = fr;
    } else if (fr < fs[second]) {
      s[worst] = xr, fs[worst] = fr;
    } else {
      bool outside = fr < fs[worst];
      auto xc = combine(c, outside ? xr : s[worst], 0.5);
      double fc = f(xc);
      ++evals;
      if (fc < (outside ? fr : fs[worst])) {
        s[worst] = xc, fs[worst] = fc;
      } else {
        for (std::size_t v = 0; v <= n; ++v) {
          if (v == best) continue;
          s[v] = combine(s[best], s[v], 0.5);
          fs[v] = f(s[v]);
          ++evals;
        }
      }
    }
  }
  std::size_t best = static_cast<std::size_t>(std::min_element(fs.begin(), fs.end()) - fs.begin());
  return {s[best], fs[best], evals, converged};
}

}  // namespace strata

#endif  // STRATA_OPTIMIZE_HPP
