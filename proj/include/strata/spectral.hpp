#ifndef STRATA_SPECTRAL_HPP
#define STRATA_SPECTRAL_HPP

#include <fftw3.h>

#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>
#include <vector>

#include "strata/errors.hpp"
#include "strata/field.hpp"
#include "strata/quadrature.hpp"

namespace strata {

namespace detail {

inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

/// In-place multidimensional DFT; sign -1 forward, +1 backward (unnormalized).
inline void fft_inplace(std::vector<cplx>& data, const std::vector<std::size_t>& dims, int sign) {
  std::vector<int> n(dims.begin(), dims.end());
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_plan plan;
  {
    std::lock_guard lock(fftw_planner_mutex());
    plan = fftw_plan_dft(static_cast<int>(n.size()), n.data(), p, p, sign, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  std::lock_guard lock(fftw_planner_mutex());
  fftw_destroy_plan(plan);
}

inline double frequency(std::size_t k, std::size_t m, double h) {
  double kk = k < (m + 1) / 2 ? static_cast<double>(k) : static_cast<double>(k) - static_cast<double>(m);
  return 2.0 * std::numbers::pi * kk / (static_cast<double>(m) * h);
}

struct Spectrum {
  std::vector<std::size_t> dims;
  std::vector<double> spacing;
  std::vector<cplx> coeffs;
};

inline Spectrum padded_spectrum(const ScalarField& u, std::size_t padding) {
  const auto& grid = u.grid();
  Spectrum s;
  for (std::size_t k = 0; k < grid.dim(); ++k) {
    s.dims.push_back(grid.count(k) * padding);
    s.spacing.push_back(grid.spacing(k));
  }
  std::size_t total = 1;
  for (auto d : s.dims) total *= d;
  if (padding == 1) {
    s.coeffs = u.values();
  } else {
    s.coeffs.assign(total, cplx(0.0));
    grid.for_each_node([&](std::size_t i, auto, std::span<const std::size_t> idx) {
      std::size_t flat = 0;
      for (std::size_t k = 0; k < idx.size(); ++k) flat = flat * s.dims[k] + idx[k];
      s.coeffs[flat] = u[i];
    });
  }
  fft_inplace(s.coeffs, s.dims, FFTW_FORWARD);
  return s;
}

template <class F>
void for_each_frequency(const std::vector<std::size_t>& dims, const std::vector<double>& h, F&& f) {
  const std::size_t n = dims.size();
  std::size_t total = 1;
  for (auto d : dims) total *= d;
  std::vector<double> xi(n);
  std::vector<std::size_t> idx(n, 0);
  for (std::size_t flat = 0; flat < total; ++flat) {
    for (std::size_t k = 0; k < n; ++k) xi[k] = frequency(idx[k], dims[k], h[k]);
    f(flat, std::span<const double>(xi));
    for (std::size_t k = n; k-- > 0;) {
      if (++idx[k] < dims[k]) break;
      idx[k] = 0;
    }
  }
}

/// Weight for the zero frequency making the lattice sum of |xi|^s g(xi)
/// reproduce the integral to leading order in the lattice spacing. The
/// constant depends only on the lattice shape, so it is calibrated once on a
/// large unit lattice against Gaussians, with Richardson in the width.
inline double zero_mode_weight(const std::vector<double>& dxi, double s) {
  static std::mutex m;
  static std::map<std::tuple<std::vector<double>, double>, double> cache;
  const std::size_t n = dxi.size();
  std::vector<double> ratio(n);
  for (std::size_t k = 0; k < n; ++k) ratio[k] = dxi[k] / dxi[0];
  {
    std::lock_guard lock(m);
    auto it = cache.find({ratio, s});
    if (it != cache.end()) {
      double cell = 1.0;
      for (double d : dxi) cell *= d;
      return it->second * cell * std::pow(dxi[0], s);
    }
  }
  auto defect = [&](double tau) {
    // integral of |xi|^s exp(-|xi|^2/(2 tau^2)) over R^n
    double exact = std::pow(2.0 * tau * tau, 0.5 * (n + s)) * std::pow(std::numbers::pi, 0.5 * n) *
                   boost::math::tgamma(0.5 * (n + s)) / boost::math::tgamma(0.5 * n);
    std::vector<std::size_t> dims(n);
    std::vector<long> half(n);
    double cell = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
      half[k] = static_cast<long>(std::ceil(8.6 * tau / ratio[k]));
      dims[k] = static_cast<std::size_t>(2 * half[k] + 1);
      cell *= ratio[k];
    }
    std::size_t total = 1;
    for (auto d : dims) total *= d;
    std::vector<double> terms(total);
    std::vector<long> idx(n);
    for (std::size_t flat = 0; flat < total; ++flat) {
      std::size_t r = flat;
      double r2 = 0.0;
      for (std::size_t k = n; k-- > 0;) {
        long j = static_cast<long>(r % dims[k]) - half[k];
        r /= dims[k];
        double xi = static_cast<double>(j) * ratio[k];
        r2 += xi * xi;
      }
      terms[flat] = r2 == 0.0 ? 0.0 : cell * std::pow(r2, 0.5 * s) * std::exp(-0.5 * r2 / (tau * tau));
    }
    return (exact - ordered_sum(terms)) / cell;
  };
  double tau1 = 6.0, tau2 = 12.0;
  double c = (4.0 * defect(tau2) - defect(tau1)) / 3.0;
  {
    std::lock_guard lock(m);
    cache[{ratio, s}] = c;
  }
  double cell = 1.0;
  for (double d : dxi) cell *= d;
  return c * cell * std::pow(dxi[0], s);
}

inline void require_euclidean(const ScalarField& u, const char* what) {
  if (!u.group().is_abelian())
    throw UnsupportedOperation(std::string(what) +
                               " is only available on euclidean groups; use the horizontal gradient (a = 1) on " +
                               u.group().name());
}

inline bool even_integer(double v) { return std::abs(v - 2.0 * std::round(0.5 * v)) < 1e-14; }

}  // namespace detail

struct SpectralOptions {
  /// Zero-padding factor for non-polynomial symbols; polynomial ones use 1.
  std::size_t padding = 2;
};

/// ||(-Delta)^(a/2) u||_2 via the DFT.
inline double fractional_sobolev_norm(const ScalarField& u, double a, SpectralOptions opt = {}) {
  detail::require_euclidean(u, "fractional Sobolev norm");
  require(a >= 0.0, "fractional order must be nonnegative");
  const double s = 2.0 * a;
  const bool smooth = detail::even_integer(s);
  const int half_power = static_cast<int>(std::lround(0.5 * s));
  const std::size_t pad = smooth ? 1 : std::max<std::size_t>(1, opt.padding);
  auto spec = detail::padded_spectrum(u, pad);
  std::vector<double> terms(spec.coeffs.size());
  detail::for_each_frequency(spec.dims, spec.spacing, [&](std::size_t i, std::span<const double> xi) {
    double r2 = 0.0;
    for (double v : xi) r2 += v * v;
    double sym;
    if (s == 0.0) sym = 1.0;
    else if (r2 == 0.0) sym = 0.0;
    else if (smooth) {
      sym = 1.0;
      for (int k = 0; k < half_power; ++k) sym *= r2;
    } else sym = std::pow(r2, 0.5 * s);
    terms[i] = sym * std::norm(spec.coeffs[i]);
  });
  double scale = 1.0;
  std::vector<double> dxi;
  for (std::size_t k = 0; k < spec.dims.size(); ++k) {
    scale *= spec.spacing[k] / static_cast<double>(spec.dims[k]);
    dxi.push_back(2.0 * std::numbers::pi / (static_cast<double>(spec.dims[k]) * spec.spacing[k]));
  }
  double total = ordered_sum(terms);
  if (!smooth) {
    // |u^(0)|^2 (2pi)^-n times the zero-mode weight, in the same units as terms
    double cell = 1.0;
    for (double d : dxi) cell *= d;
    total += std::norm(spec.coeffs[0]) * detail::zero_mode_weight(dxi, s) / cell;
  }
  return std::sqrt(std::max(0.0, scale * total));
}

/// (-Delta)^(a/2) u with the pointwise symbol |xi|^a.
inline ScalarField fractional_apply(const ScalarField& u, double a, SpectralOptions opt = {}) {
  detail::require_euclidean(u, "fractional power");
  if (a == 0.0) return u;
  const bool smooth = detail::even_integer(a);
  const std::size_t pad = smooth ? 1 : std::max<std::size_t>(1, opt.padding);
  auto spec = detail::padded_spectrum(u, pad);
  std::size_t total = spec.coeffs.size();
  detail::for_each_frequency(spec.dims, spec.spacing, [&](std::size_t i, std::span<const double> xi) {
    double r2 = 0.0;
    for (double v : xi) r2 += v * v;
    spec.coeffs[i] *= r2 == 0.0 ? 0.0 : std::pow(r2, 0.5 * a) / static_cast<double>(total);
  });
  detail::fft_inplace(spec.coeffs, spec.dims, FFTW_BACKWARD);
  ScalarField out = u.same_shape();
  const auto& grid = u.grid();
  for (std::size_t i = 0; i < u.size(); ++i) {
    std::size_t flat = 0;
    for (std::size_t k = 0; k < grid.dim(); ++k) flat = flat * spec.dims[k] + grid.index_along(i, k);
    out[i] = spec.coeffs[flat];
  }
  return out;
}

/// Spectral derivative along one coordinate of a decaying field; any grid
/// dimension, the transform is taken along all axes. Real input gives real
/// output (the imaginary part is pure roundoff).
inline ScalarField spectral_partial(const ScalarField& u, std::size_t axis) {
  auto spec = detail::padded_spectrum(u, 1);
  const std::size_t total = spec.coeffs.size();
  const std::size_t m = spec.dims[axis];
  const std::size_t stride = [&] {
    std::size_t st = 1;
    for (std::size_t k = axis + 1; k < spec.dims.size(); ++k) st *= spec.dims[k];
    return st;
  }();
  for (std::size_t i = 0; i < total; ++i) {
    std::size_t k = (i / stride) % m;
    double xi = (m % 2 == 0 && k == m / 2) ? 0.0 : detail::frequency(k, m, spec.spacing[axis]);
    spec.coeffs[i] *= cplx(0.0, xi / static_cast<double>(total));
  }
  detail::fft_inplace(spec.coeffs, spec.dims, FFTW_BACKWARD);
  ScalarField out = u.same_shape();
  const bool real = u.is_real();
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = real ? cplx(spec.coeffs[i].real()) : spec.coeffs[i];
  return out;
}

}  // namespace strata

#endif  // STRATA_SPECTRAL_HPP
