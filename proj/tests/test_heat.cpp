#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "strata/constants.hpp"
#include "strata/derivatives.hpp"
#include "strata/family.hpp"
#include "strata/heat.hpp"
#include "strata/random.hpp"

using namespace strata;

namespace {

bool interior(const GridSpec& g, std::size_t flat) {
  for (std::size_t k = 0; k < g.dim(); ++k) {
    std::size_t i = g.index_along(flat, k);
    if (i < 2 || i + 3 > g.count(k)) return false;
  }
  return true;
}

}  // namespace

TEST(SubLaplacian, EuclideanQuadratic) {
  auto u = sample(euclidean(2), GridSpec::uniform(2, 2.0, 17), [](auto x) { return x[0] * x[0] + x[1] * x[1]; });
  auto l = sub_laplacian(u);
  for (std::size_t i = 0; i < u.size(); ++i)
    if (interior(u.grid(), i)) {
      EXPECT_NEAR(l[i].real(), 4.0, 1e-11);
    }
}

TEST(SubLaplacian, HeisenbergMonomials) {
  auto h = heisenberg();
  GridSpec grid({2, 2, 2}, {17, 17, 17});
  auto r2 = sub_laplacian(sample(h, grid, [](auto x) { return x[0] * x[0] + x[1] * x[1]; }));
  auto t = sub_laplacian(sample(h, grid, [](auto x) { return x[2]; }));
  for (std::size_t i = 0; i < r2.size(); ++i) {
    if (!interior(grid, i)) continue;
    EXPECT_NEAR(r2[i].real(), 4.0, 1e-10);
    EXPECT_NEAR(t[i].real(), 0.0, 1e-10);
  }
}

TEST(SubLaplacian, Linear) {
  Rng rng(53);
  auto h = heisenberg();
  GridSpec grid = GridSpec::uniform(3, 3.0, 16);
  auto a = sample(h, grid, [&](auto) { return rng.normal(); });
  auto b = sample(h, grid, [&](auto) { return rng.normal(); });
  ScalarField c = a.same_shape();
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = 2.0 * a[i] - 3.0 * b[i];
  auto la = sub_laplacian(a), lb = sub_laplacian(b), lc = sub_laplacian(c);
  for (std::size_t i = 0; i < c.size(); ++i) EXPECT_NEAR(std::abs(lc[i] - (2.0 * la[i] - 3.0 * lb[i])), 0.0, 1e-10);
}

TEST(DecayBound, Properties) {
  EXPECT_DOUBLE_EQ(decay_bound(0.0, 2.0, 0.7, 4.0, 0.2), 0.7);
  double prev = decay_bound(0.0, 2.0, 0.7, 4.0, 0.2);
  for (double t = 0.1; t < 10.0; t += 0.1) {
    double b = decay_bound(t, 2.0, 0.7, 4.0, 0.2);
    EXPECT_LT(b, prev);
    EXPECT_LT(b, decay_bound(t, 2.0, 0.7, 4.0, 0.3));
    prev = b;
  }
  const double t1 = 1e6, t2 = 2e6;
  double slope = std::log(decay_bound(t2, 2.0, 0.7, 4.0, 0.2) / decay_bound(t1, 2.0, 0.7, 4.0, 0.2)) / std::log(2.0);
  EXPECT_NEAR(slope, -1.0, 1e-5);
  EXPECT_THROW(decay_bound(-1.0, 2.0, 0.7, 4.0, 0.2), InputError);
}

TEST(HeatEvolve, ZeroStaysZero) {
  ScalarField z(euclidean(1), GridSpec::uniform(1, 5.0, 64));
  auto tr = heat_evolve(z, 1.0, 10);
  for (double v : tr.l2) EXPECT_EQ(v, 0.0);
  EXPECT_FALSE(tr.leak);
}

TEST(HeatEvolve, GaussianOnPlane) {
  auto u0 = sample(euclidean(2), GridSpec::uniform(2, 10.0, 129), [](auto x) { return std::exp(-0.5 * (x[0] * x[0] + x[1] * x[1])); });
  HeatOptions opt;
  opt.A2 = exact_euclidean_A(2).value;
  auto tr = heat_evolve(u0, 1.0, 20, opt);
  EXPECT_GE(tr.steps, 20u);
  EXPECT_LT(tr.max_mass_drift, 1e-6);
  EXPECT_GE(tr.min_value, -1e-12);
  EXPECT_TRUE(tr.bound_holds());
  EXPECT_TRUE(tr.l2_monotone);
  for (std::size_t k = 1; k < tr.t.size(); ++k) EXPECT_GT(tr.t[k], tr.t[k - 1]);
  // closed form ||u(t)||_2 = sqrt(pi / (1 + 2t)) for this datum
  EXPECT_NEAR(tr.l2.back() / std::sqrt(std::numbers::pi / 3.0), 1.0, 5e-3);
}

TEST(HeatEvolve, RejectsNegativeData) {
  auto u = sample(euclidean(1), GridSpec::uniform(1, 5.0, 64), [](auto x) { return x[0]; });
  EXPECT_THROW(heat_evolve(u, 1.0, 10), InputError);
}

TEST(HeatEvolve, LeakIsFlagged) {
  auto u0 = sample(euclidean(1), GridSpec::uniform(1, 3.0, 64), [](auto x) { return std::exp(-0.5 * x[0] * x[0]); });
  auto tr = heat_evolve(u0, 4.0, 10);
  EXPECT_TRUE(tr.leak);
}

TEST(HeatTrajectory, Exports) {
  auto u0 = sample(euclidean(1), GridSpec::uniform(1, 8.0, 64), [](auto x) { return std::exp(-0.5 * x[0] * x[0]); });
  HeatOptions opt;
  opt.A2 = exact_euclidean_A(1).value;
  auto tr = heat_evolve(u0, 0.5, 5, opt);
  std::ostringstream csv, ll;
  tr.write_csv(csv);
  tr.write_loglog(ll, true);
  EXPECT_EQ(csv.str().rfind("t,l1,l2,bound,min\n", 0), 0u);
  std::size_t lines = 0;
  for (char c : ll.str()) lines += c == '\n';
  EXPECT_EQ(lines, tr.t.size() - 1);
}
