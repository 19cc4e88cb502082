#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "strata/family.hpp"
#include "strata/random.hpp"
#include "strata/transforms.hpp"

using namespace strata;
using std::numbers::pi;

namespace {

ScalarField line_gaussian(double w, std::size_t n = 512, double L = 12.0) {
  return normalized_l2(sample(euclidean(1), GridSpec::uniform(1, L, n),
                              [w](auto x) { return std::exp(-0.5 * x[0] * x[0] / (w * w)); }));
}

double lebesgue_slack(const ScalarField& f, double A) {
  const double Q = f.group().homogeneous_dim();
  const double E = horizontal_dirichlet(f, MeasureSpec::lebesgue(), DerivativeScheme::Spectral);
  double ent = integrate_nodes(f, MeasureSpec::lebesgue(), [&](std::size_t i, auto) {
    double a = std::abs(f[i]);
    return a == 0.0 ? 0.0 : a * a * std::log(a);
  });
  return 0.25 * Q * std::log(A * E) - ent;
}

}  // namespace

TEST(Tilt, RoundtripAndPositivity) {
  Rng rng(41);
  auto h = heisenberg();
  auto g = sample(h, GridSpec::uniform(3, 3.0, 20), [&](auto) { return rng.uniform(0.0, 2.0); });
  auto back = untilt(tilt(g, 0.3), 0.3);
  double err = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) err = std::max(err, std::abs(back[i] - g[i]) / std::abs(g[i]));
  EXPECT_LT(err, 4e-16);
  EXPECT_GE(tilt(g, 0.3).min_real(), 0.0);
  EXPECT_THROW(tilt(g, 0.0), InputError);
}

TEST(Tilt, NormTransfer) {
  Rng rng(43);
  GridSpec grid = GridSpec::uniform(2, 7.0, 64);
  for (int s = 0; s < 20; ++s) {
    auto m = GaussianMixture::random(rng, 2, 3, 0.5, 1.5, 2.0);
    auto pair = TiltPair::from_g(sample(euclidean(2), grid, m), rng.uniform(0.05, 1.0));
    EXPECT_LT(std::abs(pair.norm_gap()), 1e-8 * lp_norm(pair.f, 2.0));
  }
}

TEST(Tilt, ConstantBecomesUnitGaussian) {
  for (int n = 1; n <= 3; ++n) {
    auto one = sample(euclidean(n), GridSpec::uniform(n, 12.0, 96), [](auto) { return 1.0; });
    auto f = tilt(one, std::pow(2.0 * pi, -0.5 * n));
    EXPECT_NEAR(lp_norm(f, 2.0), 1.0, 1e-10) << n;
  }
}

TEST(Dirichlet, GaussianOnLine) {
  auto f = line_gaussian(std::sqrt(2.0));
  auto d = dirichlet_identity(f);
  EXPECT_LT(std::abs(d.residual), 1e-6);
  // f = e^{-x^2/4}: g is constant, so both sides vanish
  EXPECT_LT(std::abs(d.lhs), 1e-6);
}

TEST(Dirichlet, PhaseInvariant) {
  auto f = line_gaussian(0.9);
  auto d0 = dirichlet_identity(f);
  auto d1 = dirichlet_identity(f.scaled(std::polar(1.0, 0.7)));
  EXPECT_NEAR(d1.residual, d0.residual, 1e-12);
  EXPECT_NEAR(d1.lhs, d0.lhs, 1e-12);
}

TEST(Dirichlet, NeedsNormalizedInput) {
  auto f = line_gaussian(1.0).scaled(2.0);
  EXPECT_THROW(dirichlet_identity(f), InputError);
  EXPECT_THROW(parts_identities(f), InputError);
}

TEST(Dirichlet, HeisenbergProductBump) {
  auto h = heisenberg();
  auto f = normalized_l2(sample(h, GridSpec({6, 6, 6}, {64, 64, 64}), GradedBump{h, 0.25, 0.5, {}}));
  EXPECT_LT(std::abs(dirichlet_identity(f).residual), 1e-3);
}

TEST(Parts, GaussianOnLine) {
  auto r = parts_identities(line_gaussian(1.0));
  ASSERT_EQ(r.first.size(), 1u);
  EXPECT_TRUE(r.mixed.empty());
  EXPECT_LT(std::abs(r.first[0]), 1e-8);
  EXPECT_EQ(r.max_imag, 0.0);
}

TEST(Parts, HeisenbergMixedTermVanishes) {
  auto h = heisenberg();
  auto f = normalized_l2(sample(h, GridSpec({6, 6, 6}, {48, 48, 48}), GradedBump{h, 0.5, 1.0, {}}));
  auto r = parts_identities(f);
  ASSERT_EQ(r.mixed.size(), 2u);
  EXPECT_LT(r.max_abs(), 1e-6);
}

TEST(Dilation, ClosedForm) {
  auto d = optimize_dilation(1.0, 4.0, 0.3);
  EXPECT_DOUBLE_EQ(d.epsilon, 1.0);
  EXPECT_THROW(optimize_dilation(0.0, 4.0, 0.3), InputError);
  auto f = line_gaussian(1.0);
  const double A = exact_euclidean_A(1).value;
  auto o = optimize_dilation(f, A);
  EXPECT_LT(std::abs(o.residual), 1e-10);
  const double E = horizontal_dirichlet(f, MeasureSpec::lebesgue(), DerivativeScheme::Spectral);
  EXPECT_NEAR(o.bound, 0.25 * std::log(A * E), 1e-10);
}

TEST(Dilation, SlackInvariantUnderNormalizedDilation) {
  GridSpec grid = GridSpec::uniform(1, 16.0, 1024);
  auto shape = [](std::span<const double> x) { return std::exp(-0.5 * x[0] * x[0]) * (1.0 + 0.4 * x[0] * x[0]); };
  const double A = exact_euclidean_A(1).value;
  auto f = normalized_l2(sample(euclidean(1), grid, shape));
  double s0 = lebesgue_slack(f, A);
  for (double eps : {0.5, 2.0}) {
    auto fe = normalized_l2(sample_dilated(euclidean(1), grid, eps, shape));
    EXPECT_NEAR(lebesgue_slack(fe, A), s0, 1e-9) << eps;
  }
}

TEST(Equivalence, RoundtripCloses) {
  GridSpec grid = GridSpec::uniform(1, 14.0, 1024);
  Rng rng(47);
  for (int s = 0; s < 5; ++s) {
    auto m = GaussianMixture::random(rng, 1, 2, 0.7, 1.5, 1.0);
    auto f = normalized_l2(sample(euclidean(1), grid, m));
    auto r = equivalence_roundtrip(f, exact_euclidean_A(1));
    EXPECT_LT(std::abs(r.residual), 1e-6);
    EXPECT_GE(r.predicted_gap, 0.0);
  }
}

TEST(MomentSplit, HoldsForWeightedNormalized) {
  auto g = euclidean(3);
  auto norm = QuasiNorm::euclidean_lp(INFINITY);
  const double s = -0.25;
  auto u = sample(g, GridSpec::uniform(3, 6.0, 48), [](auto x) { return std::exp(-0.5 * (x[0] * x[0] + x[1] * x[1] + x[2] * x[2])); });
  WeightSpec w{norm, s};
  auto f = u.scaled(1.0 / lp_norm(u, 2.0, MeasureSpec::lebesgue(), &w));
  EXPECT_GE(moment_split_slack(f, norm, s, euclidean_lp_max_ratio(3, INFINITY)), 0.0);
}
