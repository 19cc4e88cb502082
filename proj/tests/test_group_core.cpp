#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "strata/group.hpp"
#include "strata/quasi_norm.hpp"
#include "strata/random.hpp"

using namespace strata;

namespace {

Point random_point(Rng& rng, std::size_t n) {
  Point x{std::vector<double>(n)};
  for (auto& c : x.coords) c = rng.uniform(-3.0, 3.0);
  return x;
}

double max_diff(const Point& a, const Point& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

}  // namespace

TEST(Group, EuclideanProductIsAddition) {
  auto g = euclidean(2);
  EXPECT_EQ(g->product({1, 2}, {3, 4}), (Point{4, 6}));
  EXPECT_EQ(g->homogeneous_dim(), 2.0);
  EXPECT_TRUE(g->is_abelian());
}

TEST(Group, HeisenbergProduct) {
  auto h = heisenberg();
  EXPECT_EQ(h->product({1, 0, 0}, {0, 1, 0}), (Point{1, 1, 0.5}));
  EXPECT_EQ(h->product({0, 1, 0}, {1, 0, 0}), (Point{1, 1, -0.5}));
  EXPECT_EQ(h->homogeneous_dim(), 4.0);
  EXPECT_EQ(h->dim(), 3u);
  EXPECT_EQ(h->first_stratum_dim(), 2u);
  EXPECT_FALSE(h->is_abelian());
}

TEST(Group, InverseGivesIdentity) {
  Rng rng(3);
  for (auto g : {euclidean(3), heisenberg()}) {
    for (int s = 0; s < 100; ++s) {
      Point x = random_point(rng, g->dim());
      EXPECT_LT(max_diff(g->product(x, g->inverse(x)), g->identity()), 1e-15);
      EXPECT_EQ(g->product(x, g->identity()), x);
    }
  }
}

TEST(Group, DimensionMismatchThrows) {
  auto h = heisenberg();
  EXPECT_THROW(h->product({1, 2}, {1, 2, 3}), InputError);
}

TEST(Group, AssociativityAndDilationAutomorphism) {
  Rng rng(11);
  for (auto g : {euclidean(4), heisenberg()}) {
    double assoc = 0.0, autom = 0.0;
    for (int s = 0; s < 10000; ++s) {
      Point x = random_point(rng, g->dim()), y = random_point(rng, g->dim()), z = random_point(rng, g->dim());
      assoc = std::max(assoc, max_diff(g->product(g->product(x, y), z), g->product(x, g->product(y, z))));
      double lam = rng.log_uniform(0.2, 5.0);
      autom = std::max(autom, max_diff(g->dilate(lam, g->product(x, y)),
                                       g->product(g->dilate(lam, x), g->dilate(lam, y))));
    }
    EXPECT_LT(assoc, 1e-12) << g->name();
    EXPECT_LT(autom, 1e-12) << g->name();
  }
}

TEST(Group, Dilations) {
  auto h = heisenberg();
  EXPECT_EQ(h->dilate(2.0, {1, 1, 1}), (Point{2, 2, 4}));
  EXPECT_EQ(h->dilate(1.0, {0.3, -1, 2}), (Point{0.3, -1, 2}));
  Point x{0.7, -0.2, 1.3};
  EXPECT_LT(max_diff(h->dilate(2.0, h->dilate(3.0, x)), h->dilate(6.0, x)), 1e-14);
  EXPECT_THROW(h->dilate(0.0, x), InputError);
  EXPECT_THROW(h->dilate(-1.0, x), InputError);
}

TEST(Group, DilatedBoxVolume) {
  auto h = heisenberg();
  std::vector<double> lo{-1, -2, -0.5}, hi{1, 0.5, 3};
  double v = h->dilated_box_volume(1.0, lo, hi);
  EXPECT_NEAR(h->dilated_box_volume(1.7, lo, hi), std::pow(1.7, 4.0) * v, 1e-12 * v);
}

TEST(Group, RegistryByName) {
  EXPECT_EQ(make_group("euclidean:3")->dim(), 3u);
  EXPECT_EQ(make_group("heisenberg:1")->homogeneous_dim(), 4.0);
  EXPECT_THROW(make_group("heisenberg:2"), InputError);
  EXPECT_THROW(make_group("engel:1"), InputError);
  EXPECT_THROW(make_group("euclidean"), InputError);
  EXPECT_THROW(make_group("euclidean:x"), InputError);
  EXPECT_THROW(make_group("euclidean:9"), InputError);
}

TEST(Group, ThirdPartyRegistration) {
  register_group("line", [](int) { return euclidean(1); });
  EXPECT_EQ(make_group("line:1")->dim(), 1u);
}

TEST(QuasiNorm, KoranyiValues) {
  auto h = heisenberg();
  auto k = QuasiNorm::koranyi();
  EXPECT_DOUBLE_EQ(k(*h, Point{1, 0, 0}), 1.0);
  EXPECT_DOUBLE_EQ(k(*h, Point{0, 0, 1}), 2.0);
  Point x{1, 1, 1};
  EXPECT_NEAR(k(*h, h->dilate(3.0, x)), 3.0 * k(*h, x), 1e-12 * k(*h, x));
}

TEST(QuasiNorm, AxiomsOnRandomPoints) {
  auto h = heisenberg();
  auto e = euclidean(3);
  EXPECT_TRUE(verify_quasi_norm_axioms(*h, QuasiNorm::koranyi(), 10000, 1).ok());
  for (double p : {1.0, 2.0, 3.5, std::numeric_limits<double>::infinity()})
    EXPECT_TRUE(verify_quasi_norm_axioms(*e, QuasiNorm::euclidean_lp(p), 10000, 2).ok()) << p;
}

TEST(QuasiNorm, FirstStratumMaxRatio) {
  const double inf = std::numeric_limits<double>::infinity();
  EXPECT_NEAR(first_stratum_max_ratio(*euclidean(4), QuasiNorm::euclidean_lp(inf)).value, 2.0, 1e-8);
  EXPECT_NEAR(first_stratum_max_ratio(*euclidean(3), QuasiNorm::euclidean_lp(2.0)).value, 1.0, 1e-8);
  EXPECT_NEAR(first_stratum_max_ratio(*heisenberg(), QuasiNorm::koranyi()).value, 1.0, 1e-8);
  EXPECT_NEAR(first_stratum_max_ratio(*euclidean(1), QuasiNorm::euclidean_lp(2.0)).value, 1.0, 1e-15);
}
