#include <gtest/gtest.h>

#include "tensor_spectra/eigen_driver.hpp"
#include "tensor_spectra/oracle.hpp"
#include "test_support.hpp"

using namespace tensor_spectra;
using namespace tensor_spectra::testing;
using Eigen::VectorXd;

TEST(Companion, Examples) {
  EXPECT_EQ(real_roots({-1, 0, 1}), (std::vector<double>{-1.0, 1.0}));
  EXPECT_TRUE(real_roots({1, 0, 1}).empty());
  EXPECT_EQ(companion_roots({1, 0, 1}).roots.size(), 2u);
  EXPECT_TRUE(companion_roots({0, 0, 0}).identically_zero);
  EXPECT_FALSE(companion_roots({-1, 0, 1}).identically_zero);
  // (t - 1)(t - 2)(t + 3) = t^3 - 7t + 6, with a negligible leading coefficient trimmed.
  const auto r = real_roots({6, -7, 0, 1, 1e-16});
  ASSERT_EQ(r.size(), 3u);
  EXPECT_NEAR(r[0], -3.0, 1e-14);
  EXPECT_NEAR(r[1], 1.0, 1e-14);
  EXPECT_NEAR(r[2], 2.0, 1e-14);
}

TEST(Companion, DoubleRootKept) {
  // (t - 0.5)^2 (t + 2): the double root splits slightly off the real axis.
  const auto r = real_roots({0.5, -1.75, 1.0, 1.0});
  ASSERT_FALSE(r.empty());
  EXPECT_NEAR(r.front(), -2.0, 1e-12);
  EXPECT_NEAR(r.back(), 0.5, 1e-6);
}

TEST(Companion, EliminationRootsGiveEigenvectorDirections) {
  // For the four-entry fixture, x2 (A x^3)_1 - x1 (A x^3)_2 = 0.3 x1^3 x2 + 2.6 x1 x2^3,
  // so b(1, t) = 0.3 t + 2.6 t^3 with a vanishing t^4 coefficient: the directions
  // are t = 0, i.e. (1, 0), and the root at infinity (0, 1).
  const std::vector<double> coeffs{0.0, 0.3, 0.0, 2.6, 0.0};
  const auto r = real_roots(coeffs);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_NEAR(r[0], 0.0, 1e-14);
  EXPECT_EQ(companion_roots(coeffs).roots.size(), 3u);
  const auto pairs = brute_z_n2(load("ex51.tsr")).pairs;
  ASSERT_EQ(pairs.size(), 4u);
  for (const auto& p : pairs) EXPECT_NEAR(std::abs(p.u[0]) + std::abs(p.u[1]), 1.0, 1e-14);
}

TEST(Oracle, FixtureSpectra) {
  EXPECT_TRUE(brute_z_n2(load("ex13.tsr")).pairs.empty());
  EXPECT_TRUE(brute_z_n2(load("ex13.tsr")).complete);
  EXPECT_TRUE(brute_h_n2(load("ex13.tsr")).pairs.empty());

  const auto z51 = brute_z_n2(load("ex51.tsr")).eigenvalues();
  ASSERT_EQ(z51.size(), 2u);
  EXPECT_NEAR(z51[0], 23.0, 1e-12);
  EXPECT_NEAR(z51[1], 25.1, 1e-12);
  const auto h51 = brute_h_n2(load("ex51.tsr")).eigenvalues();
  ASSERT_EQ(h51.size(), 3u);
  EXPECT_NEAR(h51[0], 23.0, 1e-12);
  EXPECT_NEAR(h51[1], 25.1, 1e-12);
  EXPECT_NEAR(h51[2], 49.2687, 5e-5);

  const OracleResult z14 = brute_z_n2(load("ex14.tsr"));
  EXPECT_FALSE(z14.complete);
  EXPECT_TRUE(z14.pairs.empty());
  const auto h14 = brute_h_n2(load("ex14.tsr"));
  EXPECT_TRUE(h14.complete);
  EXPECT_EQ(h14.eigenvalues(), (std::vector<double>{0.0, 1.0}));
}

TEST(Oracle, NeedsTwoDimensions) {
  EXPECT_THROW(brute_z_n2(identity_tensor(3, 3)), std::invalid_argument);
  EXPECT_THROW(brute_h_n2(identity_tensor(3, 1)), std::invalid_argument);
}

TEST(Oracle, PairsPassResidualGate) {
  std::mt19937_64 rng(24);
  for (int trial = 0; trial < 100; ++trial) {
    const int m = 2 + trial % 4;
    const Tensor a = trial % 2 ? random_tensor(m, 2, rng) : random_symmetric_tensor(m, 2, rng);
    for (EigenKind kind : {EigenKind::Z, EigenKind::H}) {
      const OracleResult o = kind == EigenKind::Z ? brute_z_n2(a) : brute_h_n2(a);
      for (const auto& p : o.pairs) {
        EXPECT_LE(p.residual, 1e-9);
        EXPECT_LE(eigen_residual(kind, a, p.lambda, p.u), 1e-9);
      }
    }
  }
}

TEST(Oracle, OddOrderZSpectrumIsSymmetric) {
  std::mt19937_64 rng(25);
  for (int trial = 0; trial < 50; ++trial) {
    const Tensor a = random_tensor(trial % 2 ? 3 : 5, 2, rng);
    const auto v = brute_z_n2(a).eigenvalues();
    std::vector<double> negated;
    for (double x : v) negated.push_back(-x);
    EXPECT_LT(hausdorff(v, negated), 1e-9);
  }
}

TEST(Oracle, AxisDirectionBranch) {
  // diag(1, 2) as a matrix: eigenvectors are the axes, including x = (0, 1).
  const Tensor a(2, 2, {1, 0, 0, 2});
  const auto z = brute_z_n2(a);
  EXPECT_EQ(z.eigenvalues(), (std::vector<double>{1.0, 2.0}));
  EXPECT_EQ(z.pairs.size(), 4u);
  EXPECT_EQ(brute_h_n2(a).eigenvalues(), (std::vector<double>{1.0, 2.0}));
}
