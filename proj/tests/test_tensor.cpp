#include <gtest/gtest.h>

#include "tensor_spectra/tensor.hpp"
#include "test_support.hpp"

using namespace tensor_spectra;
using namespace tensor_spectra::testing;
using Eigen::VectorXd;

TEST(Tensor, IdentityContractions) {
  const Tensor id = identity_tensor(3, 2);
  const VectorXd x = (VectorXd(2) << 1.5, -0.7).finished();
  EXPECT_NEAR(id.contract_full(x), std::pow(1.5, 3) + std::pow(-0.7, 3), 1e-14);
  const VectorXd g = id.contract_partial(x);
  EXPECT_NEAR(g[0], 1.5 * 1.5, 1e-14);
  EXPECT_NEAR(g[1], 0.49, 1e-14);
}

TEST(Tensor, IdentityMatrixCase) {
  const Tensor id = identity_tensor(2, 3);
  std::vector<int> idx(2);
  for (std::size_t f = 0; f < id.size(); ++f) {
    id.unravel(f, idx);
    EXPECT_EQ(id(idx), idx[0] == idx[1] ? 1.0 : 0.0);
  }
}

TEST(Tensor, IdentityPartialIsPower) {
  std::mt19937_64 rng(1);
  for (int m = 2; m <= 5; ++m) {
    const Tensor id = identity_tensor(m, 3);
    const VectorXd x = random_vector(3, rng);
    EXPECT_LT((id.contract_partial(x) - VectorXd(x.array().pow(m - 1))).norm(), 1e-12);
  }
}

TEST(Tensor, FixtureContractions) {
  const Tensor a51 = load("ex51.tsr");
  EXPECT_DOUBLE_EQ(a51.contract_full((VectorXd(2) << 1, 0).finished()), 25.1);
  const Tensor a13 = load("ex13.tsr");
  const VectorXd e1 = (VectorXd(2) << 1, 0).finished();
  EXPECT_DOUBLE_EQ(a13.contract_full(e1), 0.0);
  const VectorXd g = a13.contract_partial(e1);
  EXPECT_DOUBLE_EQ(g[0], 0.0);
  EXPECT_DOUBLE_EQ(g[1], -1.0);
}

TEST(Tensor, PartialDotsToFullAndHomogeneity) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> ut(-3.0, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    const int m = 2 + trial % 4, n = 1 + trial % 4;
    const Tensor a = random_tensor(m, n, rng);
    const VectorXd x = random_vector(n, rng);
    const double full = a.contract_full(x);
    EXPECT_NEAR(x.dot(a.contract_partial(x)), full, 1e-12 * std::max(1.0, std::abs(full)));
    const double t = ut(rng);
    const double scaled = a.contract_full(t * x);
    EXPECT_NEAR(scaled, std::pow(t, m) * full, 1e-10 * std::max(1.0, std::abs(scaled)));
  }
}

TEST(Tensor, DimensionMismatchThrows) {
  const Tensor a = identity_tensor(3, 2);
  EXPECT_THROW(a.contract_full(VectorXd::Ones(3)), std::invalid_argument);
  EXPECT_THROW(a.contract_partial(VectorXd::Ones(1)), std::invalid_argument);
}

TEST(TensorIo, SparseFixtureHasFourNonzeros) {
  const Tensor a = load("ex51.tsr");
  EXPECT_EQ(a.order(), 4);
  EXPECT_EQ(a.dim(), 2);
  int nonzeros = 0;
  for (double v : a.entries()) nonzeros += v != 0.0;
  EXPECT_EQ(nonzeros, 4);
}

TEST(TensorIo, DenseMatchesSparse) {
  const Tensor sparse = load("ex51.tsr");
  const Tensor dense = parse_tensor(serialize_tensor(sparse, TensorFormat::Dense));
  EXPECT_EQ(dense, sparse);
  std::string text = "# comment\n4 2 dense\n";
  for (double v : sparse.entries()) text += std::to_string(v) + "\n";
  EXPECT_EQ(parse_tensor(text), sparse);
}

TEST(TensorIo, IndexOutOfRange) {
  try {
    parse_tensor("4 2\n1 3 1 1 5.0\n");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2);
    EXPECT_NE(std::string(e.what()).find("index out of range"), std::string::npos);
  }
}

TEST(TensorIo, MalformedInputsNameTheLine) {
  const std::vector<std::pair<std::string, int>> cases = {
      {"4\n", 1},
      {"4 2 packed\n", 1},
      {"1 2\n", 1},
      {"2 2\n1 1 1\n1 1 2\n", 3},
      {"2 2\n1 1 abc\n", 2},
      {"2 2\n1 x 1\n", 2},
      {"2 2\n1 1\n", 2},
      {"2 2 dense\n1 2 3\n", 2},
  };
  for (const auto& [text, line] : cases) {
    try {
      parse_tensor(text);
      ADD_FAILURE() << "accepted: " << text;
    } catch (const ParseError& e) {
      EXPECT_EQ(e.line(), line) << text;
    }
  }
}

TEST(TensorIo, RoundTripIsIdempotent) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const Tensor a = random_tensor(2 + trial % 3, 1 + trial % 3, rng);
    for (auto fmt : {TensorFormat::Sparse, TensorFormat::Dense}) {
      const std::string once = serialize_tensor(a, fmt);
      const Tensor back = parse_tensor(once);
      EXPECT_EQ(back, a);
      EXPECT_EQ(serialize_tensor(back, fmt), once);
    }
  }
}

TEST(TensorIo, MissingFileThrows) { EXPECT_ANY_THROW(read_tensor_file(data_path("does-not-exist.tsr"))); }
