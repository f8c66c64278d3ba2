#include <gtest/gtest.h>

#include <cmath>

#include "bdp/error.hpp"
#include "bdp/weight_sequence.hpp"

using namespace bdp;

TEST(WeightSequence, ProductsAndPartialSums) {
  const auto w = WeightSequence::unbounded(TransformKind::triangular, {2.0, 0.5, 3.0}, 1.5);
  std::vector<double> d{1.0};
  for (std::size_t k = 1; k < 40; ++k)
    d.push_back(d.back() * w.delta(k));
  double q = 0.0;
  for (std::size_t k = 0; k < 40; ++k) {
    EXPECT_NEAR(w.d(k), d[k], 1e-12 * d[k]);
    EXPECT_NEAR(w.q(k), q, 1e-12 * std::max(1.0, q));
    q += d[k];
  }
  EXPECT_DOUBLE_EQ(w.delta(0), 0.0);
  EXPECT_DOUBLE_EQ(w.delta(10), 1.5);
}

TEST(WeightSequence, ExtremesOfFiniteList) {
  const auto w = WeightSequence::finite(TransformKind::triangular, {0.5, 4.0, 0.25});
  // d = 1, 0.5, 2, 0.5
  EXPECT_DOUBLE_EQ(w.min_weight(), 0.5);
  EXPECT_DOUBLE_EQ(w.max_weight(), 2.0);
  EXPECT_EQ(w.length(), 4u);
  EXPECT_THROW(w.d(4), Error);
  EXPECT_DOUBLE_EQ(w.delta(5), 0.0);
}

TEST(WeightSequence, UnboundedExtremes) {
  const auto grow = WeightSequence::unbounded(TransformKind::triangular, {}, 2.0);
  EXPECT_DOUBLE_EQ(grow.min_weight(), 1.0);
  EXPECT_TRUE(std::isinf(grow.max_weight()));
  const auto shrink = WeightSequence::unbounded(TransformKind::diagonal, {}, 0.5);
  EXPECT_DOUBLE_EQ(shrink.min_weight(), 0.0);
  EXPECT_DOUBLE_EQ(shrink.max_weight(), 1.0);
  EXPECT_DOUBLE_EQ(shrink.delta(0), 1.0);
}

TEST(WeightSequence, WConstantAgainstBruteForce) {
  for (const auto &w : {WeightSequence::unbounded(TransformKind::triangular, {0.3, 0.5}, 1.2),
                        WeightSequence::unbounded(TransformKind::triangular, {}, 2.0),
                        WeightSequence::unbounded(TransformKind::triangular, {1.0, 1.0}, 1.0)}) {
    double brute = INFINITY;
    for (std::size_t i = 1; i < 5000; ++i)
      brute = std::min(brute, w.q(i) / static_cast<double>(i));
    EXPECT_NEAR(w.w_constant(), brute, 1e-12);
  }
  EXPECT_DOUBLE_EQ(WeightSequence::unbounded(TransformKind::triangular, {}, 0.5).w_constant(), 0.0);
}

TEST(WeightSequence, MatrixShapes) {
  const auto tri = WeightSequence::finite(TransformKind::triangular, {2.0, 3.0});
  const Eigen::MatrixXd m = tri.matrix(3);
  // Row k holds d_k in columns j >= k.
  EXPECT_DOUBLE_EQ(m(0, 2), 1.0);
  EXPECT_DOUBLE_EQ(m(1, 1), 2.0);
  EXPECT_DOUBLE_EQ(m(2, 2), 6.0);
  EXPECT_DOUBLE_EQ(m(2, 0), 0.0);
  const auto diag = WeightSequence::finite(TransformKind::diagonal, {2.0, 3.0});
  EXPECT_TRUE(diag.matrix(3).isApprox(Eigen::Vector3d(1.0, 2.0, 6.0).asDiagonal().toDenseMatrix()));
}

TEST(WeightSequence, RejectsNonPositiveRatios) {
  EXPECT_THROW(WeightSequence::finite(TransformKind::triangular, {1.0, 0.0}), Error);
  EXPECT_THROW(WeightSequence::unbounded(TransformKind::triangular, {1.0}, -1.0), Error);
}
