#include <gtest/gtest.h>

#include <random>

#include "bdp/error.hpp"
#include "bdp/lognorm.hpp"

using namespace bdp;

namespace {

// Column j: m_jj + sum_{i != j} |m_ij|, computed directly.
Eigen::VectorXd column_measures(const Eigen::MatrixXd &m) {
  Eigen::VectorXd out(m.cols());
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    out[j] = m.col(j).cwiseAbs().sum() - std::abs(m(j, j)) + m(j, j);
  return out;
}

} // namespace

TEST(Lognorm, KnownMatrix) {
  Eigen::Matrix2d m;
  m << -3.0, 1.0, 2.0, -0.5;
  EXPECT_DOUBLE_EQ(lognorm_l1(m), 0.5);
}

TEST(Lognorm, MatchesLimitDefinition) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int n = 1; n <= 6; ++n) {
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        m(i, j) = u(rng);
    const double h = 1e-7;
    const Eigen::MatrixXd step = Eigen::MatrixXd::Identity(n, n) + h * m;
    const double limit = (step.cwiseAbs().colwise().sum().maxCoeff() - 1.0) / h;
    EXPECT_NEAR(lognorm_l1(m), limit, 1e-5);
  }
}

TEST(Lognorm, CoefficientsAreColumnMeasuresOfTransform) {
  const auto spec = BirthDeathSpec::finite({1.0, 2.0, 0.5, 1.5}, {0.7, 1.1, 2.0, 0.3},
                                           RateFunction::sinusoid(1.0, 0.4, 1.0),
                                           RateFunction::constant(2.0));
  const auto tri = WeightSequence::finite(TransformKind::triangular, {1.5, 0.7, 2.0});
  const auto diag = WeightSequence::finite(TransformKind::diagonal, {0.5, 0.5, 3.0, 1.2});
  for (double t : {0.0, 0.3, 0.65}) {
    const Eigen::MatrixXd M = build_transformed(spec, tri, t);
    const Eigen::VectorXd col = column_measures(M);
    const auto alpha = coefficient_profile(spec, tri, t, SequenceKind::alpha);
    const auto zeta = coefficient_profile(spec, tri, t, SequenceKind::zeta);
    ASSERT_EQ(alpha.values.size(), 4u);
    for (int k = 0; k < 4; ++k) {
      EXPECT_NEAR(alpha.values[k], -col[k], 1e-12);
      EXPECT_NEAR(zeta.values[k], M.col(k).cwiseAbs().sum(), 1e-12);
    }
    const Eigen::MatrixXd Md = build_transformed(spec, diag, t);
    const auto alpha0 = coefficient_profile(spec, diag, t, SequenceKind::alpha0);
    const Eigen::VectorXd cold = column_measures(Md);
    ASSERT_EQ(alpha0.values.size(), 5u);
    for (int k = 0; k < 5; ++k)
      EXPECT_NEAR(alpha0.values[k], -cold[k], 1e-12);
    EXPECT_NEAR(lognorm_of_transformed(spec, tri, t), lognorm_l1(M), 1e-12);
    EXPECT_NEAR(lognorm_of_transformed(spec, diag, t), lognorm_l1(Md), 1e-12);
  }
}

TEST(Lognorm, LinearCoefficientsBoundTheProfile) {
  PresetParameters p;
  p.servers = 2;
  const auto spec = make_preset("mms", p, RateFunction::sinusoid(1.0, 0.5, 1.0),
                                RateFunction::constant(3.0));
  const auto w = WeightSequence::unbounded(TransformKind::triangular, {1.2}, 1.4);
  const auto lin = linear_coefficients(spec, w, SequenceKind::alpha);
  ASSERT_TRUE(lin.limit_a && lin.limit_b);
  EXPECT_EQ(lin.size(), spec.top() + 1);
  const auto lo = lin.lower();
  const auto hi = lin.upper();
  for (double t : {0.0, 0.25, 0.6}) {
    const auto prof = coefficient_profile(spec, w, t, SequenceKind::alpha);
    ASSERT_TRUE(prof.limit);
    EXPECT_GE(prof.inf, lo(spec.a(), spec.b(), t) - 1e-12);
    EXPECT_LE(prof.sup, hi(spec.a(), spec.b(), t) + 1e-12);
    // Limit: lambda (1 - r) a + mu (1 - 1/r) b with r = 1.4, mu = S.
    EXPECT_NEAR(*prof.limit, (1 - 1.4) * spec.a()(t) + 2.0 * (1 - 1 / 1.4) * spec.b()(t), 1e-12);
  }
}

TEST(Lognorm, KindAndDimensionErrors) {
  PresetParameters p;
  const auto spec = make_preset("mm1", p, RateFunction::constant(1.0), RateFunction::constant(2.0));
  const auto tri = WeightSequence::unbounded(TransformKind::triangular, {}, 1.2);
  try {
    linear_coefficients(spec, tri, SequenceKind::alpha0);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kind_mismatch);
  }
  try {
    linear_coefficients(spec, WeightSequence::finite(TransformKind::triangular, {1.0}),
                        SequenceKind::alpha);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::dimension_mismatch);
  }
}
