#include <gtest/gtest.h>

#include "bdp/error.hpp"
#include "bdp/verify.hpp"

using namespace bdp;

namespace {

BirthDeathSpec queue(const std::string &name, int S, double a, double b, std::size_t trunc = 200) {
  PresetParameters p;
  p.servers = S;
  p.truncation = trunc;
  return make_preset(name, p, RateFunction::constant(a), RateFunction::constant(b));
}

} // namespace

TEST(Verify, StandardPair) {
  const auto spec = queue("mmss", 4, 1.0, 1.0);
  const auto [p1, p2] = standard_pair(spec);
  EXPECT_DOUBLE_EQ(p1[0], 1.0);
  EXPECT_DOUBLE_EQ(p2[4], 1.0);
  const auto big = queue("mm1", 1, 1.0, 2.0);
  EXPECT_DOUBLE_EQ(standard_pair(big).second[10], 1.0);
}

TEST(Verify, DecayHoldsAndInflatedRateFails) {
  const auto spec = queue("mm1", 1, 1.0, 4.0);
  const auto w = WeightSequence::unbounded(TransformKind::triangular, {}, 2.0);
  const auto certs = weak_ergodic_certificate(spec, w, {-1.0, 0.5, 0.0});
  const auto [p1, p2] = standard_pair(spec);
  const auto grid = time_grid(0.0, 10.0, 100);
  const auto ok = check_decay(certs[0], spec, w, p1, p2, grid);
  EXPECT_TRUE(ok.pass);
  EXPECT_NEAR(ok.tolerance, 100 * 1e-9, 1e-20);
  EXPECT_EQ(ok.samples.size(), grid.size());
  const auto bad = check_decay(certs[0].strengthened(2.0), spec, w, p1, p2, grid);
  EXPECT_FALSE(bad.pass);
  EXPECT_LT(bad.min_slack, -bad.tolerance);
}

TEST(Verify, SlackSignForLowerBounds) {
  const auto spec = queue("mmss", 5, 3.0, 1.0);
  const auto w = WeightSequence::finite(TransformKind::triangular, std::vector<double>(4, 1.0));
  const auto certs = two_sided_certificate(spec, w);
  const auto [p1, p2] = standard_pair(spec);
  const auto reps = check_two_sided(certs, spec, w, p1, p2, time_grid(0.0, 5.0, 50));
  ASSERT_EQ(reps.size(), certs.size());
  for (const auto &r : reps) {
    EXPECT_TRUE(r.pass) << r.certificate_id;
    for (const auto &s : r.samples)
      EXPECT_DOUBLE_EQ(s.slack, r.direction == BoundDirection::upper ? s.rhs - s.lhs : s.lhs - s.rhs);
  }
}

TEST(Verify, OrderedBoundsRejectUnorderedPair) {
  const auto spec = queue("mmss", 5, 3.0, 1.0);
  const auto w = WeightSequence::finite(TransformKind::triangular, std::vector<double>(4, 1.0));
  const auto certs = two_sided_certificate(spec, w);
  const auto [p1, p2] = standard_pair(spec);
  try {
    check_two_sided(certs, spec, w, p2, p1, time_grid(0.0, 1.0, 10));
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::order_violation);
  }
}

TEST(Verify, NullCheckAbortsOnTruncationLoss) {
  const auto spec = queue("mm1", 1, 4.0, 1.0, 30);
  const auto w = WeightSequence::unbounded(TransformKind::diagonal, {}, 0.5);
  const auto certs = null_ergodic_certificate(spec, w, {0.5, -1.0, 0.0}, {0}, {0});
  try {
    check_null(certs, spec, w, point_mass(31, 0), time_grid(0.0, 20.0, 20));
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::truncation_loss);
  }
}

TEST(Verify, TwoSidedNeedsFiniteChain) {
  const auto spec = queue("mm1", 1, 1.0, 4.0);
  const auto w = WeightSequence::unbounded(TransformKind::triangular, {}, 2.0);
  const auto [p1, p2] = standard_pair(spec);
  EXPECT_THROW(check_two_sided({}, spec, w, p1, p2, time_grid(0.0, 1.0, 4)), Error);
}

TEST(Verify, ReportsAreDeterministic) {
  const auto spec = queue("mm1", 1, 1.0, 4.0);
  const auto w = WeightSequence::unbounded(TransformKind::triangular, {}, 2.0);
  const auto c = weak_ergodic_certificate(spec, w, {-1.0, 0.5, 0.0})[1];
  const auto [p1, p2] = standard_pair(spec);
  const auto r1 = check_decay(c, spec, w, p1, p2, time_grid(0.0, 3.0, 30));
  const auto r2 = check_decay(c, spec, w, p1, p2, time_grid(0.0, 3.0, 30));
  for (std::size_t i = 0; i < r1.samples.size(); ++i)
    EXPECT_EQ(r1.samples[i].lhs, r2.samples[i].lhs);
}
