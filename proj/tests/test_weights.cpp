#include <gtest/gtest.h>

#include <cmath>

#include "bdp/error.hpp"
#include "bdp/lognorm.hpp"
#include "bdp/weights.hpp"

using namespace bdp;

namespace {

BirthDeathSpec queue(const std::string &name, int S, RateFunction a, RateFunction b,
                     std::size_t trunc = 200) {
  PresetParameters p;
  p.servers = S;
  p.truncation = trunc;
  return make_preset(name, p, std::move(a), std::move(b));
}

// The certified rate must lie below every coefficient at every sampled time.
void expect_rate_below_profile(const BirthDeathSpec &spec, const WeightSequence &w,
                               const RateCombination &rate, SequenceKind kind) {
  for (double t : {0.0, 0.1, 0.37, 0.5, 0.81}) {
    const auto prof = coefficient_profile(spec, w, t, kind);
    EXPECT_GE(prof.inf, rate(spec.a(), spec.b(), t) - 1e-10) << "t = " << t;
  }
}

} // namespace

TEST(Weights, IntervalContains) {
  const Interval i{1.0, 2.0};
  EXPECT_TRUE(i.contains(1.5));
  EXPECT_TRUE(i.contains(2.0));
  EXPECT_FALSE(i.contains(2.1));
}

TEST(Weights, ErgodicSearchCertifiesItsDrift) {
  const auto spec = queue("mms", 2, RateFunction::sinusoid(1.0, 0.6, 1.0), RateFunction::constant(1.5));
  const auto ew = find_ergodic_weights(spec);
  EXPECT_GT(ew.feasibility.drift_mean, 0.0);
  EXPECT_LT(ew.feasibility.c, 1.0);
  expect_rate_below_profile(spec, ew.weights, ew.feasibility.drift, SequenceKind::alpha);
  check_membership(ew.feasibility.intervals, ew.feasibility.tail_interval, ew.weights);
}

TEST(Weights, MaxCIsTheFeasibilityEdge) {
  const auto spec = queue("mm1", 1, RateFunction::constant(1.0), RateFunction::constant(3.0));
  const double spread = 1.5;
  const double cmax = max_ergodic_c(spec, spread);
  ASSERT_GT(cmax, 0.0);
  EXPECT_NO_THROW(ergodic_feasibility(spec, spread, cmax * (1 - 1e-9)));
  EXPECT_THROW(ergodic_feasibility(spec, spread, std::min(0.999999, cmax * (1 + 1e-6))), Infeasible);
  EXPECT_LE(cmax, f_sequence(spec, spread).inf() + 1e-12);
}

TEST(Weights, EqualMeansAreInfeasible) {
  const auto spec = queue("mm1", 1, RateFunction::constant(1.0), RateFunction::constant(1.0));
  try {
    find_ergodic_weights(spec);
    FAIL();
  } catch (const Infeasible &e) {
    EXPECT_EQ(e.condition(), "b");
    EXPECT_EQ(e.code(), ErrorCode::infeasible);
  }
}

TEST(Weights, NullSearchCertifiesItsDrift) {
  const auto spec = queue("mm1", 1, RateFunction::constant(4.0), RateFunction::sinusoid(1.0, 0.5, 1.0));
  const auto nw = find_null_weights(spec);
  EXPECT_GT(nw.feasibility.drift_mean, 0.0);
  expect_rate_below_profile(spec, nw.weights, nw.feasibility.drift, SequenceKind::alpha0);
  const auto loss = queue("mmss", 3, RateFunction::constant(1.0), RateFunction::constant(1.0));
  EXPECT_THROW(find_null_weights(loss), Infeasible);
}

TEST(Weights, MM1UnderloadedPreset) {
  const auto spec = queue("mm1", 1, RateFunction::constant(1.0), RateFunction::constant(4.0));
  const auto pw = preset_weights(spec);
  EXPECT_EQ(pw.regime, "underloaded");
  EXPECT_DOUBLE_EQ(*pw.spread, 2.0);
  EXPECT_DOUBLE_EQ(*pw.c, 0.5);
  EXPECT_DOUBLE_EQ(pw.weights.delta(5), 2.0);
  EXPECT_NEAR(pw.rate.mean(spec.a(), spec.b()), 1.0, 1e-15);
  expect_rate_below_profile(spec, pw.weights, pw.rate, SequenceKind::alpha);
}

TEST(Weights, OverloadedPresetUsesAdmissibleC) {
  const auto spec = queue("mm1", 1, RateFunction::constant(9.0), RateFunction::constant(1.0));
  const auto pw = preset_weights(spec);
  EXPECT_EQ(pw.direction, Direction::null);
  EXPECT_NEAR(*pw.c, 1.0 - 1.0 / 3.0, 1e-15);
  ASSERT_FALSE(pw.notes.empty());  // the literal sqrt(rho) - 1 = 2 is not admissible
  expect_rate_below_profile(spec, pw.weights, pw.rate, SequenceKind::alpha0);
}

TEST(Weights, MMSRegimes) {
  const auto heavy = queue("mms", 3, RateFunction::constant(2.4), RateFunction::constant(1.0));
  const auto ph = preset_weights(heavy);
  EXPECT_EQ(ph.regime, "heavy-traffic");
  EXPECT_NEAR(ph.rate.mean(heavy.a(), heavy.b()), std::pow(std::sqrt(2.4) - std::sqrt(3.0), 2), 1e-12);
  expect_rate_below_profile(heavy, ph.weights, ph.rate, SequenceKind::alpha);

  const auto light = queue("mms", 3, RateFunction::constant(0.3), RateFunction::constant(1.0));
  const auto pl = preset_weights(light);
  EXPECT_EQ(pl.regime, "light-traffic");
  EXPECT_NEAR(pl.rate.mean(light.a(), light.b()), 1.0 - std::sqrt(0.3 / 3.0), 1e-12);
  expect_rate_below_profile(light, pl.weights, pl.rate, SequenceKind::alpha);
}

TEST(Weights, DiscouragementRateAndFallback) {
  const auto spec = queue("discouragement", 2, RateFunction::constant(1.0), RateFunction::constant(2.0));
  const auto pw = preset_weights(spec);
  EXPECT_TRUE(pw.notes.empty());
  EXPECT_NEAR(pw.rate.mean(spec.a(), spec.b()), 1.0, 1e-14);
  expect_rate_below_profile(spec, pw.weights, pw.rate, SequenceKind::alpha);

  // eps > 1/(S-1): the closed-form rate is not dominated; fall back.
  const auto s4 = queue("discouragement", 4, RateFunction::constant(1.0), RateFunction::constant(2.0));
  PresetWeightOptions opt;
  opt.epsilon = 0.6;
  const auto fb = preset_weights(s4, opt);
  EXPECT_FALSE(fb.notes.empty());
  const auto lin = linear_coefficients(s4, fb.weights, SequenceKind::alpha);
  EXPECT_TRUE(dominated_coefficientwise(lin, fb.rate));
  expect_rate_below_profile(s4, fb.weights, fb.rate, SequenceKind::alpha);
}

TEST(Weights, LossCases) {
  const auto spec = queue("mmss", 5, RateFunction::constant(3.0), RateFunction::constant(1.0));
  PresetWeightOptions opt;
  opt.loss_case = 2;
  const auto pw = preset_weights(spec, opt);
  EXPECT_EQ(pw.regime, "case2");
  EXPECT_DOUBLE_EQ(pw.weights.delta(3), 0.8);
  EXPECT_NEAR(pw.weights.min_weight(), std::pow(0.8, 4), 1e-15);
  expect_rate_below_profile(spec, pw.weights, pw.rate, SequenceKind::alpha);
}

TEST(Weights, TrafficIntensity) {
  const auto spec = queue("mms", 3, RateFunction::sinusoid(2.0, 1.0, 1.0), RateFunction::constant(4.0));
  EXPECT_NEAR(traffic_intensity(spec), 2.0 / 12.0, 1e-15);
}
