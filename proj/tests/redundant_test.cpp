#include <gtest/gtest.h>

#include "generators.hpp"
#include "oracles.hpp"
#include "uplift/pricing.hpp"
#include "uplift/redundant.hpp"

using namespace uplift;

namespace {

Schedule sched(int u, double v) { return Schedule{Eigen::VectorXi::Constant(1, u), Eigen::VectorXd::Constant(1, v)}; }

struct Example2 {
  MarketInstance m = fixtures::example2();
  DispatchSolution s = solve_dispatch(m);
  PriceSystem p = chp_price(m);
  RedundantFamily family(GammaVariant g) const { return build_family(m, s, p, GammaChoice{g, std::nullopt}); }
};

MarketInstance convex_instance() {
  MarketInstance m;
  m.demand = Eigen::MatrixXd::Constant(1, 2, 150.0);
  m.demand(0, 1) = 60.0;
  m.periods = 2;
  m.producers = {{"a", 1, 0.0, 100.0, 10.0, 0.0}, {"b", 1, 0.0, 100.0, 15.0, 0.0}};
  return m;
}

// Single-producer piecewise-linear test function with its set.
EvaluableComponent constant_component(const EntrySet& set, double c) {
  return EvaluableComponent{set, [c](const Schedule&) { return c; }, {}};
}

}  // namespace

TEST(Family, RampMatchesClosedFormsOnGrid) {
  Example2 ex;
  const RedundantFamily f = ex.family(GammaVariant::ContinuousRamp);
  ASSERT_EQ(f.components.size(), 3u);
  EXPECT_NEAR(evaluate_component(f, "1", sched(0, 0.0)), fixtures::example2_n1(0, 0.0), 1e-9);
  for (double g = 100.0; g <= 200.0; g += 0.25)
    EXPECT_NEAR(evaluate_component(f, "1", sched(1, g)), fixtures::example2_n1(1, g), 1e-9) << g;
  for (double F = -50.0; F <= 50.0; F += 0.25)
    EXPECT_NEAR(evaluate_component(f, kFtrId, sched(1, F)), fixtures::example2_nftr(F), 1e-9) << F;
  // producer 2 has no uplift
  for (double g = 150.0; g <= 200.0; g += 1.0) EXPECT_NEAR(evaluate_component(f, "2", sched(1, g)), 0.0, 1e-12);
}

TEST(Family, DocumentedPointValues) {
  Example2 ex;
  const RedundantFamily f = ex.family(GammaVariant::ContinuousRamp);
  EXPECT_NEAR(evaluate_component(f, "1", sched(1, 150.0)), 5.0, 1e-9);
  EXPECT_NEAR(evaluate_component(f, "1", sched(0, 0.0)), 0.0, 1e-9);
  EXPECT_NEAR(evaluate_component(f, kFtrId, sched(1, -50.0)), 0.0, 1e-9);
}

TEST(Family, DeltaExactIsSpikeAtDispatch) {
  Example2 ex;
  const RedundantFamily f = ex.family(GammaVariant::DeltaExact);
  EXPECT_NEAR(evaluate_component(f, "1", sched(1, 150.0)), 5.0, 1e-9);
  EXPECT_NEAR(evaluate_component(f, "1", sched(1, 150.5)), 0.0, 1e-12);
  EXPECT_NEAR(evaluate_component(f, "1", sched(0, 0.0)), 0.0, 1e-12);
  EXPECT_NEAR(evaluate_component(f, kFtrId, sched(1, 0.0)), 255.0, 1e-9);
  EXPECT_NEAR(evaluate_component(f, kFtrId, sched(1, -10.0)), 0.0, 1e-12);
}

TEST(Family, DeltaCommitmentDependsOnCommitment) {
  Example2 ex;
  const RedundantFamily f = ex.family(GammaVariant::DeltaCommitment);
  EXPECT_NEAR(evaluate_component(f, "1", sched(1, 150.0)), 5.0, 1e-9);
  EXPECT_NEAR(evaluate_component(f, "1", sched(0, 0.0)), 0.0, 1e-12);
  // online elsewhere: capped by the profit shortfall 0.1 (200 - g)
  EXPECT_NEAR(evaluate_component(f, "1", sched(1, 180.0)), 2.0, 1e-9);
  EXPECT_NEAR(evaluate_component(f, "1", sched(1, 120.0)), 5.0, 1e-9);
}

TEST(Family, OutsideBoxIsRejected) {
  Example2 ex;
  const RedundantFamily f = ex.family(GammaVariant::ContinuousRamp);
  EXPECT_THROW(evaluate_component(f, "1", sched(1, 50.0)), std::domain_error);
  EXPECT_THROW(evaluate_component(f, "1", sched(0, 10.0)), std::domain_error);
  EXPECT_THROW(evaluate_component(f, kFtrId, sched(1, 60.0)), std::domain_error);
  EXPECT_THROW(evaluate_component(f, "nobody", sched(1, 150.0)), std::out_of_range);
}

TEST(Family, ZeroUpliftGivesZeroComponents) {
  const MarketInstance m = convex_instance();
  const DispatchSolution s = solve_dispatch(m);
  const PriceSystem p = marginal_price(m, s);
  for (auto g : {GammaVariant::DeltaExact, GammaVariant::DeltaCommitment, GammaVariant::ContinuousRamp}) {
    const RedundantFamily f = build_family(m, s, p, GammaChoice{g, std::nullopt});
    for (const auto& c : f.components) {
      const ComponentExtremum hi = maximize_component(as_evaluable(c));
      const ComponentExtremum lo = minimize_component(as_evaluable(c));
      EXPECT_NEAR(hi.value, 0.0, 1e-12) << to_string(g);
      EXPECT_NEAR(lo.value, 0.0, 1e-12) << to_string(g);
    }
  }
}

TEST(Family, RampWidthOption) {
  Example2 ex;
  const RedundantFamily f = build_family(ex.m, ex.s, ex.p, GammaChoice{GammaVariant::ContinuousRamp, 10.0});
  EXPECT_NEAR(evaluate_component(f, "1", sched(1, 150.0)), 5.0, 1e-9);
  EXPECT_NEAR(evaluate_component(f, "1", sched(1, 155.0)), 2.5, 1e-9);
  EXPECT_NEAR(evaluate_component(f, "1", sched(1, 165.0)), 0.0, 1e-9);
  EXPECT_THROW(build_family(ex.m, ex.s, ex.p, GammaChoice{GammaVariant::ContinuousRamp, 0.0}), std::invalid_argument);
}

TEST(Family, ShapeMismatchRejected) {
  Example2 ex;
  PriceSystem wrong;
  wrong.prices = Eigen::MatrixXd::Constant(1, 1, 15.0);
  EXPECT_THROW(build_family(ex.m, ex.s, wrong, GammaChoice{}), std::invalid_argument);
}

TEST(Family, GammaNamesRoundTrip) {
  for (auto g : {GammaVariant::DeltaExact, GammaVariant::DeltaCommitment, GammaVariant::ContinuousRamp})
    EXPECT_EQ(parse_gamma(to_string(g)), g);
  EXPECT_FALSE(parse_gamma("tent").has_value());
}

TEST(Aggregate, TwoBoxConstraintsOnProducer1) {
  const EntrySet set = producer_entry(fixtures::example2().producers[0], 1);
  auto h1 = EvaluableComponent{set, [](const Schedule& x) { return x.v(0) - 200.0 * x.u(0); }, {}};
  auto h2 = EvaluableComponent{set, [](const Schedule& x) { return -x.v(0) + 100.0 * x.u(0); }, {}};
  ConstraintFamilySpec spec{{{h1, h2}}, Eigen::Vector2d(0.1, 0.2)};
  const AggregatedConstraint agg = aggregate_constraints(spec);
  ASSERT_EQ(agg.aggregate.size(), 1u);
  EXPECT_NEAR(agg.aggregate[0].fn(sched(1, 150.0)), -15.0, 1e-12);
  EXPECT_NEAR(agg.profit_term[0].fn(sched(1, 150.0)), 15.0, 1e-12);
}

TEST(Aggregate, IdentityZeroAndNegative) {
  const EntrySet set = producer_entry(fixtures::example2().producers[0], 1);
  auto h = EvaluableComponent{set, [](const Schedule& x) { return x.v(0) - 120.0; }, {}};
  const auto one = aggregate_constraints({{{h}}, Eigen::VectorXd::Ones(1)});
  const auto zero = aggregate_constraints({{{h}}, Eigen::VectorXd::Zero(1)});
  for (double g = 100.0; g <= 200.0; g += 5.0) {
    EXPECT_DOUBLE_EQ(one.aggregate[0].fn(sched(1, g)), g - 120.0);
    EXPECT_DOUBLE_EQ(zero.aggregate[0].fn(sched(1, g)), 0.0);
  }
  EXPECT_THROW(aggregate_constraints({{{h}}, Eigen::VectorXd::Constant(1, -0.1)}), std::invalid_argument);
  EXPECT_THROW(aggregate_constraints({{{h}}, Eigen::VectorXd::Ones(2)}), std::invalid_argument);
}

TEST(Rearrange, NonnegativeInputUnchanged) {
  Example2 ex;
  const RedundantFamily f = ex.family(GammaVariant::ContinuousRamp);
  std::vector<EvaluableComponent> in;
  for (const auto& c : f.components) in.push_back(as_evaluable(c));
  const Rearrangement r = rearrange_nonnegative(in);
  EXPECT_TRUE(r.shift.isZero());
  EXPECT_NEAR(r.components[0].fn(sched(1, 150.0)), 5.0, 1e-9);
}

TEST(Rearrange, ShiftsConstantsBetweenEntries) {
  const MarketInstance m = fixtures::table1_uninode();
  const EntrySet s1 = producer_entry(m.producers[0], 1);
  const EntrySet s2 = producer_entry(m.producers[1], 1);
  // N_1 = (g - 100)/10 - 2 online, -2 offline: minimum -2
  auto n1 = EvaluableComponent{s1, [](const Schedule& x) { return x.u(0) ? (x.v(0) - 100.0) / 10.0 - 2.0 : -2.0; }, {}};
  const Rearrangement r = rearrange_nonnegative({n1, constant_component(s2, 5.0)});
  EXPECT_NEAR(r.minima(0), -2.0, 1e-12);
  EXPECT_NEAR(r.minima(1), 5.0, 1e-12);
  EXPECT_NEAR(r.components[0].fn(sched(1, 150.0)), n1.fn(sched(1, 150.0)) + 2.0, 1e-12);
  EXPECT_NEAR(r.components[1].fn(sched(0, 0.0)), 3.0, 1e-12);
  for (double g = 100.0; g <= 200.0; g += 10.0) {
    const Schedule x = sched(1, g);
    EXPECT_NEAR(r.components[0].fn(x) + r.components[1].fn(sched(1, 170.0)), n1.fn(x) + 5.0, 1e-12);
    EXPECT_GE(r.components[0].fn(x), -kTolMoney);
  }
}

TEST(Rearrange, SingleZeroMinimumUnchanged) {
  const EntrySet s = producer_entry(fixtures::example2().producers[0], 1);
  auto n = EvaluableComponent{s, [](const Schedule& x) { return x.u(0) ? 200.0 - x.v(0) : 0.0; }, {}};
  const Rearrangement r = rearrange_nonnegative({n});
  EXPECT_DOUBLE_EQ(r.shift(0), 0.0);
}

TEST(Rearrange, PremiseViolationCarriesWitnesses) {
  const MarketInstance m = fixtures::table1_uninode();
  const EntrySet s1 = producer_entry(m.producers[0], 1);
  const EntrySet s2 = producer_entry(m.producers[1], 1);
  auto n1 = EvaluableComponent{s1, [](const Schedule& x) { return x.u(0) ? x.v(0) - 200.0 : 0.0; }, {}};
  try {
    rearrange_nonnegative({n1, constant_component(s2, 5.0)});
    FAIL() << "expected rejection";
  } catch (const RearrangementError& e) {
    EXPECT_NEAR(e.minima()(0), -100.0, 1e-12);
    ASSERT_EQ(e.witnesses().size(), 2u);
    EXPECT_EQ(e.witnesses()[0].u(0), 1);
    EXPECT_DOUBLE_EQ(e.witnesses()[0].v(0), 100.0);
  }
  // zero-minimum nonnegative part with a negative entry cannot absorb it
  EXPECT_THROW(rearrange_nonnegative({constant_component(s1, 0.0), constant_component(s2, -1.0)}),
               RearrangementError);
}

TEST(Verify, Example2AllVariantsPass) {
  Example2 ex;
  for (auto g : {GammaVariant::DeltaExact, GammaVariant::DeltaCommitment, GammaVariant::ContinuousRamp}) {
    const VerificationReport r = verify_proposition(ex.family(g), ex.m, ex.s, ex.p, 1.0);
    EXPECT_TRUE(r.pass()) << to_string(g);
    EXPECT_GE(r.feasible_samples, 1u);
  }
}

TEST(Verify, DoubledComponentBreaksMaxProfit) {
  Example2 ex;
  RedundantFamily f = ex.family(GammaVariant::ContinuousRamp);
  f.components[0].scale = 2.0;
  const VerificationReport r = verify_proposition(f, ex.m, ex.s, ex.p, 1.0);
  EXPECT_FALSE(r.pass());
  EXPECT_FALSE(r.entries[0].max_profit.pass);
  EXPECT_NEAR(r.entries[0].max_profit.value, 5.0, 1e-9);
  EXPECT_NEAR(r.entries[0].max_profit.witness.v(0), 150.0, 1e-9);
  EXPECT_FALSE(r.entries[0].at_dispatch.pass);
  EXPECT_TRUE(r.entries[0].nonnegative.pass);
  EXPECT_TRUE(r.entries[2].max_profit.pass);
}

TEST(Verify, ZeroFamilyOnConvexInstancePasses) {
  const MarketInstance m = convex_instance();
  const DispatchSolution s = solve_dispatch(m);
  const PriceSystem p = marginal_price(m, s);
  const RedundantFamily f = scale_family(build_family(m, s, p, GammaChoice{}), 0.0);
  EXPECT_TRUE(verify_proposition(f, m, s, p, 1.0).pass());
}

TEST(Verify, RejectsForeignPriceSystem) {
  Example2 ex;
  const RedundantFamily f = ex.family(GammaVariant::ContinuousRamp);
  PriceSystem other = ex.p;
  other.prices(0, 0) = 15.0;
  EXPECT_THROW(verify_proposition(f, ex.m, ex.s, other, 1.0), std::invalid_argument);
}

TEST(NuAnalysis, Example2Ramp) {
  Example2 ex;
  const NuAnalysis a = nu_analysis(ex.m, ex.s, ex.p, ex.family(GammaVariant::ContinuousRamp), {0.0, 0.5, 1.0});
  EXPECT_NEAR(a.nu_max, 1.0, 1e-6);
  EXPECT_FALSE(a.cap_reached);
  EXPECT_TRUE(a.gap_invariant);
  EXPECT_NEAR(a.dual_at_zero, 2010.0, kTolMoney);
  ASSERT_EQ(a.curve.size(), 3u);
  EXPECT_NEAR(a.curve[0].total_uplift, 260.0, kTolMoney);
  EXPECT_NEAR(a.curve[2].total_uplift, 0.0, kTolMoney);
  for (const auto& pt : a.curve) EXPECT_NEAR(pt.dual_value, 2010.0, kTolMoney);
}

TEST(NuAnalysis, ZeroFamilyHitsCap) {
  Example2 ex;
  const RedundantFamily zero = scale_family(ex.family(GammaVariant::ContinuousRamp), 0.0);
  const NuAnalysis a = nu_analysis(ex.m, ex.s, ex.p, zero, {0.0, 1.0, 5.0});
  EXPECT_TRUE(a.cap_reached);
  EXPECT_DOUBLE_EQ(a.nu_max, kNuCap);
  EXPECT_TRUE(a.gap_invariant);
  for (const auto& pt : a.curve) EXPECT_NEAR(pt.total_uplift, 260.0, kTolMoney);
}

TEST(NuAnalysis, Example2DeltaExact) {
  Example2 ex;
  const RedundantFamily f = ex.family(GammaVariant::DeltaExact);
  const NuAnalysis a = nu_analysis(ex.m, ex.s, ex.p, f, {1.0});
  EXPECT_NEAR(a.curve[0].total_uplift, 0.0, kTolMoney);
  const ProfitReport with = uplift_report(ex.m, ex.s, ex.p, 1.0, &f);
  const ProfitReport without = uplift_report(ex.m, ex.s, ex.p);
  EXPECT_NEAR(with.total_plus, without.total_plus, kTolMoney);
  EXPECT_NEAR(a.nu_max, 1.0, 1e-6);
}

TEST(NuAnalysis, NegativeGridEntryRejected) {
  Example2 ex;
  EXPECT_THROW(nu_analysis(ex.m, ex.s, ex.p, ex.family(GammaVariant::DeltaExact), {-1.0}), std::invalid_argument);
}
