#include <gtest/gtest.h>

#include "generators.hpp"
#include "oracles.hpp"
#include "uplift/pricing.hpp"
#include "uplift/profit.hpp"
#include "uplift/redundant.hpp"

using namespace uplift;

namespace {

constexpr GammaVariant kVariants[] = {GammaVariant::DeltaExact, GammaVariant::DeltaCommitment,
                                      GammaVariant::ContinuousRamp};

class RandomMarkets : public ::testing::TestWithParam<int> {
 protected:
  void SetUp() override {
    std::mt19937_64 rng(1000 + GetParam());
    m = fixtures::random_instance(rng);
    s = solve_dispatch(m);
    price_rng.seed(2000 + GetParam());
  }

  PriceSystem random_prices() {
    std::uniform_real_distribution<double> d(0.0, 40.0);
    PriceSystem p;
    p.prices = Eigen::MatrixXd::NullaryExpr(m.node_count(), m.periods, [&] { return std::round(d(price_rng) * 100) / 100; });
    return p;
  }

  MarketInstance m;
  DispatchSolution s;
  std::mt19937_64 price_rng;
};

}  // namespace

TEST_P(RandomMarkets, WeakDualityAndIndependentDual) {
  for (int k = 0; k < 10; ++k) {
    const PriceSystem q = random_prices();
    const double d = dual_value(m, q).value;
    EXPECT_LE(d, s.cost + kTolMoney);
    EXPECT_NEAR(d, fixtures::brute_dual(m, q.prices), kTolMoney);
  }
}

TEST_P(RandomMarkets, DualIsConcave) {
  for (int k = 0; k < 10; ++k) {
    const PriceSystem a = random_prices(), b = random_prices();
    PriceSystem mid;
    mid.prices = 0.5 * (a.prices + b.prices);
    EXPECT_GE(dual_value(m, mid).value, 0.5 * (dual_value(m, a).value + dual_value(m, b).value) - kTolMoney);
  }
}

TEST_P(RandomMarkets, ChpMaximizesDual) {
  const double best = dual_value(m, chp_price(m)).value;
  for (int k = 0; k < 20; ++k) EXPECT_LE(dual_value(m, random_prices()).value, best + kTolMoney);
  EXPECT_NEAR(duality_gap(m), s.cost - best, kTolMoney);
  EXPECT_GE(duality_gap(m), -kTolMoney);
}

TEST_P(RandomMarkets, TotalUpliftIsGapAtAnyPrice) {
  for (int k = 0; k < 5; ++k) {
    const PriceSystem q = random_prices();
    const ProfitReport r = uplift_report(m, s, q);
    EXPECT_NEAR(r.total_uplift, s.cost - r.dual_value, kTolMoney);
    for (const auto& e : r.entries) EXPECT_GE(e.uplift, -kTolMoney);
  }
}

TEST_P(RandomMarkets, FamiliesAtChpAndMarginalPrices) {
  for (const PriceSystem& p : {chp_price(m), marginal_price(m, s)}) {
    const ProfitReport base = uplift_report(m, s, p);
    for (GammaVariant g : kVariants) {
      const RedundantFamily f = build_family(m, s, p, GammaChoice{g, std::nullopt});
      EXPECT_TRUE(verify_proposition(f, m, s, p, 2.0).pass()) << to_string(g);
      for (double nu : {0.0, 0.3, 0.7, 1.0}) {
        const ProfitReport r = uplift_report(m, s, p, nu, &f);
        EXPECT_NEAR(r.dual_value, base.dual_value, kTolMoney) << to_string(g) << " nu " << nu;
        // total uplift shrinks by exactly nu * sum_k N_k(x*)
        EXPECT_NEAR(r.total_uplift, base.total_uplift * (1.0 - nu), kTolMoney) << to_string(g) << " nu " << nu;
      }
      const ProfitReport one = uplift_report(m, s, p, 1.0, &f);
      for (std::size_t k = 0; k < one.entries.size(); ++k) {
        EXPECT_NEAR(one.entries[k].uplift, 0.0, kTolMoney);
        EXPECT_NEAR(one.entries[k].profit_plus, base.entries[k].profit_plus, kTolMoney);
      }
      const NuAnalysis a = nu_analysis(m, s, p, f, {});
      EXPECT_TRUE(a.gap_invariant);
      EXPECT_GE(a.nu_max, 1.0 - kNuResolution);
      if (base.total_uplift > 1e-3) EXPECT_NEAR(a.nu_max, 1.0, 1e-5) << to_string(g);
    }
  }
}

TEST_P(RandomMarkets, AggregationMatchesPricedConstraints) {
  // h1 = g - 0.9 g_max u, h2 = (t+1) u - 0.01 g, priced separately vs aggregated
  std::uniform_real_distribution<double> sig(0.0, 2.0);
  const Eigen::Vector2d sigma(sig(price_rng), sig(price_rng));
  ConstraintFamilySpec spec;
  spec.sigma_plus = sigma;
  const auto entries = market_entries(m);
  for (int i = 0; i < m.producer_count(); ++i) {
    const EntrySet set = entries[i];
    const double cap = m.producers[i].g_max;
    auto h1 = EvaluableComponent{set, [cap](const Schedule& x) { return x.v.sum() - 0.9 * cap * x.u.sum(); }, {}};
    auto h2 = EvaluableComponent{set, [](const Schedule& x) {
                                   double s = 0.0;
                                   for (Eigen::Index t = 0; t < x.u.size(); ++t) s += (t + 1.0) * x.u(t) - 0.01 * x.v(t);
                                   return s;
                                 }, {}};
    spec.h.push_back({h1, h2});
  }
  const AggregatedConstraint agg = aggregate_constraints(spec);
  const PriceSystem p = random_prices();
  for (int i = 0; i < m.producer_count(); ++i) {
    const EntrySet& set = entries[i];
    const Eigen::VectorXd sigp = price_signal(set, p.prices);
    for (const auto& pts : {box_grid(set, 0, 7)}) {
      for (double v : pts) {
        Schedule x{Eigen::VectorXi::Ones(m.periods), Eigen::VectorXd::Constant(m.periods, v)};
        if (!in_private_set(set, x)) continue;
        const double priced = standalone_profit(set, sigp, x) - sigma(0) * spec.h[i][0].fn(x) - sigma(1) * spec.h[i][1].fn(x);
        EXPECT_NEAR(standalone_profit(set, sigp, x) + agg.profit_term[i].fn(x), priced, 1e-9);
      }
    }
  }
}

TEST_P(RandomMarkets, RearrangementKeepsSum) {
  const PriceSystem p = chp_price(m);
  const RedundantFamily f = build_family(m, s, p, GammaChoice{});
  std::vector<EvaluableComponent> comps;
  const double total_shift = 0.3 * (f.components.size() - 1);
  for (std::size_t k = 0; k < f.components.size(); ++k) {
    EvaluableComponent c = as_evaluable(f.components[k]);
    // move a constant from entry 0 to the others so entry 0 may go negative
    const double delta = k == 0 ? -total_shift : 0.3;
    auto fn = c.fn;
    c.fn = [fn, delta](const Schedule& x) { return fn(x) + delta + 1.0; };
    comps.push_back(c);
  }
  const Rearrangement r = rearrange_nonnegative(comps);
  EXPECT_NEAR(r.shift.sum(), 0.0, 1e-9);
  for (std::size_t k = 0; k < comps.size(); ++k) {
    EXPECT_GE(minimize_component(r.components[k]).value, -kTolMoney);
    const Schedule x = entry_schedule(m, s, static_cast<int>(k));
    EXPECT_NEAR(r.components[k].fn(x) - comps[k].fn(x), r.shift(k), 1e-12);
  }
}

TEST_P(RandomMarkets, MarginalPricesSupportDispatch) {
  const PriceSystem p = marginal_price(m, s);
  for (int i = 0; i < m.producer_count(); ++i) {
    const ProducerSpec& pr = m.producers[i];
    for (int t = 0; t < m.periods; ++t) {
      const double q = p.prices(pr.node - 1, t);
      EXPECT_NEAR((q - pr.a) * s.g_star(i, t) - pr.w * s.u_star(i, t), fixtures::brute_restricted_best(pr, q, s.u_star(i, t)),
                  kTolMoney);
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, RandomMarkets, ::testing::Range(0, 25));

TEST(LongHorizon, DeltaCommitmentBestResponseOverManyPeriods) {
  // T = 4 exercises the coupled vertex enumeration against the product-grid guard
  std::mt19937_64 rng(5);
  fixtures::RandomSpec spec;
  spec.periods = {4};
  for (int k = 0; k < 5; ++k) {
    const MarketInstance m = fixtures::random_instance(rng, spec);
    const DispatchSolution s = solve_dispatch(m);
    for (const PriceSystem& p : {chp_price(m), marginal_price(m, s)}) {
      const RedundantFamily f = build_family(m, s, p, GammaChoice{GammaVariant::DeltaCommitment, std::nullopt});
      EXPECT_NEAR(dual_value(m, p, 1.0, &f).value, dual_value(m, p).value, kTolMoney);
      EXPECT_NEAR(uplift_report(m, s, p, 1.0, &f).total_uplift, 0.0, kTolMoney);
    }
  }
}
