#include "uplift/profit.hpp"

#include <cmath>
#include <sstream>

#include "uplift/pricing.hpp"

namespace uplift {

namespace {

constexpr int kGuardPoints = 1001;
constexpr double kGuardProductBudget = 4000.0;

double objective(const EntrySet& e, const Eigen::VectorXd& q, double nu, const FamilyComponent& c, const Schedule& x) {
  return standalone_profit(e, q, x) + nu * evaluate(c, x);
}

[[noreturn]] void guard_failure(const EntrySet& e, const Schedule& x, double grid, double analytic) {
  std::ostringstream msg;
  msg << "best response guard: grid point beats analytic maximum for '" << e.id << "' (grid " << grid
      << " vs analytic " << analytic << ", v = " << x.v.transpose() << ", u = " << x.u.transpose() << ")";
  throw std::logic_error(msg.str());
}

void grid_guard(const EntrySet& e, const Eigen::VectorXd& q, double nu, const FamilyComponent& c,
                const BestResponse& br) {
  const int T = e.periods();
  if (T == 1 || c.variant == GammaVariant::ContinuousRamp) {
    // one coordinate at a time around the argmax; exact for period-separable objectives
    for (int t = 0; t < T; ++t) {
      for (const auto& s : period_states(e, t, box_grid(e, t, kGuardPoints - 2))) {
        Schedule x = br.argmax;
        x.u(t) = s.u;
        x.v(t) = s.v;
        const double val = objective(e, q, nu, c, x);
        if (val > br.profit_plus + kTolMoney) guard_failure(e, x, val, br.profit_plus);
      }
    }
    return;
  }
  const int per_axis = std::max(3, static_cast<int>(std::pow(kGuardProductBudget, 1.0 / T)));
  std::vector<std::vector<PeriodState>> states;
  for (int t = 0; t < T; ++t) {
    auto pts = box_grid(e, t, per_axis - 2);
    pts.push_back(c.x_star.v(t));
    states.push_back(period_states(e, t, pts));
  }
  for_each_schedule(states, [&](const Schedule& x) {
    const double val = objective(e, q, nu, c, x);
    if (val > br.profit_plus + kTolMoney) guard_failure(e, x, val, br.profit_plus);
  });
}

}  // namespace

BestResponse entry_best_response(const EntrySet& entry, const Eigen::VectorXd& signal, double nu,
                                 const FamilyComponent* component, const BestResponseOptions& opts) {
  EntryOptimum opt = maximize_entry(entry, signal, nu, component);
  BestResponse br{opt.value, std::move(opt.argmax), std::move(opt.per_period), opt.nu_term};
  if (opts.grid_guard && component != nullptr && nu * component->scale != 0.0)
    grid_guard(entry, signal, nu, *component, br);
  return br;
}

BestResponse best_response(const ProducerSpec& producer, const Eigen::VectorXd& price, double nu,
                           const FamilyComponent* component, const BestResponseOptions& opts) {
  const EntrySet e = producer_entry(producer, static_cast<int>(price.size()));
  return entry_best_response(e, price, nu, component, opts);
}

BestResponse ftr_best_response(const Eigen::VectorXd& p1, const Eigen::VectorXd& p2, double f_max, double nu,
                               const FamilyComponent* component, const BestResponseOptions& opts) {
  if (p1.size() != p2.size()) throw std::invalid_argument("nodal price vectors differ in length");
  const EntrySet e = ftr_entry(f_max, static_cast<int>(p1.size()));
  return entry_best_response(e, p2 - p1, nu, component, opts);
}

double profit_at_dispatch(const MarketInstance& instance, const DispatchSolution& dispatch, int k,
                          const Eigen::MatrixXd& price, double nu, const FamilyComponent* component) {
  const auto entries = market_entries(instance);
  if (k < 0 || k >= static_cast<int>(entries.size())) throw std::out_of_range("market entry index out of range");
  const Schedule x = entry_schedule(instance, dispatch, k);
  double profit = standalone_profit(entries[k], price_signal(entries[k], price), x);
  if (component != nullptr) profit += nu * evaluate(*component, x);
  return profit;
}

ProfitReport uplift_report(const MarketInstance& instance, const DispatchSolution& dispatch, const PriceSystem& price,
                           double nu, const RedundantFamily* family, const BestResponseOptions& opts) {
  if (!dispatch.feasible) throw InfeasibleError("uplift report needs a feasible dispatch");
  if (nu < 0.0) throw std::invalid_argument("nu must be nonnegative");
  const auto entries = market_entries(instance);
  if (family != nullptr && family->components.size() != entries.size())
    throw std::invalid_argument("family does not match the market entries");

  ProfitReport rep;
  rep.nu = nu;
  rep.f_star = dispatch.cost;
  const DualEvaluation dual = dual_value(instance, price, nu, family, opts);
  rep.dual_value = dual.value;

  for (int k = 0; k < static_cast<int>(entries.size()); ++k) {
    const FamilyComponent* comp = family ? &family->components[k] : nullptr;
    ProfitEntry pe;
    pe.id = entries[k].id;
    pe.kind = entries[k].kind;
    pe.profit_star = profit_at_dispatch(instance, dispatch, k, price.prices, nu, comp);
    pe.profit_plus = dual.responses[k].profit_plus;
    pe.uplift = pe.profit_plus - pe.profit_star;
    if (comp != nullptr) rep.nu_sum_at_dispatch += nu * evaluate(*comp, entry_schedule(instance, dispatch, k));
    rep.total_star += pe.profit_star;
    rep.total_plus += pe.profit_plus;
    rep.total_uplift += pe.uplift;
    rep.entries.push_back(std::move(pe));
  }
  rep.duality_gap_check = rep.f_star - rep.dual_value - rep.nu_sum_at_dispatch;
  if (std::abs(rep.duality_gap_check - rep.total_uplift) > kTolMoney) {
    std::ostringstream msg;
    msg << "uplift identity violated: total uplift " << rep.total_uplift << " vs f* - dual - nu sum N(x*) "
        << rep.duality_gap_check;
    throw std::logic_error(msg.str());
  }
  return rep;
}

}  // namespace uplift
