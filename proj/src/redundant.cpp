#include "uplift/redundant.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "uplift/pricing.hpp"

namespace uplift {

RedundantFamily build_family(const MarketInstance& instance, const DispatchSolution& dispatch,
                             const PriceSystem& price, const GammaChoice& gamma) {
  if (!dispatch.feasible) throw InfeasibleError("redundant family needs a feasible dispatch");
  if (price.prices.rows() != instance.node_count() || price.prices.cols() != instance.periods)
    throw std::invalid_argument("price system shape does not match instance");
  if (dispatch.u_star.rows() != instance.producer_count() || dispatch.u_star.cols() != instance.periods)
    throw std::invalid_argument("dispatch shape does not match instance");
  if (gamma.ramp_width && !(*gamma.ramp_width > 0.0)) throw std::invalid_argument("ramp width must be positive");

  RedundantFamily fam;
  fam.gamma = gamma;
  fam.price = price.prices;
  const auto entries = market_entries(instance);
  for (int k = 0; k < static_cast<int>(entries.size()); ++k)
    fam.components.push_back(make_component(entries[k], price_signal(entries[k], price.prices),
                                            entry_schedule(instance, dispatch, k), gamma));
  return fam;
}

RedundantFamily scale_family(RedundantFamily family, double factor) {
  for (auto& c : family.components) c.scale *= factor;
  return family;
}

EvaluableComponent as_evaluable(const FamilyComponent& c) {
  return EvaluableComponent{c.set, [c](const Schedule& x) { return evaluate(c, x); }, c.kinks};
}

AggregatedConstraint aggregate_constraints(const ConstraintFamilySpec& spec) {
  const Eigen::Index K = spec.sigma_plus.size();
  for (Eigen::Index k = 0; k < K; ++k)
    if (spec.sigma_plus(k) < 0.0) throw std::invalid_argument("sigma+ entries must be nonnegative");

  AggregatedConstraint out;
  for (const auto& hi : spec.h) {
    if (static_cast<Eigen::Index>(hi.size()) != K)
      throw std::invalid_argument("every entry needs one function per priced constraint");
    if (hi.empty()) throw std::invalid_argument("constraint family is empty");
    const EntrySet& set = hi.front().set;
    std::vector<std::vector<double>> kinks(set.periods());
    for (const auto& h : hi) {
      if (h.set.id != set.id) throw std::invalid_argument("constraint functions of one entry disagree on the entry");
      for (int t = 0; t < set.periods() && t < static_cast<int>(h.kinks.size()); ++t)
        kinks[t].insert(kinks[t].end(), h.kinks[t].begin(), h.kinks[t].end());
    }
    auto fns = hi;
    const Eigen::VectorXd sigma = spec.sigma_plus;
    auto agg = [fns, sigma](const Schedule& x) {
      double s = 0.0;
      for (std::size_t k = 0; k < fns.size(); ++k)
        if (sigma(static_cast<Eigen::Index>(k)) != 0.0) s += sigma(static_cast<Eigen::Index>(k)) * fns[k].fn(x);
      return s;
    };
    out.aggregate.push_back(EvaluableComponent{set, agg, kinks});
    out.profit_term.push_back(EvaluableComponent{set, [agg](const Schedule& x) { return -agg(x); }, kinks});
  }
  return out;
}

namespace {

constexpr double kProductBudget = 2.0e6;
constexpr std::size_t kPeriodPointCap = 4000;
constexpr double kOmegaBudget = 20000.0;

std::vector<std::vector<PeriodState>> grid_states(const EntrySet& e, const std::vector<std::vector<double>>& kinks,
                                                  const Schedule* anchor, int uniform) {
  const int T = e.periods();
  // keep the product of per-period grids within budget
  if (T > 1) uniform = std::max(1, std::min(uniform, static_cast<int>(std::pow(kProductBudget, 1.0 / T)) - 8));
  std::vector<std::vector<PeriodState>> states;
  for (int t = 0; t < T; ++t) {
    auto pts = box_grid(e, t, uniform);
    if (t < static_cast<int>(kinks.size())) pts.insert(pts.end(), kinks[t].begin(), kinks[t].end());
    if (anchor) pts.push_back(anchor->v(t));
    states.push_back(period_states(e, t, std::move(pts)));
  }
  return states;
}

// Smaller schedule in lexicographic (u, v) order, period by period.
bool lex_less(const Schedule& a, const Schedule& b) {
  for (Eigen::Index t = 0; t < a.u.size(); ++t) {
    if (a.u(t) != b.u(t)) return a.u(t) < b.u(t);
    if (a.v(t) != b.v(t)) return a.v(t) < b.v(t);
  }
  return false;
}

// Extremum of fn over a state grid; sign = +1 maximizes, -1 minimizes.
// Ties (within kTolTie) keep the lexicographically smallest witness.
template <class Fn>
ComponentExtremum extremum(const std::vector<std::vector<PeriodState>>& states, double sign, Fn&& fn) {
  ComponentExtremum best;
  bool first = true;
  for_each_schedule(states, [&](const Schedule& x) {
    const double v = sign * fn(x);
    if (first || v > best.value + kTolTie || (v >= best.value - kTolTie && lex_less(x, best.at))) {
      if (first || v > best.value + kTolTie) best.value = v;
      else best.value = std::max(best.value, v);
      best.at = x;
      first = false;
    }
  });
  best.value *= sign;
  return best;
}

}  // namespace

ComponentExtremum minimize_component(const EvaluableComponent& c, int uniform) {
  return extremum(grid_states(c.set, c.kinks, nullptr, uniform), -1.0, c.fn);
}

ComponentExtremum maximize_component(const EvaluableComponent& c, int uniform) {
  return extremum(grid_states(c.set, c.kinks, nullptr, uniform), 1.0, c.fn);
}

Rearrangement rearrange_nonnegative(const std::vector<EvaluableComponent>& components) {
  const auto n = static_cast<Eigen::Index>(components.size());
  Rearrangement out;
  out.minima.resize(n);
  out.shift = Eigen::VectorXd::Zero(n);
  std::vector<Schedule> witnesses;
  for (Eigen::Index i = 0; i < n; ++i) {
    const ComponentExtremum m = minimize_component(components[i]);
    out.minima(i) = m.value;
    witnesses.push_back(m.at);
  }

  double neg_sum = 0.0, pos_sum = 0.0;
  bool any_negative = false;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (out.minima(i) < 0.0) {
      neg_sum += out.minima(i);
      any_negative = true;
    } else {
      pos_sum += out.minima(i);
    }
  }
  if (neg_sum + pos_sum < -kTolMoney) {
    std::ostringstream msg;
    msg << "sum of component minima is negative (" << neg_sum + pos_sum << ")";
    throw RearrangementError(msg.str(), out.minima, witnesses);
  }
  if (any_negative && pos_sum <= 0.0)
    throw RearrangementError("nonnegative components have zero total minimum", out.minima, witnesses);

  for (Eigen::Index i = 0; i < n; ++i) {
    if (!any_negative) break;
    // I-: lift to a zero minimum; I+: give up a share proportional to the own minimum
    out.shift(i) = out.minima(i) < 0.0 ? -out.minima(i) : neg_sum / pos_sum * out.minima(i);
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    const double s = out.shift(i);
    const auto fn = components[i].fn;
    out.components.push_back(
        EvaluableComponent{components[i].set, [fn, s](const Schedule& x) { return fn(x) + s; }, components[i].kinks});
  }
  return out;
}

bool VerificationReport::pass() const {
  for (const auto& e : entries)
    if (!e.max_profit.pass || !e.at_dispatch.pass || !e.nonnegative.pass) return false;
  return redundant_on_product && redundant_on_feasible_set;
}

namespace {

// Dispatch-feasible points of one period, thinned to at most kPeriodPointCap.
std::vector<PeriodPoint> period_sample(const MarketInstance& inst, int t, double step) {
  auto pts = enumerate_period_points(inst, t, step);
  if (pts.size() <= kPeriodPointCap) return pts;
  const std::size_t stride = (pts.size() + kPeriodPointCap - 1) / kPeriodPointCap;
  std::vector<PeriodPoint> out;
  for (std::size_t k = 0; k < pts.size(); k += stride) out.push_back(pts[k]);
  return out;
}

// Schedule of entry k when every period sits at the given point.
Schedule schedule_of(const MarketInstance& inst, int k, const std::vector<const PeriodPoint*>& pts) {
  const int T = inst.periods;
  Schedule x{Eigen::VectorXi(T), Eigen::VectorXd(T)};
  for (int t = 0; t < T; ++t) {
    if (k < inst.producer_count()) {
      x.u(t) = pts[t]->u(k);
      x.v(t) = pts[t]->g(k);
    } else {
      x.u(t) = 1;
      x.v(t) = pts[t]->f;
    }
  }
  return x;
}

}  // namespace

VerificationReport verify_proposition(const RedundantFamily& family, const MarketInstance& instance,
                                      const DispatchSolution& dispatch, const PriceSystem& price, double grid_step) {
  if (grid_step <= 0.0) throw std::invalid_argument("grid step must be positive");
  if (!dispatch.feasible) throw InfeasibleError("verification needs a feasible dispatch");
  const auto entries = market_entries(instance);
  if (family.components.size() != entries.size())
    throw std::invalid_argument("family does not match the market entries");
  if (family.price.rows() != price.prices.rows() || family.price.cols() != price.prices.cols() ||
      (family.price - price.prices).cwiseAbs().maxCoeff() > kTolMatch)
    throw std::invalid_argument("family was built against a different price system");

  VerificationReport rep;
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const FamilyComponent& c = family.components[k];
    const Schedule x_star = entry_schedule(instance, dispatch, static_cast<int>(k));
    if (!same_schedule(x_star, c.x_star) || x_star.u != c.x_star.u)
      throw std::invalid_argument("family was built against a different dispatch");
    const Eigen::VectorXd sig = price_signal(entries[k], price.prices);
    const auto states = grid_states(c.set, c.kinks, &x_star, 101);

    EntryVerification ev;
    ev.id = c.id();
    const ComponentExtremum hi =
        extremum(states, 1.0, [&](const Schedule& x) { return standalone_profit(c.set, sig, x) + evaluate(c, x); });
    const StandaloneBest plain = standalone_best(c.set, sig);
    ev.max_profit = {std::abs(hi.value - plain.value) <= kTolMoney, hi.value, plain.value, hi.at};

    const double at = evaluate(c, x_star);
    const double expected = plain.value - standalone_profit(c.set, sig, x_star);
    ev.at_dispatch = {std::abs(at - expected) <= kTolMoney, at, expected, x_star};

    const ComponentExtremum lo = extremum(states, -1.0, [&](const Schedule& x) { return evaluate(c, x); });
    ev.nonnegative = {lo.value >= -kTolMoney, lo.value, 0.0, lo.at};
    rep.product_min_sum += lo.value;
    rep.entries.push_back(std::move(ev));
  }
  rep.redundant_on_product = rep.product_min_sum >= -kTolMoney;

  // sampled dispatch-feasible set: full product of per-period samples, or a star around x*
  const int T = instance.periods;
  std::vector<std::vector<PeriodPoint>> per(T);
  std::vector<PeriodPoint> star(T);
  double product = 1.0;
  for (int t = 0; t < T; ++t) {
    star[t] = PeriodPoint{dispatch.u_star.col(t), dispatch.g_star.col(t), dispatch.f_star ? (*dispatch.f_star)(t) : 0.0};
    per[t] = period_sample(instance, t, grid_step);
    per[t].push_back(star[t]);
    product *= static_cast<double>(per[t].size());
  }
  rep.feasible_min_sum = std::numeric_limits<double>::infinity();
  auto visit = [&](const std::vector<const PeriodPoint*>& pts) {
    double s = 0.0;
    for (std::size_t k = 0; k < entries.size(); ++k)
      s += evaluate(family.components[k], schedule_of(instance, static_cast<int>(k), pts));
    rep.feasible_min_sum = std::min(rep.feasible_min_sum, s);
    ++rep.feasible_samples;
  };
  std::vector<const PeriodPoint*> pts(T);
  if (product <= kOmegaBudget) {
    std::vector<std::size_t> idx(T, 0);
    while (true) {
      for (int t = 0; t < T; ++t) pts[t] = &per[t][idx[t]];
      visit(pts);
      int t = T - 1;
      while (t >= 0 && ++idx[t] == per[t].size()) idx[t--] = 0;
      if (t < 0) break;
    }
  } else {
    for (int t = 0; t < T; ++t) {
      for (int s = 0; s < T; ++s) pts[s] = &star[s];
      for (const auto& p : per[t]) {
        pts[t] = &p;
        visit(pts);
      }
    }
  }
  rep.redundant_on_feasible_set = rep.feasible_min_sum >= -kTolMoney;
  return rep;
}

NuAnalysis nu_analysis(const MarketInstance& instance, const DispatchSolution& dispatch, const PriceSystem& price,
                       const RedundantFamily& family, const std::vector<double>& nu_grid) {
  NuAnalysis out;
  out.dual_at_zero = dual_value(instance, price).value;
  auto dual_at = [&](double nu) { return dual_value(instance, price, nu, &family).value; };
  auto keeps_dual = [&](double nu) { return dual_at(nu) >= out.dual_at_zero - kTolMoney; };

  if (keeps_dual(kNuCap)) {
    out.nu_max = kNuCap;
    out.cap_reached = true;
  } else {
    // the dual is concave in nu, so the level set is an interval containing 0
    double lo = 0.0, hi = kNuCap;
    while (hi - lo > kNuResolution) {
      const double mid = 0.5 * (lo + hi);
      (keeps_dual(mid) ? lo : hi) = mid;
    }
    out.nu_max = lo;
  }
  out.gap_invariant = std::abs(dual_at(1.0) - out.dual_at_zero) <= kTolMoney;

  for (double nu : nu_grid) {
    if (nu < 0.0) throw std::invalid_argument("nu grid entries must be nonnegative");
    const ProfitReport rep = uplift_report(instance, dispatch, price, nu, &family);
    out.curve.push_back(NuPoint{nu, rep.total_uplift, rep.dual_value});
  }
  return out;
}

}  // namespace uplift
