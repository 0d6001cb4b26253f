#include "uplift/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace uplift {

const char* to_string(PriceMethod m) {
  switch (m) {
    case PriceMethod::Marginal: return "marginal";
    case PriceMethod::CHP: return "chp";
    case PriceMethod::UserSupplied: return "user";
  }
  return "?";
}

std::optional<PriceMethod> parse_price_method(const std::string& name) {
  if (name == "marginal") return PriceMethod::Marginal;
  if (name == "chp") return PriceMethod::CHP;
  if (name == "user") return PriceMethod::UserSupplied;
  return std::nullopt;
}

DualEvaluation dual_value(const MarketInstance& instance, const PriceSystem& q, double nu,
                          const RedundantFamily* family, const BestResponseOptions& opts) {
  if (q.prices.rows() != instance.node_count() || q.prices.cols() != instance.periods)
    throw std::invalid_argument("price system shape does not match instance");
  if (nu < 0.0) throw std::invalid_argument("nu must be nonnegative");
  const auto entries = market_entries(instance);
  if (family != nullptr && family->components.size() != entries.size())
    throw std::invalid_argument("family does not match the market entries");

  DualEvaluation out;
  out.value = q.prices.cwiseProduct(instance.demand).sum();
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const FamilyComponent* comp = family ? &family->components[k] : nullptr;
    out.responses.push_back(entry_best_response(entries[k], price_signal(entries[k], q.prices), nu, comp, opts));
    out.value -= out.responses.back().profit_plus;
  }
  return out;
}

namespace {

double producer_period_best(const ProducerSpec& p, double q) {
  return std::max(0.0, std::max((q - p.a) * p.g_min, (q - p.a) * p.g_max) - p.w);
}

// Dual of one period; q2 ignored for uninode markets.
double period_dual(const MarketInstance& inst, int t, double q1, double q2) {
  double val = q1 * inst.demand(0, t);
  if (inst.two_node()) val += q2 * inst.demand(1, t) - inst.network.f_max * std::abs(q2 - q1);
  for (const auto& p : inst.producers) val -= producer_period_best(p, p.node == 1 ? q1 : q2);
  return val;
}

std::vector<double> node_kinks(const MarketInstance& inst, int node) {
  std::vector<double> k;
  for (const auto& p : inst.producers) {
    if (p.node != node) continue;
    k.push_back(p.a);
    if (p.g_max > 0.0) k.push_back(p.a + p.w / p.g_max);
    if (p.g_min > 0.0) k.push_back(p.a + p.w / p.g_min);
  }
  std::sort(k.begin(), k.end());
  k.erase(std::unique(k.begin(), k.end()), k.end());
  return k;
}

void require_bounded_dual(const MarketInstance& inst, int t) {
  double cap1 = 0.0, cap2 = 0.0;
  for (const auto& p : inst.producers) (p.node == 1 ? cap1 : cap2) += p.g_max;
  if (!inst.two_node()) {
    if (inst.demand(0, t) > cap1 + kTolBalance)
      throw InfeasibleError("demand exceeds total capacity in period " + std::to_string(t));
    return;
  }
  const double d1 = inst.demand(0, t), d2 = inst.demand(1, t), fmax = inst.network.f_max;
  const double lo = std::max({-fmax, -d1, d2 - cap2});
  const double hi = std::min({fmax, cap1 - d1, d2});
  if (lo > hi + kTolBalance)
    throw InfeasibleError("relaxed two-node balance is infeasible in period " + std::to_string(t));
}

double pick_price(const PriceInterval& iv) {
  if (std::isfinite(iv.lower)) return iv.lower;
  if (std::isfinite(iv.upper)) return iv.upper;
  return 0.0;
}

}  // namespace

PriceSystem chp_price(const MarketInstance& instance) {
  PriceSystem out;
  out.method = PriceMethod::CHP;
  out.prices = Eigen::MatrixXd::Zero(instance.node_count(), instance.periods);

  const std::vector<double> k1 = node_kinks(instance, 1);
  const std::vector<double> k2 = instance.two_node() ? node_kinks(instance, 2) : std::vector<double>{};
  std::vector<std::pair<double, double>> cand;
  if (!instance.two_node()) {
    for (double c : k1) cand.emplace_back(c, 0.0);
  } else {
    for (double c1 : k1)
      for (double c2 : k2) cand.emplace_back(c1, c2);
    for (double c : k1) cand.emplace_back(c, c);
    for (double c : k2) cand.emplace_back(c, c);
  }
  if (cand.empty()) cand.emplace_back(0.0, 0.0);
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end()), cand.end());

  for (int t = 0; t < instance.periods; ++t) {
    require_bounded_dual(instance, t);
    std::vector<double> val;
    val.reserve(cand.size());
    for (const auto& [c1, c2] : cand) val.push_back(period_dual(instance, t, c1, c2));
    const double best = *std::max_element(val.begin(), val.end());
    std::size_t k = 0;
    while (val[k] < best - kTolTie) ++k;
    out.prices(0, t) = cand[k].first;
    if (instance.two_node()) out.prices(1, t) = cand[k].second;
  }
  return out;
}

PriceSystem marginal_price(const MarketInstance& instance, const DispatchSolution& dispatch) {
  if (!dispatch.feasible) throw InfeasibleError("marginal prices need a feasible dispatch");
  const FixedCommitmentDispatch fixed = dispatch_fixed_commitment(instance, dispatch.u_star);
  if (!fixed.feasible) throw std::logic_error("optimal commitment has no feasible continuous dispatch");

  PriceSystem out;
  out.method = PriceMethod::Marginal;
  out.prices = Eigen::MatrixXd::Zero(instance.node_count(), instance.periods);
  for (int t = 0; t < instance.periods; ++t) {
    const PriceInterval& i1 = fixed.price_interval[0][t];
    if (i1.empty(kTolTie)) throw std::logic_error("empty marginal price interval at node 1");
    const double q1 = pick_price(i1);
    out.prices(0, t) = q1;
    if (!instance.two_node()) continue;
    PriceInterval i2 = fixed.price_interval[1][t];
    switch (fixed.coupling[t]) {
      case FlowCoupling::Equal: i2 = {q1, q1}; break;
      case FlowCoupling::Node2Above: i2.lower = std::max(i2.lower, q1); break;
      case FlowCoupling::Node2Below: i2.upper = std::min(i2.upper, q1); break;
      case FlowCoupling::None: break;
    }
    if (i2.empty(kTolTie)) throw std::logic_error("empty marginal price interval at node 2");
    out.prices(1, t) = pick_price(i2);
  }

  // marginal-pricing condition: x* is the best schedule with u fixed at u*
  const auto entries = market_entries(instance);
  for (int i = 0; i < instance.producer_count(); ++i) {
    const Eigen::VectorXd sig = price_signal(entries[i], out.prices);
    const Schedule x = entry_schedule(instance, dispatch, i);
    const double at_dispatch = standalone_profit(entries[i], sig, x);
    const double restricted = standalone_best_fixed_commitment(entries[i], sig, x.u).value;
    if (std::abs(at_dispatch - restricted) > kTolMoney) {
      std::ostringstream msg;
      msg << "marginal price check failed for '" << entries[i].id << "': " << at_dispatch << " vs " << restricted;
      throw std::logic_error(msg.str());
    }
  }
  return out;
}

double duality_gap(const MarketInstance& instance) {
  const DispatchSolution sol = solve_dispatch(instance);
  if (!sol.feasible) throw InfeasibleError("duality gap of an infeasible instance");
  return sol.cost - dual_value(instance, chp_price(instance)).value;
}

}  // namespace uplift
