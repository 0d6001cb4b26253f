#include "uplift/entry.hpp"

#include <algorithm>
#include <cmath>

namespace uplift {

EntrySet producer_entry(const ProducerSpec& producer, int periods) {
  EntrySet e;
  e.kind = EntryKind::Producer;
  e.id = producer.id;
  e.node = producer.node;
  e.lo = Eigen::VectorXd::Constant(periods, producer.g_min);
  e.hi = Eigen::VectorXd::Constant(periods, producer.g_max);
  e.a = producer.a;
  e.w = producer.w;
  return e;
}

EntrySet ftr_entry(double f_max, int periods) {
  EntrySet e;
  e.kind = EntryKind::Ftr;
  e.id = kFtrId;
  e.lo = Eigen::VectorXd::Constant(periods, -f_max);
  e.hi = Eigen::VectorXd::Constant(periods, f_max);
  return e;
}

std::vector<EntrySet> market_entries(const MarketInstance& instance) {
  std::vector<EntrySet> out;
  out.reserve(instance.producers.size() + 1);
  for (const auto& p : instance.producers) out.push_back(producer_entry(p, instance.periods));
  if (instance.two_node()) out.push_back(ftr_entry(instance.network.f_max, instance.periods));
  return out;
}

Eigen::VectorXd price_signal(const EntrySet& entry, const Eigen::MatrixXd& prices) {
  if (entry.kind == EntryKind::Ftr) {
    if (prices.rows() != 2) throw std::invalid_argument("FTR price signal needs two nodal price rows");
    return (prices.row(1) - prices.row(0)).transpose();
  }
  if (entry.node < 1 || entry.node > prices.rows())
    throw std::invalid_argument("price system has no row for node " + std::to_string(entry.node));
  return prices.row(entry.node - 1).transpose();
}

double standalone_profit(const EntrySet& entry, const Eigen::VectorXd& signal, const Schedule& x) {
  double total = 0.0;
  for (int t = 0; t < entry.periods(); ++t) total += period_profit(entry, signal(t), x.u(t), x.v(t));
  return total;
}

bool in_private_set(const EntrySet& entry, const Schedule& x, double tol) {
  if (x.u.size() != entry.periods() || x.v.size() != entry.periods()) return false;
  for (int t = 0; t < entry.periods(); ++t) {
    if (x.u(t) != 0 && x.u(t) != 1) return false;
    if (x.u(t) == 0) {
      if (!entry.can_go_offline() || std::abs(x.v(t)) > tol) return false;
    } else if (x.v(t) < entry.lo(t) - tol || x.v(t) > entry.hi(t) + tol) {
      return false;
    }
  }
  return true;
}

bool same_schedule(const Schedule& x, const Schedule& y, double tol) {
  if (x.u.size() != y.u.size()) return false;
  return x.u == y.u && ((x.v - y.v).array().abs() <= tol).all();
}

bool preferred(const PeriodState& lhs, const PeriodState& rhs) {
  if (lhs.u != rhs.u) return lhs.u < rhs.u;
  const double al = std::abs(lhs.v), ar = std::abs(rhs.v);
  if (al != ar) return al < ar;
  return lhs.v < rhs.v;
}

std::vector<PeriodState> period_states(const EntrySet& e, int t, std::vector<double> points) {
  std::vector<PeriodState> out;
  if (e.can_go_offline()) out.push_back({0, 0.0});
  for (double v : points) {
    if (!std::isfinite(v) || v < e.lo(t) - kTolMatch || v > e.hi(t) + kTolMatch) continue;
    out.push_back({1, std::clamp(v, e.lo(t), e.hi(t))});
  }
  std::sort(out.begin(), out.end(), preferred);
  out.erase(std::unique(out.begin(), out.end(),
                        [](const PeriodState& l, const PeriodState& r) {
                          return l.u == r.u && std::abs(l.v - r.v) <= kTolMatch;
                        }),
            out.end());
  return out;
}

std::vector<double> box_grid(const EntrySet& e, int t, int uniform) {
  std::vector<double> pts{e.lo(t), e.hi(t)};
  const double width = e.hi(t) - e.lo(t);
  for (int k = 1; k <= uniform; ++k) pts.push_back(e.lo(t) + width * k / (uniform + 1));
  return pts;
}

namespace {

StandaloneBest best_over_states(const EntrySet& entry, const Eigen::VectorXd& signal,
                                const std::vector<std::vector<PeriodState>>& states) {
  const int periods = entry.periods();
  StandaloneBest out;
  out.argmax = Schedule{Eigen::VectorXi::Zero(periods), Eigen::VectorXd::Zero(periods)};
  out.per_period = Eigen::VectorXd::Zero(periods);
  for (int t = 0; t < periods; ++t) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& s : states[t]) best = std::max(best, period_profit(entry, signal(t), s.u, s.v));
    for (const auto& s : states[t]) {
      const double val = period_profit(entry, signal(t), s.u, s.v);
      if (val >= best - kTolTie) {
        out.argmax.u(t) = s.u;
        out.argmax.v(t) = s.v;
        out.per_period(t) = val;
        break;
      }
    }
  }
  out.value = out.per_period.sum();
  return out;
}

}  // namespace

StandaloneBest standalone_best(const EntrySet& entry, const Eigen::VectorXd& signal) {
  std::vector<std::vector<PeriodState>> states;
  for (int t = 0; t < entry.periods(); ++t) {
    std::vector<double> pts{entry.lo(t), entry.hi(t)};
    if (entry.lo(t) <= 0.0 && entry.hi(t) >= 0.0) pts.push_back(0.0);
    states.push_back(period_states(entry, t, pts));
  }
  return best_over_states(entry, signal, states);
}

StandaloneBest standalone_best_fixed_commitment(const EntrySet& entry, const Eigen::VectorXd& signal,
                                                const Eigen::VectorXi& u) {
  std::vector<std::vector<PeriodState>> states;
  for (int t = 0; t < entry.periods(); ++t) {
    if (u(t) == 0) {
      states.push_back({PeriodState{0, 0.0}});
      continue;
    }
    std::vector<double> pts{entry.lo(t), entry.hi(t)};
    if (entry.lo(t) <= 0.0 && entry.hi(t) >= 0.0) pts.push_back(0.0);
    auto all = period_states(entry, t, pts);
    std::erase_if(all, [](const PeriodState& s) { return s.u == 0; });
    states.push_back(std::move(all));
  }
  return best_over_states(entry, signal, states);
}

}  // namespace uplift
