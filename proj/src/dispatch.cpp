#include "uplift/dispatch.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace uplift {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Committed units of one node in merit order (a, then producer index).
struct NodeStack {
  std::vector<int> order;
  double lo = 0.0;  // sum of g_min
  double hi = 0.0;  // sum of g_max
};

NodeStack node_stack(const MarketInstance& inst, int node, const Eigen::VectorXi& u_col) {
  NodeStack s;
  for (int i = 0; i < inst.producer_count(); ++i) {
    if (u_col(i) == 1 && inst.producers[i].node == node) {
      s.order.push_back(i);
      s.lo += inst.producers[i].g_min;
      s.hi += inst.producers[i].g_max;
    }
  }
  std::stable_sort(s.order.begin(), s.order.end(),
                   [&](int l, int r) { return inst.producers[l].a < inst.producers[r].a; });
  return s;
}

// Merit-order allocation of `total` over the stack; writes g and returns the
// variable plus commitment cost of the node.
double allocate(const MarketInstance& inst, const NodeStack& s, double total, Eigen::VectorXd& g) {
  double residual = std::clamp(total - s.lo, 0.0, s.hi - s.lo);
  double cost = 0.0;
  for (int i : s.order) {
    const ProducerSpec& p = inst.producers[i];
    const double extra = std::min(residual, p.g_max - p.g_min);
    g(i) = p.g_min + extra;
    residual -= extra;
    cost += p.a * g(i) + p.w;
  }
  return cost;
}

double allocation_cost(const MarketInstance& inst, const NodeStack& s, double total) {
  Eigen::VectorXd scratch = Eigen::VectorXd::Zero(inst.producer_count());
  return allocate(inst, s, total, scratch);
}

// Breakpoints of the node cost as a function of its total output.
std::vector<double> stack_breakpoints(const MarketInstance& inst, const NodeStack& s) {
  std::vector<double> out{s.lo};
  double level = s.lo;
  for (int i : s.order) {
    level += inst.producers[i].g_max - inst.producers[i].g_min;
    out.push_back(level);
  }
  return out;
}

PriceInterval node_interval(const MarketInstance& inst, const NodeStack& s, const Eigen::VectorXd& g) {
  PriceInterval iv;
  for (int i : s.order) {
    const ProducerSpec& p = inst.producers[i];
    if (p.g_max - p.g_min <= kTolBalance) continue;
    if (g(i) > p.g_min + kTolBalance) iv.lower = std::max(iv.lower, p.a);
    if (g(i) < p.g_max - kTolBalance) iv.upper = std::min(iv.upper, p.a);
  }
  return iv;
}

PriceInterval intersect(PriceInterval a, const PriceInterval& b) {
  a.lower = std::max(a.lower, b.lower);
  a.upper = std::min(a.upper, b.upper);
  return a;
}

struct PeriodDispatch {
  bool feasible = false;
  Eigen::VectorXd g;
  double f = 0.0;
  double cost = 0.0;
  std::vector<PriceInterval> interval;
  FlowCoupling coupling = FlowCoupling::None;
};

PeriodDispatch dispatch_period(const MarketInstance& inst, int t, const Eigen::VectorXi& u_col) {
  PeriodDispatch out;
  out.g = Eigen::VectorXd::Zero(inst.producer_count());

  if (!inst.two_node()) {
    const NodeStack s = node_stack(inst, 1, u_col);
    const double d = inst.demand(0, t);
    if (d < s.lo - kTolBalance || d > s.hi + kTolBalance) return out;
    out.feasible = true;
    out.cost = allocate(inst, s, d, out.g);
    out.interval = {node_interval(inst, s, out.g)};
    return out;
  }

  const NodeStack s1 = node_stack(inst, 1, u_col);
  const NodeStack s2 = node_stack(inst, 2, u_col);
  const double d1 = inst.demand(0, t), d2 = inst.demand(1, t), fmax = inst.network.f_max;
  // node 1 produces d1 + F, node 2 produces d2 - F
  const double f_lo = std::max({-fmax, s1.lo - d1, d2 - s2.hi});
  const double f_hi = std::min({fmax, s1.hi - d1, d2 - s2.lo});
  if (f_lo > f_hi + kTolBalance) return out;

  std::vector<double> cand{f_lo, f_hi, 0.0};
  for (double b : stack_breakpoints(inst, s1)) cand.push_back(b - d1);
  for (double b : stack_breakpoints(inst, s2)) cand.push_back(d2 - b);
  std::erase_if(cand, [&](double f) { return f < f_lo - kTolBalance || f > f_hi + kTolBalance; });
  for (double& f : cand) f = std::clamp(f, std::min(f_lo, f_hi), std::max(f_lo, f_hi));
  std::sort(cand.begin(), cand.end(), [](double l, double r) {
    return std::abs(l) != std::abs(r) ? std::abs(l) < std::abs(r) : l < r;
  });

  std::vector<double> costs;
  for (double f : cand) costs.push_back(allocation_cost(inst, s1, d1 + f) + allocation_cost(inst, s2, d2 - f));
  const double best = *std::min_element(costs.begin(), costs.end());
  std::size_t pick = 0;
  while (costs[pick] > best + kTolTie) ++pick;

  out.feasible = true;
  out.f = cand[pick];
  out.cost = allocate(inst, s1, d1 + out.f, out.g) + allocate(inst, s2, d2 - out.f, out.g);

  const PriceInterval i1 = node_interval(inst, s1, out.g);
  const PriceInterval i2 = node_interval(inst, s2, out.g);
  if (fmax <= kTolBalance) {
    out.coupling = FlowCoupling::None;
    out.interval = {i1, i2};
  } else if (out.f >= fmax - kTolBalance) {
    out.coupling = FlowCoupling::Node2Above;
    out.interval = {intersect(i1, {-kInf, i2.upper}), intersect(i2, {i1.lower, kInf})};
  } else if (out.f <= -fmax + kTolBalance) {
    out.coupling = FlowCoupling::Node2Below;
    out.interval = {intersect(i1, {i2.lower, kInf}), intersect(i2, {-kInf, i1.upper})};
  } else {
    out.coupling = FlowCoupling::Equal;
    const PriceInterval both = intersect(i1, i2);
    out.interval = {both, both};
  }
  return out;
}

Eigen::VectorXi column_bits(unsigned long long code, int n) {
  // producer 0 is the most significant bit so ascending codes are lexicographic
  Eigen::VectorXi col(n);
  for (int i = 0; i < n; ++i) col(i) = static_cast<int>((code >> (n - 1 - i)) & 1ULL);
  return col;
}

}  // namespace

FixedCommitmentDispatch dispatch_fixed_commitment(const MarketInstance& instance, const CommitmentProfile& u) {
  if (u.rows() != instance.producer_count() || u.cols() != instance.periods)
    throw std::invalid_argument("commitment profile shape does not match instance");
  FixedCommitmentDispatch out;
  out.g = Eigen::MatrixXd::Zero(instance.producer_count(), instance.periods);
  if (instance.two_node()) out.f = Eigen::VectorXd::Zero(instance.periods);
  out.price_interval.assign(instance.node_count(), std::vector<PriceInterval>(instance.periods));
  out.coupling.assign(instance.periods, FlowCoupling::None);

  for (int t = 0; t < instance.periods; ++t) {
    const PeriodDispatch pd = dispatch_period(instance, t, u.col(t));
    if (!pd.feasible) {
      out = FixedCommitmentDispatch{};
      return out;
    }
    out.g.col(t) = pd.g;
    if (out.f) (*out.f)(t) = pd.f;
    out.cost += pd.cost;
    for (int k = 0; k < instance.node_count(); ++k) out.price_interval[k][t] = pd.interval[k];
    out.coupling[t] = pd.coupling;
  }
  out.feasible = true;
  return out;
}

DispatchSolution solve_dispatch(const MarketInstance& instance) {
  const int n = instance.producer_count();
  if (n > 24) throw std::invalid_argument("commitment enumeration supports at most 24 producers");

  DispatchSolution sol;
  sol.u_star = CommitmentProfile::Zero(n, instance.periods);
  sol.g_star = Eigen::MatrixXd::Zero(n, instance.periods);
  if (instance.two_node()) sol.f_star = Eigen::VectorXd::Zero(instance.periods);

  // Cost and constraints separate by period, so the lexicographically smallest
  // optimal matrix is assembled from the smallest optimal column of each period.
  for (int t = 0; t < instance.periods; ++t) {
    bool found = false;
    PeriodDispatch best;
    Eigen::VectorXi best_col;
    for (unsigned long long code = 0; code < (1ULL << n); ++code) {
      const Eigen::VectorXi col = column_bits(code, n);
      PeriodDispatch pd = dispatch_period(instance, t, col);
      if (!pd.feasible) continue;
      if (!found || pd.cost < best.cost - kTolTie) {
        found = true;
        best = std::move(pd);
        best_col = col;
      }
    }
    if (!found) {
      DispatchSolution infeasible;
      infeasible.feasible = false;
      return infeasible;
    }
    sol.u_star.col(t) = best_col;
    sol.g_star.col(t) = best.g;
    if (sol.f_star) (*sol.f_star)(t) = best.f;
  }
  sol.feasible = true;
  sol.cost = dispatch_cost(instance, sol.u_star, sol.g_star);
  return sol;
}

double dispatch_cost(const MarketInstance& instance, const CommitmentProfile& u, const Eigen::MatrixXd& g) {
  double total = 0.0;
  for (int i = 0; i < instance.producer_count(); ++i) {
    const ProducerSpec& p = instance.producers[i];
    total += p.a * g.row(i).sum() + p.w * u.row(i).sum();
  }
  return total;
}

std::vector<std::string> check_dispatch(const MarketInstance& instance, const DispatchSolution& sol) {
  std::vector<std::string> issues;
  if (!sol.feasible) return issues;
  const int n = instance.producer_count();
  if (sol.u_star.rows() != n || sol.u_star.cols() != instance.periods || sol.g_star.rows() != n ||
      sol.g_star.cols() != instance.periods) {
    issues.push_back("shape mismatch");
    return issues;
  }
  for (int i = 0; i < n; ++i) {
    const ProducerSpec& p = instance.producers[i];
    for (int t = 0; t < instance.periods; ++t) {
      const int u = sol.u_star(i, t);
      const double g = sol.g_star(i, t);
      if (u != 0 && u != 1) issues.push_back(p.id + ": non-binary commitment");
      if (g < u * p.g_min - kTolBalance || g > u * p.g_max + kTolBalance)
        issues.push_back(p.id + ": output outside gated box in period " + std::to_string(t));
    }
  }
  for (int t = 0; t < instance.periods; ++t) {
    if (!instance.two_node()) {
      if (std::abs(sol.g_star.col(t).sum() - instance.demand(0, t)) > kTolBalance)
        issues.push_back("balance violated in period " + std::to_string(t));
      continue;
    }
    if (!sol.f_star) {
      issues.push_back("missing flow for two-node market");
      break;
    }
    double g1 = 0.0, g2 = 0.0;
    for (int i = 0; i < n; ++i) (instance.producers[i].node == 1 ? g1 : g2) += sol.g_star(i, t);
    const double f = (*sol.f_star)(t);
    if (std::abs(g1 - instance.demand(0, t) - f) > kTolBalance)
      issues.push_back("node 1 balance violated in period " + std::to_string(t));
    if (std::abs(g2 + f - instance.demand(1, t)) > kTolBalance)
      issues.push_back("node 2 balance violated in period " + std::to_string(t));
    if (std::abs(f) > instance.network.f_max + kTolBalance)
      issues.push_back("flow limit violated in period " + std::to_string(t));
  }
  if (std::abs(dispatch_cost(instance, sol.u_star, sol.g_star) - sol.cost) > kTolMoney)
    issues.push_back("stored cost does not match recomputed cost");
  return issues;
}

Schedule entry_schedule(const MarketInstance& instance, const DispatchSolution& sol, int k) {
  if (!sol.feasible) throw InfeasibleError("no dispatch schedule for an infeasible instance");
  if (k < instance.producer_count())
    return Schedule{sol.u_star.row(k).transpose(), sol.g_star.row(k).transpose()};
  if (!instance.two_node() || k != instance.producer_count() || !sol.f_star)
    throw std::out_of_range("market entry index out of range");
  return Schedule{Eigen::VectorXi::Ones(instance.periods), *sol.f_star};
}

}  // namespace uplift
