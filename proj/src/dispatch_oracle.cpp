// Brute-force dispatch reference. Deliberately shares no code with the
// merit-order solver: every balance-feasible grid point is generated and costed.

#include <cmath>
#include <functional>

#include "uplift/dispatch.hpp"

namespace uplift {

namespace {

std::vector<double> axis(double lo, double hi, double step, bool with_zero) {
  std::vector<double> out;
  for (double v = lo; v < hi - 1e-12; v += step) out.push_back(v);
  out.push_back(hi);
  if (with_zero && lo < 0.0 && hi > 0.0) out.push_back(0.0);
  return out;
}

// Decision variables of one period for a fixed commitment column: committed
// producers, then the flow (two-node only). Balance rows: node 1, node 2.
struct Var {
  int producer = -1;  // -1 for the flow
  double lo = 0.0, hi = 0.0;
  Eigen::Vector2d coeff;
};

void for_each_point(const MarketInstance& inst, int t, double step, const std::function<void(const PeriodPoint&)>& fn) {
  const int n = inst.producer_count();
  const int rows = inst.node_count();
  const Eigen::Vector2d demand =
      rows == 2 ? Eigen::Vector2d(inst.demand(0, t), inst.demand(1, t)) : Eigen::Vector2d(inst.demand(0, t), 0.0);

  for (unsigned long long code = 0; code < (1ULL << n); ++code) {
    Eigen::VectorXi u(n);
    std::vector<Var> vars;
    for (int i = 0; i < n; ++i) {
      u(i) = static_cast<int>((code >> i) & 1ULL);
      if (!u(i)) continue;
      const ProducerSpec& p = inst.producers[i];
      Var v{i, p.g_min, p.g_max, p.node == 1 ? Eigen::Vector2d(1, 0) : Eigen::Vector2d(0, 1)};
      vars.push_back(v);
    }
    if (rows == 2) vars.push_back(Var{-1, -inst.network.f_max, inst.network.f_max, Eigen::Vector2d(-1, 1)});

    // Choose `rows` free variables with a nonsingular balance block; the rest walk the grid.
    const int m = static_cast<int>(vars.size());
    std::vector<std::vector<int>> free_sets;
    if (rows == 1) {
      for (int a = 0; a < m; ++a) free_sets.push_back({a});
    } else {
      for (int a = 0; a < m; ++a)
        for (int b = a + 1; b < m; ++b) {
          Eigen::Matrix2d blk;
          blk << vars[a].coeff, vars[b].coeff;
          if (std::abs(blk.determinant()) > 0.5) free_sets.push_back({a, b});
        }
    }
    if (free_sets.empty()) free_sets.push_back({});  // nothing can absorb the residual

    for (const auto& free : free_sets) {
      std::vector<int> walk;
      for (int k = 0; k < m; ++k)
        if (std::find(free.begin(), free.end(), k) == free.end()) walk.push_back(k);
      std::vector<std::vector<double>> axes;
      for (int k : walk) axes.push_back(axis(vars[k].lo, vars[k].hi, step, vars[k].producer < 0));

      std::vector<std::size_t> idx(walk.size(), 0);
      Eigen::VectorXd value(m);
      while (true) {
        Eigen::Vector2d residual = demand;
        for (std::size_t j = 0; j < walk.size(); ++j) {
          value(walk[j]) = axes[j][idx[j]];
          residual -= value(walk[j]) * vars[walk[j]].coeff;
        }
        bool ok = true;
        if (free.size() == 1) {
          value(free[0]) = residual(0);
        } else if (free.size() == 2) {
          Eigen::Matrix2d blk;
          blk << vars[free[0]].coeff, vars[free[1]].coeff;
          const Eigen::Vector2d sol = blk.fullPivLu().solve(residual);
          value(free[0]) = sol(0);
          value(free[1]) = sol(1);
        } else {
          ok = residual.head(rows).cwiseAbs().maxCoeff() <= kTolBalance;
        }
        for (int k : free) ok = ok && value(k) >= vars[k].lo - kTolBalance && value(k) <= vars[k].hi + kTolBalance;
        if (ok) {
          PeriodPoint pt{u, Eigen::VectorXd::Zero(n), 0.0};
          for (int k = 0; k < m; ++k) {
            const double v = std::clamp(value(k), vars[k].lo, vars[k].hi);
            if (vars[k].producer >= 0) pt.g(vars[k].producer) = v;
            else pt.f = v;
          }
          fn(pt);
        }
        std::size_t j = 0;
        while (j < idx.size() && ++idx[j] == axes[j].size()) idx[j++] = 0;
        if (j == idx.size()) break;
      }
    }
  }
}

}  // namespace

std::vector<PeriodPoint> enumerate_period_points(const MarketInstance& instance, int period, double grid_step) {
  if (grid_step <= 0.0) throw std::invalid_argument("grid step must be positive");
  std::vector<PeriodPoint> out;
  for_each_point(instance, period, grid_step, [&](const PeriodPoint& p) { out.push_back(p); });
  return out;
}

DispatchSolution oracle_dispatch(const MarketInstance& instance, double grid_step) {
  if (grid_step <= 0.0) throw std::invalid_argument("grid step must be positive");
  const int n = instance.producer_count();
  DispatchSolution sol;
  sol.u_star = CommitmentProfile::Zero(n, instance.periods);
  sol.g_star = Eigen::MatrixXd::Zero(n, instance.periods);
  if (instance.two_node()) sol.f_star = Eigen::VectorXd::Zero(instance.periods);

  for (int t = 0; t < instance.periods; ++t) {
    double best = std::numeric_limits<double>::infinity();
    for_each_point(instance, t, grid_step, [&](const PeriodPoint& p) {
      double cost = 0.0;
      for (int i = 0; i < n; ++i) cost += instance.producers[i].a * p.g(i) + instance.producers[i].w * p.u(i);
      if (cost < best) {
        best = cost;
        sol.u_star.col(t) = p.u;
        sol.g_star.col(t) = p.g;
        if (sol.f_star) (*sol.f_star)(t) = p.f;
      }
    });
    if (!std::isfinite(best)) return DispatchSolution{};
    sol.cost += best;
  }
  sol.feasible = true;
  return sol;
}

}  // namespace uplift
