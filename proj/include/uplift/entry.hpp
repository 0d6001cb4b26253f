#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "uplift/instance.hpp"

namespace uplift {

// Tolerances shared by every module.
inline constexpr double kTolBalance = 1e-9;  // MWh
inline constexpr double kTolMoney = 1e-6;    // $
inline constexpr double kTolMatch = 1e-9;    // MWh, exact-match test on continuous coordinates
inline constexpr double kTolTie = 1e-9;      // $, equal-profit ties in argmax selection

enum class EntryKind { Producer, Ftr };

/// A schedule of one market entry: commitment and continuous value per period.
/// For a producer v is the output g; for the FTR holder v is the flow F and u == 1.
struct Schedule {
  Eigen::VectorXi u;
  Eigen::VectorXd v;
};

/// Private feasible set of one market entry (a producer or the FTR holder of
/// the 1->2 path). Per period: the offline point (producers only) or the online
/// box [lo_t, hi_t]. Standalone profit per period is (signal_t - a) v - w u.
struct EntrySet {
  EntryKind kind = EntryKind::Producer;
  std::string id;
  int node = 0;  // producer node, 0 for the FTR holder
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;
  double a = 0.0;
  double w = 0.0;

  [[nodiscard]] int periods() const { return static_cast<int>(lo.size()); }
  [[nodiscard]] bool can_go_offline() const { return kind == EntryKind::Producer; }
};

inline constexpr const char* kFtrId = "FTR";

EntrySet producer_entry(const ProducerSpec& producer, int periods);
EntrySet ftr_entry(double f_max, int periods);

/// Producers in instance order, followed by the FTR holder for two-node markets.
std::vector<EntrySet> market_entries(const MarketInstance& instance);

/// Price seen by an entry: its nodal price row, or p2 - p1 for the FTR holder.
Eigen::VectorXd price_signal(const EntrySet& entry, const Eigen::MatrixXd& prices);

inline double period_profit(const EntrySet& e, double signal, int u, double v) {
  return (signal - e.a) * v - e.w * u;
}

double standalone_profit(const EntrySet& entry, const Eigen::VectorXd& signal, const Schedule& x);

bool in_private_set(const EntrySet& entry, const Schedule& x, double tol = kTolBalance);
bool same_schedule(const Schedule& x, const Schedule& y, double tol = kTolMatch);

/// One per-period state (u, v).
struct PeriodState {
  int u = 0;
  double v = 0.0;
};

/// Tie-break order: offline before online, then smaller |v|, then smaller v.
bool preferred(const PeriodState& lhs, const PeriodState& rhs);

/// States of period t: the offline point (if allowed) and every point of
/// `points` clipped to the online box, sorted by preference, duplicates removed.
std::vector<PeriodState> period_states(const EntrySet& e, int t, std::vector<double> points);

/// Online box endpoints plus `uniform` equally spaced interior points for period t.
std::vector<double> box_grid(const EntrySet& e, int t, int uniform);

/// Calls fn(schedule) for every element of the product of per-period state lists.
template <class Fn>
void for_each_schedule(const std::vector<std::vector<PeriodState>>& states, Fn&& fn) {
  const int periods = static_cast<int>(states.size());
  for (const auto& s : states)
    if (s.empty()) return;
  std::vector<std::size_t> idx(periods, 0);
  Schedule x{Eigen::VectorXi(periods), Eigen::VectorXd(periods)};
  while (true) {
    for (int t = 0; t < periods; ++t) {
      x.u(t) = states[t][idx[t]].u;
      x.v(t) = states[t][idx[t]].v;
    }
    fn(static_cast<const Schedule&>(x));
    int t = periods - 1;
    while (t >= 0 && ++idx[t] == states[t].size()) idx[t--] = 0;
    if (t < 0) break;
  }
}

/// Unrestricted best response: per period the better of offline and the
/// profit-maximizing box endpoint.
struct StandaloneBest {
  double value = 0.0;
  Schedule argmax;
  Eigen::VectorXd per_period;
};
StandaloneBest standalone_best(const EntrySet& entry, const Eigen::VectorXd& signal);

/// Best response with the commitment pinned to `u` (marginal pricing restriction).
StandaloneBest standalone_best_fixed_commitment(const EntrySet& entry, const Eigen::VectorXd& signal,
                                                const Eigen::VectorXi& u);

}  // namespace uplift
