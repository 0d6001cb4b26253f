#pragma once

#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "uplift/entry.hpp"
#include "uplift/instance.hpp"

namespace uplift {

/// Binary commitment matrix, (producer x period).
using CommitmentProfile = Eigen::MatrixXi;

struct DispatchSolution {
  bool feasible = false;
  CommitmentProfile u_star;
  Eigen::MatrixXd g_star;                 // (producer x period)
  std::optional<Eigen::VectorXd> f_star;  // per period, two-node only
  double cost = 0.0;                      // f*
};

class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Closed price interval; either end may be infinite.
struct PriceInterval {
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();

  [[nodiscard]] bool empty(double tol = 0.0) const { return lower > upper + tol; }
  [[nodiscard]] bool contains(double q, double tol = 0.0) const {
    return q >= lower - tol && q <= upper + tol;
  }
};

/// How the flow of a period couples the two nodal prices under fixed commitment.
enum class FlowCoupling {
  None,        // uninode, or F_max == 0
  Equal,       // flow strictly inside its box: p1 == p2
  Node2Above,  // flow at +F_max: p2 >= p1
  Node2Below,  // flow at -F_max: p2 <= p1
};

struct FixedCommitmentDispatch {
  bool feasible = false;
  Eigen::MatrixXd g;                 // (producer x period)
  std::optional<Eigen::VectorXd> f;  // two-node only
  double cost = 0.0;
  /// (node x period) intervals of balance prices under which every committed
  /// producer's output is optimal with its commitment fixed. For two-node
  /// markets these are projections of the joint set that also honors `coupling`.
  std::vector<std::vector<PriceInterval>> price_interval;
  std::vector<FlowCoupling> coupling;  // per period
};

/// Optimal continuous dispatch for a fixed commitment: merit order inside each
/// node; for two nodes the flow is chosen among the breakpoints of the convex
/// piecewise-linear cost in F.
FixedCommitmentDispatch dispatch_fixed_commitment(const MarketInstance& instance, const CommitmentProfile& u);

/// Globally optimal dispatch by commitment enumeration. Ties between equal-cost
/// commitments go to the lexicographically smallest matrix (row-major by producer).
DispatchSolution solve_dispatch(const MarketInstance& instance);

/// Brute-force reference: all commitment columns times an output/flow grid of
/// the given step. For tests on small instances only.
DispatchSolution oracle_dispatch(const MarketInstance& instance, double grid_step);

/// Balance-feasible points of one period on a grid of the given step.
struct PeriodPoint {
  Eigen::VectorXi u;  // per producer
  Eigen::VectorXd g;  // per producer
  double f = 0.0;
};
std::vector<PeriodPoint> enumerate_period_points(const MarketInstance& instance, int period, double grid_step);

/// Total offer cost sum_i sum_t (a_i g + w_i u).
double dispatch_cost(const MarketInstance& instance, const CommitmentProfile& u, const Eigen::MatrixXd& g);

/// Checks boxes, balance (to kTolBalance), flow limits and the stored cost (to kTolMoney).
std::vector<std::string> check_dispatch(const MarketInstance& instance, const DispatchSolution& sol);

/// Schedule of market entry k (see market_entries) at the dispatch point.
Schedule entry_schedule(const MarketInstance& instance, const DispatchSolution& sol, int k);

}  // namespace uplift
