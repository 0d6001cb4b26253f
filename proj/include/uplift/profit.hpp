#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "uplift/dispatch.hpp"
#include "uplift/entry.hpp"
#include "uplift/family.hpp"
#include "uplift/instance.hpp"
#include "uplift/price_system.hpp"

namespace uplift {

struct BestResponseOptions {
  /// Cross-check the analytic maximum against a uniform grid when a family
  /// component is attached; a grid point beating it throws std::logic_error.
  bool grid_guard = true;
};

/// Maximum of pi(q, x) + nu N(x) over the private set and one maximizer.
/// Ties prefer offline, then smaller output, then zero flow.
struct BestResponse {
  double profit_plus = 0.0;
  Schedule argmax;
  Eigen::VectorXd per_period;  // standalone profit per period at the argmax
  double nu_term = 0.0;        // nu * N(argmax)
};

BestResponse entry_best_response(const EntrySet& entry, const Eigen::VectorXd& signal, double nu,
                                 const FamilyComponent* component, const BestResponseOptions& opts = {});

BestResponse best_response(const ProducerSpec& producer, const Eigen::VectorXd& price, double nu = 0.0,
                           const FamilyComponent* component = nullptr, const BestResponseOptions& opts = {});

/// FTR holder of the 1->2 path: profit (p2 - p1)^T F over |F| <= f_max.
BestResponse ftr_best_response(const Eigen::VectorXd& p1, const Eigen::VectorXd& p2, double f_max, double nu = 0.0,
                               const FamilyComponent* component = nullptr, const BestResponseOptions& opts = {});

/// pi(q, x*) + nu N(x*) for market entry k (producers, then the FTR holder).
double profit_at_dispatch(const MarketInstance& instance, const DispatchSolution& dispatch, int k,
                          const Eigen::MatrixXd& price, double nu = 0.0, const FamilyComponent* component = nullptr);

struct ProfitEntry {
  std::string id;
  EntryKind kind = EntryKind::Producer;
  double profit_star = 0.0;
  double profit_plus = 0.0;
  double uplift = 0.0;
};

struct ProfitReport {
  double nu = 0.0;
  std::vector<ProfitEntry> entries;
  double total_star = 0.0;
  double total_plus = 0.0;
  double total_uplift = 0.0;
  double f_star = 0.0;
  double dual_value = 0.0;
  double nu_sum_at_dispatch = 0.0;  // nu * sum_k N_k(x*)
  double duality_gap_check = 0.0;   // f* - dual - nu * sum_k N_k(x*), equals total_uplift
};

/// Per-entry lost profit at the given prices. Throws std::logic_error if the
/// total differs from f* - dual - nu sum N(x*) by more than kTolMoney.
ProfitReport uplift_report(const MarketInstance& instance, const DispatchSolution& dispatch, const PriceSystem& price,
                           double nu = 0.0, const RedundantFamily* family = nullptr,
                           const BestResponseOptions& opts = {});

}  // namespace uplift
