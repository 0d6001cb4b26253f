#pragma once

#include <vector>

#include <Eigen/Dense>

#include "uplift/dispatch.hpp"
#include "uplift/family.hpp"
#include "uplift/instance.hpp"
#include "uplift/price_system.hpp"
#include "uplift/profit.hpp"

namespace uplift {

/// Relaxed Lagrangian minimum at prices q:
///   q.d - sum_k max_x [pi_k(q, x) + nu N_k(x)]
/// over producers and (two-node) the FTR holder.
struct DualEvaluation {
  double value = 0.0;
  std::vector<BestResponse> responses;  // aligned with market_entries()
};

DualEvaluation dual_value(const MarketInstance& instance, const PriceSystem& q, double nu = 0.0,
                          const RedundantFamily* family = nullptr, const BestResponseOptions& opts = {});

/// Maximizer of the dual over prices by exact enumeration of the kink
/// candidates of each period; ties go to the lexicographically smallest price.
/// Throws InfeasibleError when the dual is unbounded.
PriceSystem chp_price(const MarketInstance& instance);

/// Balance shadow prices of the fixed-commitment dispatch at u*. Picks the
/// lower end of each price interval (upper end if the lower is unbounded, 0 if
/// both are). Verifies the marginal-pricing condition for every producer.
PriceSystem marginal_price(const MarketInstance& instance, const DispatchSolution& dispatch);

/// f* minus the dual value at CHP prices. Throws InfeasibleError.
double duality_gap(const MarketInstance& instance);

}  // namespace uplift
