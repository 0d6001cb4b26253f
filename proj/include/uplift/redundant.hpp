#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "uplift/dispatch.hpp"
#include "uplift/family.hpp"
#include "uplift/instance.hpp"
#include "uplift/price_system.hpp"
#include "uplift/profit.hpp"

namespace uplift {

/// One component N_k per market entry, built at `price` around the dispatch point.
RedundantFamily build_family(const MarketInstance& instance, const DispatchSolution& dispatch,
                             const PriceSystem& price, const GammaChoice& gamma);

/// Same family with every component multiplied by `factor` (0 gives the all-zero family).
RedundantFamily scale_family(RedundantFamily family, double factor);

/// An arbitrary function on one entry's private set, with declared breakpoints
/// in v per period used when it is minimized or maximized on a grid.
struct EvaluableComponent {
  EntrySet set;
  std::function<double(const Schedule&)> fn;
  std::vector<std::vector<double>> kinks;
};

EvaluableComponent as_evaluable(const FamilyComponent& c);

/// |K| additional constraints h^k(x) = sum_i h_i^k(x_i) <= 0, priced at sigma+ >= 0.
struct ConstraintFamilySpec {
  std::vector<std::vector<EvaluableComponent>> h;  // h[i][k]
  Eigen::VectorXd sigma_plus;
};

struct AggregatedConstraint {
  std::vector<EvaluableComponent> aggregate;    // sigma+ . h_i(x_i)  (single constraint sum_i <= 0)
  std::vector<EvaluableComponent> profit_term;  // -sigma+ . h_i(x_i), enters profit with nu = 1
};

/// Replaces the |K| constraints by the single sigma+-weighted one. Throws
/// std::invalid_argument on a negative sigma entry or ragged input.
AggregatedConstraint aggregate_constraints(const ConstraintFamilySpec& spec);

struct ComponentExtremum {
  double value = 0.0;
  Schedule at;
};

/// Grid minimum / maximum over the private set: every commitment profile times,
/// per period, box endpoints, declared kinks and `uniform` interior points.
ComponentExtremum minimize_component(const EvaluableComponent& c, int uniform = 101);
ComponentExtremum maximize_component(const EvaluableComponent& c, int uniform = 101);

struct Rearrangement {
  std::vector<EvaluableComponent> components;  // N~_i = N_i + shift_i
  Eigen::VectorXd minima;                      // min over X_i of N_i
  Eigen::VectorXd shift;
};

class RearrangementError : public std::runtime_error {
 public:
  RearrangementError(const std::string& what, Eigen::VectorXd minima, std::vector<Schedule> witnesses)
      : std::runtime_error(what), minima_(std::move(minima)), witnesses_(std::move(witnesses)) {}
  [[nodiscard]] const Eigen::VectorXd& minima() const { return minima_; }
  [[nodiscard]] const std::vector<Schedule>& witnesses() const { return witnesses_; }

 private:
  Eigen::VectorXd minima_;
  std::vector<Schedule> witnesses_;
};

/// Shifts constants between components so each is nonnegative on its own set
/// while the sum is unchanged. Requires sum_i min N_i >= 0.
Rearrangement rearrange_nonnegative(const std::vector<EvaluableComponent>& components);

struct ConditionCheck {
  bool pass = false;
  double value = 0.0;     // observed
  double expected = 0.0;  // reference (pi+ or uplift; 0 for nonnegativity)
  Schedule witness;
};

struct EntryVerification {
  std::string id;
  ConditionCheck max_profit;   // max [pi(p,x) + N(x)] == pi+
  ConditionCheck at_dispatch;  // pi(p,x*) + N(x*) == pi+
  ConditionCheck nonnegative;  // min N >= 0
};

struct VerificationReport {
  std::vector<EntryVerification> entries;
  bool redundant_on_product = false;  // sum_k min N_k >= 0
  double product_min_sum = 0.0;
  bool redundant_on_feasible_set = false;  // sum_k N_k >= 0 on sampled dispatch-feasible points
  double feasible_min_sum = 0.0;
  std::size_t feasible_samples = 0;

  [[nodiscard]] bool pass() const;
};

/// Checks the three sufficient conditions for zero uplift at nu = 1 on a
/// kink-aware grid, plus redundancy of sum N >= 0. `grid_step` sets the grid
/// used to sample dispatch-feasible points.
VerificationReport verify_proposition(const RedundantFamily& family, const MarketInstance& instance,
                                      const DispatchSolution& dispatch, const PriceSystem& price, double grid_step);

struct NuPoint {
  double nu = 0.0;
  double total_uplift = 0.0;
  double dual_value = 0.0;
};

struct NuAnalysis {
  double nu_max = 0.0;
  bool cap_reached = false;
  double dual_at_zero = 0.0;
  std::vector<NuPoint> curve;
  bool gap_invariant = false;  // dual at nu = 1 equals dual at nu = 0
};

inline constexpr double kNuCap = 64.0;
inline constexpr double kNuResolution = 1e-6;

/// Largest nu keeping the dual at its nu = 0 value (bisection on [0, 64]) and
/// the uplift/dual curve on `nu_grid`.
NuAnalysis nu_analysis(const MarketInstance& instance, const DispatchSolution& dispatch, const PriceSystem& price,
                       const RedundantFamily& family, const std::vector<double>& nu_grid);

}  // namespace uplift
