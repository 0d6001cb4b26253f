#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "uplift/entry.hpp"

namespace uplift {

/// Choice of the nonnegative function gamma in
///   N(x) = min[ pi+ - pi(p, x) ; delta_{x,x*} (pi+ - pi*) + gamma(x) ].
enum class GammaVariant {
  DeltaExact,       // gamma == 0: N = (pi+ - pi*) at x* only ("commitment ticket")
  DeltaCommitment,  // gamma = (delta_u - delta_x)(pi+ - pi*): N = min[A ; delta_{u,u*} (pi+ - pi*)]
  ContinuousRamp,   // per period min[A_t ; U_t r_t(v)] with a linear ramp r_t, no jump at x*
};

struct GammaChoice {
  GammaVariant variant = GammaVariant::ContinuousRamp;
  /// ContinuousRamp only: distance from x* at which the ramp reaches zero.
  /// Defaults to the distance to the box bound the ramp points at.
  std::optional<double> ramp_width;
};

const char* to_string(GammaVariant v);
std::optional<GammaVariant> parse_gamma(const std::string& name);

/// Redundant-constraint component N of one market entry, built against a fixed
/// price system p. A(x) = pi+ - pi(p, x) >= 0 is the profit shortfall at x.
struct FamilyComponent {
  EntrySet set;
  GammaVariant variant = GammaVariant::ContinuousRamp;
  double scale = 1.0;  // N is multiplied by this factor
  Schedule x_star;
  Eigen::VectorXd signal;  // entry price signal at p
  double pi_plus = 0.0;
  double pi_star = 0.0;
  Eigen::VectorXd period_plus;
  Eigen::VectorXd period_star;
  // ContinuousRamp: r_t(v) = clamp((bound - v) / (bound - anchor), 0, 1) when ramp_active(t), else 1.
  Eigen::VectorXd ramp_anchor;
  Eigen::VectorXd ramp_bound;
  Eigen::Array<bool, Eigen::Dynamic, 1> ramp_active;
  std::vector<std::vector<double>> kinks;  // per period, breakpoints of N in v

  [[nodiscard]] double uplift() const { return pi_plus - pi_star; }
  [[nodiscard]] const std::string& id() const { return set.id; }
};

struct RedundantFamily {
  GammaChoice gamma;
  Eigen::MatrixXd price;                    // (node x period) prices the family was built at
  std::vector<FamilyComponent> components;  // aligned with market_entries()

  [[nodiscard]] const FamilyComponent& component(const std::string& id) const;
  [[nodiscard]] FamilyComponent& component(const std::string& id);
};

/// Value of N at x (x assumed inside the entry's private set).
double evaluate(const FamilyComponent& c, const Schedule& x);

/// Value of N at x for entry `id`; throws std::domain_error when x lies outside the private set.
double evaluate_component(const RedundantFamily& family, const std::string& id, const Schedule& x);

/// Builds the component of one entry from its schedule at the dispatch point.
FamilyComponent make_component(const EntrySet& set, const Eigen::VectorXd& signal, const Schedule& x_star,
                               const GammaChoice& gamma);

/// max over the private set of pi(q, x) + nu * N(x), solved exactly from the
/// component's structure (standalone profit when c is null or nu * scale == 0).
struct EntryOptimum {
  double value = 0.0;
  Schedule argmax;
  Eigen::VectorXd per_period;  // standalone profit per period at the argmax
  double nu_term = 0.0;        // nu * N(argmax)
};
EntryOptimum maximize_entry(const EntrySet& set, const Eigen::VectorXd& q_signal, double nu, const FamilyComponent* c);

}  // namespace uplift
