#include "uplift/family.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace uplift {

const char* to_string(GammaVariant v) {
  switch (v) {
    case GammaVariant::DeltaExact: return "delta-exact";
    case GammaVariant::DeltaCommitment: return "delta-commitment";
    case GammaVariant::ContinuousRamp: return "continuous-ramp";
  }
  return "?";
}

std::optional<GammaVariant> parse_gamma(const std::string& name) {
  if (name == "delta-exact") return GammaVariant::DeltaExact;
  if (name == "delta-commitment") return GammaVariant::DeltaCommitment;
  if (name == "continuous-ramp") return GammaVariant::ContinuousRamp;
  return std::nullopt;
}

const FamilyComponent& RedundantFamily::component(const std::string& id) const {
  for (const auto& c : components)
    if (c.id() == id) return c;
  throw std::out_of_range("family has no component for entry '" + id + "'");
}

FamilyComponent& RedundantFamily::component(const std::string& id) {
  return const_cast<FamilyComponent&>(std::as_const(*this).component(id));
}

namespace {

constexpr int kMaxCoupledPeriods = 16;

double ramp(const FamilyComponent& c, int t, double v) {
  if (!c.ramp_active(t)) return 1.0;
  return std::clamp((c.ramp_bound(t) - v) / (c.ramp_bound(t) - c.ramp_anchor(t)), 0.0, 1.0);
}

double period_uplift(const FamilyComponent& c, int t) { return c.period_plus(t) - c.period_star(t); }

// Per-period term of the ramp variant: min[A_t ; U_t r_t(v)].
double ramp_term(const FamilyComponent& c, int t, int u, double v) {
  const double shortfall = c.period_plus(t) - period_profit(c.set, c.signal(t), u, v);
  return std::min(shortfall, period_uplift(c, t) * ramp(c, t, v));
}

double unscaled(const FamilyComponent& c, const Schedule& x) {
  switch (c.variant) {
    case GammaVariant::DeltaExact: {
      const double shortfall = c.pi_plus - standalone_profit(c.set, c.signal, x);
      return std::min(shortfall, same_schedule(x, c.x_star) ? c.uplift() : 0.0);
    }
    case GammaVariant::DeltaCommitment: {
      const double shortfall = c.pi_plus - standalone_profit(c.set, c.signal, x);
      return std::min(shortfall, x.u == c.x_star.u ? c.uplift() : 0.0);
    }
    case GammaVariant::ContinuousRamp: {
      double total = 0.0;
      for (int t = 0; t < c.set.periods(); ++t) total += ramp_term(c, t, x.u(t), x.v(t));
      return total;
    }
  }
  return 0.0;
}

EntryOptimum from_standalone(StandaloneBest best) {
  return EntryOptimum{best.value, std::move(best.argmax), std::move(best.per_period), 0.0};
}

EntryOptimum assemble(const EntrySet& set, const Eigen::VectorXd& q, double nu, const FamilyComponent& c,
                      Schedule x) {
  EntryOptimum out;
  out.per_period.resize(set.periods());
  for (int t = 0; t < set.periods(); ++t) out.per_period(t) = period_profit(set, q(t), x.u(t), x.v(t));
  out.nu_term = nu * evaluate(c, x);
  out.value = out.per_period.sum() + out.nu_term;
  out.argmax = std::move(x);
  return out;
}

// First candidate (in list order) whose value is within kTolTie of the best.
EntryOptimum pick(const EntrySet& set, const Eigen::VectorXd& q, double nu, const FamilyComponent& c,
                  const std::vector<Schedule>& cand) {
  std::vector<double> val;
  val.reserve(cand.size());
  for (const auto& x : cand) val.push_back(standalone_profit(set, q, x) + nu * evaluate(c, x));
  const double best = *std::max_element(val.begin(), val.end());
  for (std::size_t k = 0; k < cand.size(); ++k)
    if (val[k] >= best - kTolTie) {
      EntryOptimum out = assemble(set, q, nu, c, cand[k]);
      out.value = std::max(out.value, best);
      return out;
    }
  return assemble(set, q, nu, c, cand.front());
}

// Vertices of {v in box, u = u*} ∩ {A = U or box faces}: at most one coordinate
// is off its bounds, and then A(u*, v) = U, i.e. sum_s slope_s v_s = sum_s slope_s v*_s.
std::vector<Schedule> commitment_vertices(const FamilyComponent& c) {
  const int T = c.set.periods();
  if (T > kMaxCoupledPeriods)
    throw std::invalid_argument("delta-commitment best response supports at most 16 periods");
  Eigen::VectorXd lo(T), hi(T), slope(T);
  std::vector<int> free;
  for (int t = 0; t < T; ++t) {
    const bool on = c.x_star.u(t) == 1;
    lo(t) = on ? c.set.lo(t) : 0.0;
    hi(t) = on ? c.set.hi(t) : 0.0;
    slope(t) = c.signal(t) - c.set.a;
    if (hi(t) - lo(t) > kTolMatch) free.push_back(t);
  }
  const double target = slope.dot(c.x_star.v);
  const int m = static_cast<int>(free.size());

  std::vector<Schedule> out;
  for (unsigned mask = 0; mask < (1u << m); ++mask) {
    Schedule x{c.x_star.u, lo};
    for (int k = 0; k < m; ++k)
      if (mask >> k & 1u) x.v(free[k]) = hi(free[k]);
    out.push_back(x);
    for (int k = 0; k < m; ++k) {
      const int t = free[k];
      if (std::abs(slope(t)) < 1e-12 || (mask >> k & 1u)) continue;
      const double rest = slope.dot(x.v) - slope(t) * x.v(t);
      const double v = (target - rest) / slope(t);
      if (v < lo(t) - kTolMatch || v > hi(t) + kTolMatch) continue;
      Schedule y = x;
      y.v(t) = std::clamp(v, lo(t), hi(t));
      out.push_back(std::move(y));
    }
  }
  return out;
}

}  // namespace

double evaluate(const FamilyComponent& c, const Schedule& x) { return c.scale * unscaled(c, x); }

double evaluate_component(const RedundantFamily& family, const std::string& id, const Schedule& x) {
  const FamilyComponent& c = family.component(id);
  if (!in_private_set(c.set, x)) throw std::domain_error("schedule lies outside the private set of '" + id + "'");
  return evaluate(c, x);
}

FamilyComponent make_component(const EntrySet& set, const Eigen::VectorXd& signal, const Schedule& x_star,
                               const GammaChoice& gamma) {
  const int T = set.periods();
  if (signal.size() != T) throw std::invalid_argument("price signal length does not match periods");
  if (!in_private_set(set, x_star)) throw std::invalid_argument("dispatch schedule of '" + set.id + "' is infeasible");

  FamilyComponent c;
  c.set = set;
  c.variant = gamma.variant;
  c.x_star = x_star;
  c.signal = signal;
  const StandaloneBest best = standalone_best(set, signal);
  c.pi_plus = best.value;
  c.period_plus = best.per_period;
  c.period_star.resize(T);
  for (int t = 0; t < T; ++t) c.period_star(t) = period_profit(set, signal(t), x_star.u(t), x_star.v(t));
  c.pi_star = c.period_star.sum();
  if (c.pi_star > c.pi_plus + kTolMoney)
    throw std::logic_error("profit at dispatch exceeds maximum profit for '" + set.id + "'");

  c.ramp_anchor = x_star.v;
  c.ramp_bound = x_star.v;
  c.ramp_active = Eigen::Array<bool, Eigen::Dynamic, 1>::Constant(T, false);
  c.kinks.assign(T, {});
  for (int t = 0; t < T; ++t) {
    const double slope = signal(t) - set.a;
    const double anchor = x_star.v(t);
    const double up = period_uplift(c, t);
    auto& k = c.kinks[t];
    k.push_back(anchor);
    if (c.variant == GammaVariant::ContinuousRamp && up > kTolTie && std::abs(slope) > 1e-12) {
      const double dir = slope > 0.0 ? 1.0 : -1.0;
      const double bound = gamma.ramp_width ? anchor + dir * *gamma.ramp_width : (dir > 0.0 ? set.hi(t) : set.lo(t));
      if (std::abs(bound - anchor) > kTolMatch) {
        c.ramp_bound(t) = bound;
        c.ramp_active(t) = true;
        k.push_back(bound);
      }
    }
    if (c.variant == GammaVariant::DeltaExact || std::abs(slope) < 1e-12) continue;
    // online shortfall A_t(v) = alpha - slope v crosses U_t, 0 and the ramp line
    const double alpha = c.period_plus(t) + set.w;
    k.push_back((alpha - up) / slope);
    k.push_back(alpha / slope);
    if (c.ramp_active(t)) {
      const double width = c.ramp_bound(t) - anchor;
      const double denom = slope - up / width;
      if (std::abs(denom) > 1e-12) k.push_back((alpha - up * c.ramp_bound(t) / width) / denom);
    }
  }
  for (int t = 0; t < T; ++t) {
    auto& k = c.kinks[t];
    std::erase_if(k, [&](double v) { return !std::isfinite(v) || v < set.lo(t) - kTolMatch || v > set.hi(t) + kTolMatch; });
    std::sort(k.begin(), k.end());
    k.erase(std::unique(k.begin(), k.end(), [](double l, double r) { return std::abs(l - r) <= kTolMatch; }), k.end());
  }
  return c;
}

EntryOptimum maximize_entry(const EntrySet& set, const Eigen::VectorXd& q, double nu, const FamilyComponent* c) {
  if (nu < 0.0) throw std::invalid_argument("nu must be nonnegative");
  if (q.size() != set.periods()) throw std::invalid_argument("price signal length does not match periods");
  StandaloneBest plain = standalone_best(set, q);
  if (c == nullptr || nu * c->scale == 0.0) return from_standalone(std::move(plain));

  switch (c->variant) {
    case GammaVariant::DeltaExact:
      // N vanishes off x*, so only the plain argmax and x* itself can win.
      return pick(set, q, nu, *c, {plain.argmax, c->x_star});
    case GammaVariant::DeltaCommitment: {
      std::vector<Schedule> cand{plain.argmax};
      for (auto& x : commitment_vertices(*c)) cand.push_back(std::move(x));
      return pick(set, q, nu, *c, cand);
    }
    case GammaVariant::ContinuousRamp: {
      // separable: each period is a piecewise-linear function of v with breakpoints in kinks
      Schedule x{Eigen::VectorXi::Zero(set.periods()), Eigen::VectorXd::Zero(set.periods())};
      for (int t = 0; t < set.periods(); ++t) {
        std::vector<double> pts = c->kinks[t];
        pts.push_back(set.lo(t));
        pts.push_back(set.hi(t));
        pts.push_back(0.0);
        const auto states = period_states(set, t, pts);
        std::vector<double> val;
        for (const auto& s : states)
          val.push_back(period_profit(set, q(t), s.u, s.v) + nu * c->scale * ramp_term(*c, t, s.u, s.v));
        const double best = *std::max_element(val.begin(), val.end());
        for (std::size_t k = 0; k < states.size(); ++k)
          if (val[k] >= best - kTolTie) {
            x.u(t) = states[k].u;
            x.v(t) = states[k].v;
            break;
          }
      }
      return assemble(set, q, nu, *c, std::move(x));
    }
  }
  return from_standalone(std::move(plain));
}

}  // namespace uplift
