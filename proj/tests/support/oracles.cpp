#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace uplift::fixtures {

namespace {

std::vector<double> grid(double lo, double hi) {
  std::vector<double> g;
  for (double v = lo; v < hi; v += 1.0) g.push_back(v);
  g.push_back(hi);
  return g;
}

}  // namespace

double brute_restricted_best(const ProducerSpec& p, double q, int u) {
  if (u == 0) return 0.0;
  double best = -std::numeric_limits<double>::infinity();
  for (double g : grid(p.g_min, p.g_max)) best = std::max(best, (q - p.a) * g - p.w);
  return best;
}

double brute_producer_best(const ProducerSpec& p, double q) {
  return std::max(brute_restricted_best(p, q, 0), brute_restricted_best(p, q, 1));
}

double brute_ftr_best(double spread, double f_max) {
  double best = 0.0;
  for (double f : grid(-f_max, f_max)) best = std::max(best, spread * f);
  return best;
}

double brute_dual(const MarketInstance& inst, const Eigen::MatrixXd& prices) {
  double val = 0.0;
  for (int t = 0; t < inst.periods; ++t) {
    for (int k = 0; k < inst.node_count(); ++k) val += prices(k, t) * inst.demand(k, t);
    for (const auto& p : inst.producers) val -= brute_producer_best(p, prices(p.node - 1, t));
    if (inst.two_node()) val -= brute_ftr_best(prices(1, t) - prices(0, t), inst.network.f_max);
  }
  return val;
}

std::pair<double, double> scan_uninode_chp(const MarketInstance& inst, int t, double step) {
  double lo = 0.0, hi = 1.0;
  for (const auto& p : inst.producers) {
    hi = std::max(hi, p.a + 1.0);
    if (p.g_max > 0.0) hi = std::max(hi, p.a + p.w / p.g_max + 1.0);
    if (p.g_min > 0.0) hi = std::max(hi, p.a + p.w / p.g_min + 1.0);
  }
  const long n = std::lround((hi - lo) / step);
  // closed-form producer terms: the online optimum sits at a box end
  auto dual = [&](double q) {
    double v = q * inst.demand(0, t);
    for (const auto& p : inst.producers)
      v -= std::max({0.0, (q - p.a) * p.g_min - p.w, (q - p.a) * p.g_max - p.w});
    return v;
  };
  double best_q = lo, best_v = -std::numeric_limits<double>::infinity();
  for (long k = 0; k <= n; ++k) {
    const double q = std::round((lo + k * step) * 100.0) / 100.0;
    const double v = dual(q);
    if (v > best_v + 1e-9) {
      best_v = v;
      best_q = q;
    }
  }
  return {best_q, best_v};
}

double example2_n1(int u, double g) { return 0.1 * std::min({200.0 * u - g, 50.0, 200.0 - g}); }

double example2_nftr(double f) { return 255.0 * std::min(1.0 + f / 50.0, 1.0); }

}  // namespace uplift::fixtures
