#pragma once

// Reference computations written from the model definitions only; they do not
// call the library's optimizers.

#include <utility>

#include <Eigen/Dense>

#include "uplift/instance.hpp"

namespace uplift::fixtures {

/// max over {offline} and an output grid (step 1 plus both box ends) of
/// (q - a) g - w, for one producer and one period.
double brute_producer_best(const ProducerSpec& p, double q);

/// max over a flow grid of (p2 - p1) F, |F| <= f_max.
double brute_ftr_best(double spread, double f_max);

/// Lagrangian dual at the given (node x period) prices, best responses by grid.
double brute_dual(const MarketInstance& inst, const Eigen::MatrixXd& prices);

/// Uninode dual of one period scanned on a price grid of `step`; returns the
/// first maximizing grid price (smallest) and the value.
std::pair<double, double> scan_uninode_chp(const MarketInstance& inst, int t, double step);

/// Largest (q - a) g - w over g on a grid with u = 1 fixed (or 0 when offline).
double brute_restricted_best(const ProducerSpec& p, double q, int u);

/// Closed forms from the Table 1 example at prices (15.10, 10.00).
double example2_n1(int u, double g);
double example2_nftr(double f);

}  // namespace uplift::fixtures
