#pragma once

#include <optional>
#include <string>

#include <Eigen/Dense>

namespace uplift {

enum class PriceMethod { Marginal, CHP, UserSupplied };

const char* to_string(PriceMethod m);
std::optional<PriceMethod> parse_price_method(const std::string& name);

/// Balance-constraint multipliers, (node x period) in $/MWh.
struct PriceSystem {
  Eigen::MatrixXd prices;
  PriceMethod method = PriceMethod::UserSupplied;
};

}  // namespace uplift
