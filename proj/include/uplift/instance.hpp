#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace uplift {

/// One generating unit. Per period its private set is
/// {(u, g) : u in {0,1}, u*g_min <= g <= u*g_max}; cost is a*g + w*u.
struct ProducerSpec {
  std::string id;
  int node = 1;  // 1 or 2
  double g_min = 0.0;
  double g_max = 0.0;
  double a = 0.0;  // $/MWh
  double w = 0.0;  // $ per online period
};

enum class Topology { Uninode, TwoNode };

/// Two-node balance equations (F is the flow of period t):
///   sum_{i at node 1} g_i = d_1 + F,   sum_{i at node 2} g_i + F = d_2.
struct NetworkSpec {
  Topology topology = Topology::Uninode;
  double f_max = 0.0;
};

/// Demand is stored as a (nodes x periods) matrix: one row for a uninode
/// market, two rows for a two-node market.
struct MarketInstance {
  int periods = 1;
  Eigen::MatrixXd demand;
  std::vector<ProducerSpec> producers;
  NetworkSpec network;

  [[nodiscard]] int node_count() const {
    return network.topology == Topology::TwoNode ? 2 : 1;
  }
  [[nodiscard]] bool two_node() const { return network.topology == Topology::TwoNode; }
  [[nodiscard]] int producer_count() const { return static_cast<int>(producers.size()); }
};

struct Violation {
  std::string field;
  std::string rule;
};

/// Returns every broken invariant; empty iff the instance is well formed.
std::vector<Violation> validate(const MarketInstance& instance);

class InstanceError : public std::runtime_error {
 public:
  enum class Kind { Syntax, Schema, Validation };
  InstanceError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  [[nodiscard]] Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Parses and validates an instance document (JSON). Throws InstanceError.
MarketInstance parse_instance(std::string_view text);
MarketInstance load_instance(const std::string& path);

/// Canonical JSON text of an instance; parse_instance inverts it.
std::string serialize_instance(const MarketInstance& instance);

}  // namespace uplift
