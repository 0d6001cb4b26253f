#include "uplift/instance.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace uplift {

using nlohmann::json;

std::vector<Violation> validate(const MarketInstance& instance) {
  std::vector<Violation> out;
  auto flag = [&](std::string field, std::string rule) {
    out.push_back({std::move(field), std::move(rule)});
  };

  if (instance.periods < 1) flag("periods", "must be >= 1");
  if (instance.demand.rows() != instance.node_count() || instance.demand.cols() != instance.periods) {
    flag("demand", "shape must be nodes x periods");
  } else {
    for (int k = 0; k < instance.demand.rows(); ++k) {
      for (int t = 0; t < instance.demand.cols(); ++t) {
        const double d = instance.demand(k, t);
        const std::string field = "demand.node" + std::to_string(k + 1) + "[" + std::to_string(t) + "]";
        if (!std::isfinite(d)) flag(field, "must be finite");
        else if (d < 0.0) flag(field, "must be nonnegative");
      }
    }
  }

  if (instance.two_node()) {
    if (!std::isfinite(instance.network.f_max) || instance.network.f_max < 0.0)
      flag("network.f_max", "must be finite and nonnegative");
  }

  std::set<std::string> ids;
  for (std::size_t i = 0; i < instance.producers.size(); ++i) {
    const ProducerSpec& p = instance.producers[i];
    const std::string base = "producers[" + std::to_string(i) + "]";
    if (p.id.empty()) flag(base + ".id", "must be nonempty");
    if (!ids.insert(p.id).second) flag(base + ".id", "must be unique");
    if (p.node < 1 || p.node > instance.node_count()) flag(base + ".node", "node must exist in topology");
    if (!std::isfinite(p.g_min) || !std::isfinite(p.g_max)) {
      flag(base + ".g_min/g_max", "must be finite");
    } else {
      if (p.g_min < 0.0) flag(base + ".g_min", "must be nonnegative");
      if (p.g_min > p.g_max) flag(base + ".g_min", "must not exceed g_max");
    }
    if (!std::isfinite(p.a)) flag(base + ".a", "must be finite");
    if (!std::isfinite(p.w)) flag(base + ".w", "must be finite");
    else if (p.w < 0.0) flag(base + ".w", "must be nonnegative");
  }
  return out;
}

namespace {

[[noreturn]] void schema_error(const std::string& what) {
  throw InstanceError(InstanceError::Kind::Schema, what);
}

const json& require(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) schema_error(where + ": missing field '" + key + "'");
  return *it;
}

double number(const json& v, const std::string& where) {
  if (!v.is_number()) schema_error(where + ": expected a number");
  return v.get<double>();
}

Eigen::RowVectorXd demand_row(const json& arr, int periods, const std::string& where) {
  if (!arr.is_array()) schema_error(where + ": expected an array");
  if (static_cast<int>(arr.size()) != periods)
    schema_error(where + ": expected " + std::to_string(periods) + " entries, got " + std::to_string(arr.size()));
  Eigen::RowVectorXd row(periods);
  for (int t = 0; t < periods; ++t) row(t) = number(arr[t], where + "[" + std::to_string(t) + "]");
  return row;
}

}  // namespace

MarketInstance parse_instance(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw InstanceError(InstanceError::Kind::Syntax, e.what());
  }
  if (!doc.is_object()) schema_error("instance: expected a JSON object");

  MarketInstance inst;
  const json& periods = require(doc, "periods", "instance");
  if (!periods.is_number_integer()) schema_error("periods: expected an integer");
  inst.periods = periods.get<int>();
  if (inst.periods < 1) throw InstanceError(InstanceError::Kind::Validation, "periods: must be >= 1");

  if (auto it = doc.find("network"); it != doc.end()) {
    if (!it->is_object()) schema_error("network: expected an object");
    if (auto topo = it->find("topology"); topo != it->end()) {
      if (!topo->is_string()) schema_error("network.topology: expected a string");
      const auto name = topo->get<std::string>();
      if (name == "uninode") inst.network.topology = Topology::Uninode;
      else if (name == "two_node") inst.network.topology = Topology::TwoNode;
      else schema_error("network.topology: expected \"uninode\" or \"two_node\"");
    }
    if (auto fmax = it->find("f_max"); fmax != it->end()) inst.network.f_max = number(*fmax, "network.f_max");
    else if (inst.two_node()) schema_error("network: missing field 'f_max'");
  }

  const json& demand = require(doc, "demand", "instance");
  if (!demand.is_object()) schema_error("demand: expected an object");
  inst.demand = Eigen::MatrixXd::Zero(inst.node_count(), inst.periods);
  inst.demand.row(0) = demand_row(require(demand, "node1", "demand"), inst.periods, "demand.node1");
  if (auto n2 = demand.find("node2"); n2 != demand.end()) {
    if (!inst.two_node()) schema_error("demand.node2: only allowed for two_node topology");
    inst.demand.row(1) = demand_row(*n2, inst.periods, "demand.node2");
  }

  const json& producers = require(doc, "producers", "instance");
  if (!producers.is_array()) schema_error("producers: expected an array");
  for (std::size_t i = 0; i < producers.size(); ++i) {
    const json& p = producers[i];
    const std::string where = "producers[" + std::to_string(i) + "]";
    if (!p.is_object()) schema_error(where + ": expected an object");
    ProducerSpec spec;
    const json& id = require(p, "id", where);
    if (id.is_string()) spec.id = id.get<std::string>();
    else if (id.is_number_integer()) spec.id = std::to_string(id.get<long long>());
    else schema_error(where + ".id: expected a string");
    const json& node = require(p, "node", where);
    if (!node.is_number_integer()) schema_error(where + ".node: expected an integer");
    spec.node = node.get<int>();
    spec.g_min = number(require(p, "g_min", where), where + ".g_min");
    spec.g_max = number(require(p, "g_max", where), where + ".g_max");
    spec.a = number(require(p, "a", where), where + ".a");
    spec.w = number(require(p, "w", where), where + ".w");
    inst.producers.push_back(std::move(spec));
  }

  if (auto violations = validate(inst); !violations.empty()) {
    std::ostringstream msg;
    for (const auto& v : violations) msg << v.field << ": " << v.rule << "; ";
    throw InstanceError(InstanceError::Kind::Validation, msg.str());
  }
  return inst;
}

MarketInstance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InstanceError(InstanceError::Kind::Syntax, "cannot open instance file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_instance(buf.str());
}

std::string serialize_instance(const MarketInstance& instance) {
  nlohmann::ordered_json doc;
  doc["periods"] = instance.periods;
  nlohmann::ordered_json demand;
  for (int k = 0; k < instance.demand.rows(); ++k) {
    std::vector<double> row(instance.demand.row(k).begin(), instance.demand.row(k).end());
    demand["node" + std::to_string(k + 1)] = row;
  }
  doc["demand"] = demand;
  doc["network"] = {{"topology", instance.two_node() ? "two_node" : "uninode"},
                    {"f_max", instance.network.f_max}};
  auto producers = nlohmann::ordered_json::array();
  for (const auto& p : instance.producers) {
    producers.push_back({{"id", p.id}, {"node", p.node}, {"g_min", p.g_min},
                         {"g_max", p.g_max}, {"a", p.a}, {"w", p.w}});
  }
  doc["producers"] = producers;
  return doc.dump(2);
}

}  // namespace uplift
