#include "uplift/serialize.hpp"

#include <cmath>

#include <fmt/format.h>

namespace uplift {

std::string format_number(double v) {
  if (!std::isfinite(v)) return "null";
  if (std::abs(v) < 5e-10) v = 0.0;  // no "-0.000000000"
  return fmt::format("{:.9f}", v);
}

std::string format_cents(double v) {
  if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  if (std::abs(v) < 0.005) v = 0.0;
  return fmt::format("{:.2f}", v);
}

// ---- JsonWriter -------------------------------------------------------------

void JsonWriter::newline() {
  out_ += '\n';
  out_.append(2 * stack_.size(), ' ');
}

void JsonWriter::before_value() {
  if (after_key_) {
    after_key_ = false;
    return;
  }
  if (stack_.empty()) return;
  if (stack_.back().count++ > 0) out_ += ',';
  newline();
}

JsonWriter& JsonWriter::begin_object() {
  before_value();
  out_ += '{';
  stack_.push_back({false, 0});
  return *this;
}

JsonWriter& JsonWriter::end_object() {
  const bool empty = stack_.back().count == 0;
  stack_.pop_back();
  if (!empty) newline();
  out_ += '}';
  return *this;
}

JsonWriter& JsonWriter::begin_array() {
  before_value();
  out_ += '[';
  stack_.push_back({true, 0});
  return *this;
}

JsonWriter& JsonWriter::end_array() { return end_object().replace_last(']'); }

JsonWriter& JsonWriter::replace_last(char c) {
  out_.back() = c;
  return *this;
}

JsonWriter& JsonWriter::key(std::string_view k) {
  before_value();
  value_string(k);
  out_ += ": ";
  after_key_ = true;
  return *this;
}

void JsonWriter::value_string(std::string_view s) {
  out_ += '"';
  for (char ch : s) {
    switch (ch) {
      case '"': out_ += "\\\""; break;
      case '\\': out_ += "\\\\"; break;
      case '\n': out_ += "\\n"; break;
      case '\t': out_ += "\\t"; break;
      case '\r': out_ += "\\r"; break;
      default:
        if (static_cast<unsigned char>(ch) < 0x20) out_ += fmt::format("\\u{:04x}", static_cast<int>(ch));
        else out_ += ch;
    }
  }
  out_ += '"';
}

JsonWriter& JsonWriter::value(double v) {
  before_value();
  out_ += format_number(v);
  return *this;
}

JsonWriter& JsonWriter::value(int v) {
  before_value();
  out_ += std::to_string(v);
  return *this;
}

JsonWriter& JsonWriter::value(bool v) {
  before_value();
  out_ += v ? "true" : "false";
  return *this;
}

JsonWriter& JsonWriter::value(std::string_view v) {
  before_value();
  value_string(v);
  return *this;
}

JsonWriter& JsonWriter::null() {
  before_value();
  out_ += "null";
  return *this;
}

JsonWriter& JsonWriter::raw(std::string_view json) {
  before_value();
  while (!json.empty() && (json.back() == '\n' || json.back() == ' ')) json.remove_suffix(1);
  // re-indent the nested document to the current depth
  const std::string pad(2 * stack_.size(), ' ');
  for (char ch : json) {
    out_ += ch;
    if (ch == '\n') out_ += pad;
  }
  return *this;
}

namespace {

void vector_value(JsonWriter& w, const Eigen::VectorXd& v) {
  w.begin_array();
  for (Eigen::Index k = 0; k < v.size(); ++k) w.value(v(k));
  w.end_array();
}

void vector_value(JsonWriter& w, const Eigen::VectorXi& v) {
  w.begin_array();
  for (Eigen::Index k = 0; k < v.size(); ++k) w.value(v(k));
  w.end_array();
}

void schedule_value(JsonWriter& w, const Schedule& x) {
  w.begin_object();
  w.key("u");
  vector_value(w, x.u);
  w.key("v");
  vector_value(w, x.v);
  w.end_object();
}

const char* kind_name(EntryKind k) { return k == EntryKind::Ftr ? "ftr" : "producer"; }

std::string schedule_text(const Schedule& x) {
  std::string s;
  for (Eigen::Index t = 0; t < x.u.size(); ++t)
    s += fmt::format("{}(u={}, v={})", t ? " " : "", x.u(t), format_cents(x.v(t)));
  return s;
}

std::string node_name(Eigen::Index row, Eigen::Index rows) {
  return rows == 1 ? std::string("system") : fmt::format("node{}", row + 1);
}

}  // namespace

// ---- dispatch ---------------------------------------------------------------

std::string dispatch_json(const MarketInstance& instance, const DispatchSolution& sol) {
  JsonWriter w;
  w.begin_object();
  w.field("feasible", sol.feasible);
  w.field("f_star", sol.cost);
  w.key("producers").begin_array();
  for (int i = 0; i < instance.producer_count() && sol.feasible; ++i) {
    w.begin_object();
    w.field("id", instance.producers[i].id);
    w.key("u");
    vector_value(w, Eigen::VectorXi(sol.u_star.row(i).transpose()));
    w.key("g");
    vector_value(w, Eigen::VectorXd(sol.g_star.row(i).transpose()));
    w.end_object();
  }
  w.end_array();
  w.key("F");
  if (sol.f_star) vector_value(w, *sol.f_star);
  else w.null();
  w.end_object();
  return w.str();
}

std::string dispatch_csv(const MarketInstance& instance, const DispatchSolution& sol) {
  std::string s = "entry,period,u,value\n";
  if (!sol.feasible) return s;
  for (int i = 0; i < instance.producer_count(); ++i)
    for (int t = 0; t < instance.periods; ++t)
      s += fmt::format("{},{},{},{}\n", instance.producers[i].id, t, sol.u_star(i, t), format_number(sol.g_star(i, t)));
  if (sol.f_star)
    for (int t = 0; t < instance.periods; ++t) s += fmt::format("{},{},1,{}\n", kFtrId, t, format_number((*sol.f_star)(t)));
  return s;
}

std::string dispatch_text(const MarketInstance& instance, const DispatchSolution& sol) {
  if (!sol.feasible) return "infeasible\n";
  std::string s = fmt::format("total cost f* = {} $\n", format_cents(sol.cost));
  for (int i = 0; i < instance.producer_count(); ++i) {
    s += fmt::format("  {:<12}", instance.producers[i].id);
    for (int t = 0; t < instance.periods; ++t)
      s += fmt::format("  t{}: u={} g={}", t, sol.u_star(i, t), format_cents(sol.g_star(i, t)));
    s += '\n';
  }
  if (sol.f_star) {
    s += fmt::format("  {:<12}", "flow F");
    for (int t = 0; t < instance.periods; ++t) s += fmt::format("  t{}: {}", t, format_cents((*sol.f_star)(t)));
    s += '\n';
  }
  return s;
}

// ---- prices -----------------------------------------------------------------

std::string price_json(const PriceSystem& price) {
  JsonWriter w;
  w.begin_object();
  w.field("method", to_string(price.method));
  w.key("prices").begin_array();
  for (Eigen::Index r = 0; r < price.prices.rows(); ++r) vector_value(w, Eigen::VectorXd(price.prices.row(r).transpose()));
  w.end_array();
  w.end_object();
  return w.str();
}

std::string price_csv(const PriceSystem& price) {
  std::string s = "node,period,price\n";
  for (Eigen::Index r = 0; r < price.prices.rows(); ++r)
    for (Eigen::Index t = 0; t < price.prices.cols(); ++t)
      s += fmt::format("{},{},{}\n", r + 1, t, format_number(price.prices(r, t)));
  return s;
}

std::string price_text(const PriceSystem& price) {
  std::string s = fmt::format("{} prices ($/MWh)\n", to_string(price.method));
  for (Eigen::Index r = 0; r < price.prices.rows(); ++r) {
    s += fmt::format("  {:<8}", node_name(r, price.prices.rows()));
    for (Eigen::Index t = 0; t < price.prices.cols(); ++t) s += fmt::format("  t{}: {}", t, format_cents(price.prices(r, t)));
    s += '\n';
  }
  return s;
}

// ---- profits ----------------------------------------------------------------

std::string profit_json(const ProfitReport& r) {
  JsonWriter w;
  w.begin_object();
  w.field("nu", r.nu);
  w.key("entries").begin_array();
  for (const auto& e : r.entries) {
    w.begin_object();
    w.field("id", e.id);
    w.field("kind", kind_name(e.kind));
    w.field("profit_star", e.profit_star);
    w.field("profit_plus", e.profit_plus);
    w.field("uplift", e.uplift);
    w.end_object();
  }
  w.end_array();
  w.field("total_profit_star", r.total_star);
  w.field("total_profit_plus", r.total_plus);
  w.field("total_uplift", r.total_uplift);
  w.field("f_star", r.f_star);
  w.field("dual_value", r.dual_value);
  w.field("nu_sum_at_dispatch", r.nu_sum_at_dispatch);
  w.field("duality_gap_check", r.duality_gap_check);
  w.end_object();
  return w.str();
}

std::string profit_csv(const ProfitReport& r) {
  std::string s = "id,profit_star,profit_plus,uplift\n";
  for (const auto& e : r.entries)
    s += fmt::format("{},{},{},{}\n", e.id, format_number(e.profit_star), format_number(e.profit_plus),
                     format_number(e.uplift));
  return s;
}

std::string profit_text(const ProfitReport& r) {
  std::string s = fmt::format("uplift at nu = {}\n", r.nu);
  s += fmt::format("  {:<12} {:>14} {:>14} {:>14}\n", "entry", "profit*", "profit+", "uplift");
  for (const auto& e : r.entries)
    s += fmt::format("  {:<12} {:>14} {:>14} {:>14}\n", e.id, format_cents(e.profit_star), format_cents(e.profit_plus),
                     format_cents(e.uplift));
  s += fmt::format("  {:<12} {:>14} {:>14} {:>14}\n", "total", format_cents(r.total_star), format_cents(r.total_plus),
                   format_cents(r.total_uplift));
  s += fmt::format("  f* = {} $, dual = {} $\n", format_cents(r.f_star), format_cents(r.dual_value));
  return s;
}

// ---- family -----------------------------------------------------------------

std::string family_json(const RedundantFamily& family) {
  JsonWriter w;
  w.begin_object();
  w.field("gamma", to_string(family.gamma.variant));
  w.key("ramp_width");
  if (family.gamma.ramp_width) w.value(*family.gamma.ramp_width);
  else w.null();
  w.key("price").begin_array();
  for (Eigen::Index r = 0; r < family.price.rows(); ++r) vector_value(w, Eigen::VectorXd(family.price.row(r).transpose()));
  w.end_array();
  w.key("components").begin_array();
  for (const auto& c : family.components) {
    w.begin_object();
    w.field("id", c.id());
    w.field("kind", kind_name(c.set.kind));
    w.field("variant", to_string(c.variant));
    w.field("scale", c.scale);
    w.key("x_star");
    schedule_value(w, c.x_star);
    w.field("profit_plus", c.pi_plus);
    w.field("profit_star", c.pi_star);
    w.field("uplift", c.uplift());
    if (c.variant == GammaVariant::ContinuousRamp) {
      w.key("ramp").begin_array();
      for (int t = 0; t < c.set.periods(); ++t) {
        w.begin_object();
        w.field("active", static_cast<bool>(c.ramp_active(t)));
        w.field("anchor", c.ramp_anchor(t));
        w.field("bound", c.ramp_bound(t));
        w.end_object();
      }
      w.end_array();
    }
    w.key("kinks").begin_array();
    for (const auto& k : c.kinks) {
      w.begin_array();
      for (double v : k) w.value(v);
      w.end_array();
    }
    w.end_array();
    w.end_object();
  }
  w.end_array();
  w.end_object();
  return w.str();
}

// ---- verification -----------------------------------------------------------

namespace {

void check_value(JsonWriter& w, std::string_view name, const ConditionCheck& c) {
  w.key(name).begin_object();
  w.field("pass", c.pass);
  w.field("value", c.value);
  w.field("expected", c.expected);
  w.key("witness");
  schedule_value(w, c.witness);
  w.end_object();
}

void verification_body(JsonWriter& w, const VerificationReport& r) {
  w.begin_object();
  w.field("pass", r.pass());
  w.key("entries").begin_array();
  for (const auto& e : r.entries) {
    w.begin_object();
    w.field("id", e.id);
    check_value(w, "max_profit_preserved", e.max_profit);
    check_value(w, "uplift_at_dispatch", e.at_dispatch);
    check_value(w, "nonnegative", e.nonnegative);
    w.end_object();
  }
  w.end_array();
  w.key("redundancy").begin_object();
  w.field("product_of_private_sets", r.redundant_on_product);
  w.field("product_min_sum", r.product_min_sum);
  w.field("feasible_set", r.redundant_on_feasible_set);
  w.field("feasible_min_sum", r.feasible_min_sum);
  w.field("feasible_samples", static_cast<int>(r.feasible_samples));
  w.end_object();
  w.end_object();
}

}  // namespace

std::string verification_json(const VerificationReport& r) {
  JsonWriter w;
  verification_body(w, r);
  return w.str();
}

std::string verification_csv(const VerificationReport& r) {
  std::string s = "entry,condition,pass,value,expected\n";
  auto row = [&](const std::string& id, const char* cond, const ConditionCheck& c) {
    s += fmt::format("{},{},{},{},{}\n", id, cond, c.pass ? "true" : "false", format_number(c.value),
                     format_number(c.expected));
  };
  for (const auto& e : r.entries) {
    row(e.id, "max_profit_preserved", e.max_profit);
    row(e.id, "uplift_at_dispatch", e.at_dispatch);
    row(e.id, "nonnegative", e.nonnegative);
  }
  s += fmt::format("*,redundant_product,{},{},0.000000000\n", r.redundant_on_product ? "true" : "false",
                   format_number(r.product_min_sum));
  s += fmt::format("*,redundant_feasible_set,{},{},0.000000000\n", r.redundant_on_feasible_set ? "true" : "false",
                   format_number(r.feasible_min_sum));
  return s;
}

std::string verification_text(const VerificationReport& r) {
  std::string s = fmt::format("verification: {}\n", r.pass() ? "PASS" : "FAIL");
  auto line = [&](const char* what, const ConditionCheck& c) {
    s += fmt::format("    {:<22} {}  value {}  expected {}", what, c.pass ? "ok  " : "FAIL", format_cents(c.value),
                     format_cents(c.expected));
    if (!c.pass) s += "  at " + schedule_text(c.witness);
    s += '\n';
  };
  for (const auto& e : r.entries) {
    s += fmt::format("  {}\n", e.id);
    line("max profit preserved", e.max_profit);
    line("uplift at dispatch", e.at_dispatch);
    line("nonnegative", e.nonnegative);
  }
  s += fmt::format("  sum of minima over private sets: {} ({})\n", format_cents(r.product_min_sum),
                   r.redundant_on_product ? "ok" : "FAIL");
  s += fmt::format("  min of sum over {} feasible samples: {} ({})\n", r.feasible_samples,
                   format_cents(r.feasible_min_sum), r.redundant_on_feasible_set ? "ok" : "FAIL");
  return s;
}

// ---- nu ---------------------------------------------------------------------

std::string nu_json(const NuAnalysis& nu) {
  JsonWriter w;
  w.begin_object();
  w.field("nu_max", nu.nu_max);
  w.field("cap_reached", nu.cap_reached);
  w.field("dual_at_zero", nu.dual_at_zero);
  w.field("gap_invariant", nu.gap_invariant);
  w.key("curve").begin_array();
  for (const auto& p : nu.curve) {
    w.begin_object();
    w.field("nu", p.nu);
    w.field("total_uplift", p.total_uplift);
    w.field("dual_value", p.dual_value);
    w.end_object();
  }
  w.end_array();
  w.end_object();
  return w.str();
}

std::string nu_csv(const NuAnalysis& nu) {
  std::string s = "nu,total_uplift,dual_value\n";
  for (const auto& p : nu.curve)
    s += fmt::format("{},{},{}\n", format_number(p.nu), format_number(p.total_uplift), format_number(p.dual_value));
  return s;
}

std::string nu_text(const NuAnalysis& nu) {
  std::string s = fmt::format("nu_max = {:.6f}{}\n", nu.nu_max, nu.cap_reached ? " (search cap reached)" : "");
  s += fmt::format("dual at nu = 0: {} $, unchanged at nu = 1: {}\n", format_cents(nu.dual_at_zero),
                   nu.gap_invariant ? "yes" : "no");
  s += fmt::format("  {:>8} {:>14} {:>14}\n", "nu", "total uplift", "dual");
  for (const auto& p : nu.curve)
    s += fmt::format("  {:>8} {:>14} {:>14}\n", p.nu, format_cents(p.total_uplift), format_cents(p.dual_value));
  return s;
}

// ---- elimination ------------------------------------------------------------

std::string elimination_json(const EliminationReport& r) {
  JsonWriter w;
  w.begin_object();
  w.key("price").raw(price_json(r.price));
  w.key("family").raw(family_json(r.family));
  w.key("verification").raw(verification_json(r.verification));
  w.key("uplift_without").raw(profit_json(r.before));
  w.key("uplift_with").raw(profit_json(r.after));
  w.end_object();
  return w.str();
}

std::string elimination_csv(const EliminationReport& r) {
  std::string s = "id,uplift_without,uplift_with,profit_plus_without,profit_plus_with\n";
  for (std::size_t k = 0; k < r.before.entries.size() && k < r.after.entries.size(); ++k) {
    const auto& b = r.before.entries[k];
    const auto& a = r.after.entries[k];
    s += fmt::format("{},{},{},{},{}\n", b.id, format_number(b.uplift), format_number(a.uplift),
                     format_number(b.profit_plus), format_number(a.profit_plus));
  }
  return s;
}

std::string elimination_text(const EliminationReport& r) {
  std::string s = price_text(r.price);
  s += fmt::format("redundant constraint family: {}\n", to_string(r.family.gamma.variant));
  s += verification_text(r.verification);
  s += profit_text(r.before);
  s += profit_text(r.after);
  return s;
}

}  // namespace uplift
