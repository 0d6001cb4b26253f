#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "uplift/dispatch.hpp"
#include "uplift/family.hpp"
#include "uplift/instance.hpp"
#include "uplift/price_system.hpp"
#include "uplift/profit.hpp"
#include "uplift/redundant.hpp"

namespace uplift {

/// Streaming JSON writer with fixed key order (insertion order), two-space
/// indentation and every floating-point value printed with 9 fractional digits.
class JsonWriter {
 public:
  JsonWriter& begin_object();
  JsonWriter& end_object();
  JsonWriter& begin_array();
  JsonWriter& end_array();
  JsonWriter& key(std::string_view k);
  JsonWriter& value(double v);
  JsonWriter& value(int v);
  JsonWriter& value(bool v);
  JsonWriter& value(std::string_view v);
  JsonWriter& value(const char* v) { return value(std::string_view(v)); }
  JsonWriter& null();

  template <class T>
  JsonWriter& field(std::string_view k, const T& v) {
    return key(k).value(v);
  }

  /// Appends pre-rendered JSON (from another writer) as the next value.
  JsonWriter& raw(std::string_view json);

  [[nodiscard]] std::string str() const { return out_ + "\n"; }

 private:
  struct Level {
    bool array = false;
    int count = 0;
  };
  void before_value();
  void newline();
  void value_string(std::string_view s);
  JsonWriter& replace_last(char c);

  std::string out_;
  std::vector<Level> stack_;
  bool after_key_ = false;
};

/// Number with 9 fractional digits, non-finite values as JSON null.
std::string format_number(double v);
/// Dollars rounded to cents for text reports.
std::string format_cents(double v);

std::string dispatch_json(const MarketInstance& instance, const DispatchSolution& sol);
std::string dispatch_csv(const MarketInstance& instance, const DispatchSolution& sol);
std::string dispatch_text(const MarketInstance& instance, const DispatchSolution& sol);

std::string price_json(const PriceSystem& price);
std::string price_csv(const PriceSystem& price);
std::string price_text(const PriceSystem& price);

std::string profit_json(const ProfitReport& report);
std::string profit_csv(const ProfitReport& report);
std::string profit_text(const ProfitReport& report);

std::string family_json(const RedundantFamily& family);

std::string verification_json(const VerificationReport& report);
std::string verification_csv(const VerificationReport& report);
std::string verification_text(const VerificationReport& report);

std::string nu_json(const NuAnalysis& nu);
std::string nu_csv(const NuAnalysis& nu);
std::string nu_text(const NuAnalysis& nu);

/// Result of the elimination pipeline: family, its verification, and the
/// uplift reports without (nu = 0) and with (nu = 1) the redundant constraint.
struct EliminationReport {
  PriceSystem price;
  RedundantFamily family;
  VerificationReport verification;
  ProfitReport before;
  ProfitReport after;
};

std::string elimination_json(const EliminationReport& r);
std::string elimination_csv(const EliminationReport& r);
std::string elimination_text(const EliminationReport& r);

}  // namespace uplift
