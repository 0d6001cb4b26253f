#include "uplift/cli.hpp"

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "uplift/dispatch.hpp"
#include "uplift/instance.hpp"
#include "uplift/pricing.hpp"
#include "uplift/profit.hpp"
#include "uplift/redundant.hpp"
#include "uplift/serialize.hpp"

namespace uplift {

namespace {

struct Rendered {
  std::string json, csv, text;
};

std::string pick(const Rendered& r, OutputFormat f) {
  switch (f) {
    case OutputFormat::Json: return r.json;
    case OutputFormat::Csv: return r.csv;
    case OutputFormat::Text: return r.text;
  }
  return r.json;
}

PriceSystem make_price(const MarketInstance& inst, const DispatchSolution& sol, PriceMethod m) {
  switch (m) {
    case PriceMethod::Marginal: return marginal_price(inst, sol);
    case PriceMethod::CHP: return chp_price(inst);
    case PriceMethod::UserSupplied: break;
  }
  throw std::invalid_argument("the command line supports marginal and chp pricing only");
}

std::vector<double> parse_nu_grid(const std::string& text) {
  std::vector<double> grid;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
    if (item.empty() || used != item.size()) throw CLI::ValidationError("--nu-grid", "not a number: '" + item + "'");
    if (!(v >= 0.0)) throw CLI::ValidationError("--nu-grid", "entries must be nonnegative");
    grid.push_back(v);
  }
  if (grid.empty()) throw CLI::ValidationError("--nu-grid", "empty grid");
  return grid;
}

int emit(const RunConfig& cfg, const std::string& body, std::ostream& out, std::ostream& err) {
  if (cfg.out_path.empty()) {
    out << body;
    return kExitOk;
  }
  std::ofstream f(cfg.out_path, std::ios::binary);
  if (!f) {
    err << "error: cannot write '" << cfg.out_path << "'\n";
    return kExitValidation;
  }
  f << body;
  return f ? kExitOk : kExitValidation;
}

int execute(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const MarketInstance inst = load_instance(cfg.instance_path);
  const DispatchSolution sol = solve_dispatch(inst);

  if (cfg.command == Command::Solve) {
    const int rc = emit(cfg, pick({dispatch_json(inst, sol), dispatch_csv(inst, sol), dispatch_text(inst, sol)}, cfg.format),
                        out, err);
    if (!sol.feasible) {
      err << "error: instance is infeasible\n";
      return kExitInfeasible;
    }
    return rc;
  }
  if (!sol.feasible) throw InfeasibleError("instance is infeasible");

  const PriceSystem price = make_price(inst, sol, cfg.method);
  switch (cfg.command) {
    case Command::Price:
      return emit(cfg, pick({price_json(price), price_csv(price), price_text(price)}, cfg.format), out, err);
    case Command::Uplift: {
      const ProfitReport rep = uplift_report(inst, sol, price);
      return emit(cfg, pick({profit_json(rep), profit_csv(rep), profit_text(rep)}, cfg.format), out, err);
    }
    case Command::Verify: {
      const RedundantFamily fam = build_family(inst, sol, price, cfg.gamma);
      const VerificationReport ver = verify_proposition(fam, inst, sol, price, cfg.grid_step);
      const int rc =
          emit(cfg, pick({verification_json(ver), verification_csv(ver), verification_text(ver)}, cfg.format), out, err);
      if (!ver.pass()) {
        err << "error: redundant constraint family failed verification\n";
        return kExitVerification;
      }
      return rc;
    }
    case Command::Eliminate: {
      EliminationReport r;
      r.price = price;
      r.family = build_family(inst, sol, price, cfg.gamma);
      r.verification = verify_proposition(r.family, inst, sol, price, cfg.grid_step);
      r.before = uplift_report(inst, sol, price);
      r.after = uplift_report(inst, sol, price, 1.0, &r.family);
      const int rc = emit(cfg, pick({elimination_json(r), elimination_csv(r), elimination_text(r)}, cfg.format), out, err);
      if (!r.verification.pass()) {
        err << "error: redundant constraint family failed verification\n";
        return kExitVerification;
      }
      return rc;
    }
    case Command::NuScan: {
      const RedundantFamily fam = build_family(inst, sol, price, cfg.gamma);
      const NuAnalysis nu = nu_analysis(inst, sol, price, fam, cfg.nu_grid);
      return emit(cfg, pick({nu_json(nu), nu_csv(nu), nu_text(nu)}, cfg.format), out, err);
    }
    case Command::Solve: break;
  }
  return kExitOk;
}

}  // namespace

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    return execute(config, out, err);
  } catch (const InstanceError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const InfeasibleError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}

ParsedArgs parse_args(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Clear small unit-commitment markets, price them and eliminate uplift"};
  app.name("uplift");
  app.require_subcommand(1);
  app.fallthrough();

  RunConfig cfg;
  std::string method = "chp", gamma = "continuous-ramp", format = "json", nu_grid = "0,0.5,1";
  std::optional<double> ramp_width;

  app.add_option("--instance", cfg.instance_path, "Market instance (JSON)")->required();
  app.add_option("--method", method, "Pricing method")
      ->check(CLI::IsMember({"marginal", "chp"}))
      ->capture_default_str();
  app.add_option("--gamma", gamma, "Redundant constraint family")
      ->check(CLI::IsMember({"delta-exact", "delta-commitment", "continuous-ramp"}))
      ->capture_default_str();
  app.add_option("--ramp-width", ramp_width, "Ramp width in MWh for continuous-ramp")->check(CLI::PositiveNumber);
  app.add_option("--nu-grid", nu_grid, "Comma-separated nu values for nu-scan")->capture_default_str();
  app.add_option("--format", format, "Report format")
      ->check(CLI::IsMember({"json", "csv", "text"}))
      ->capture_default_str();
  app.add_option("--out", cfg.out_path, "Write the report here instead of standard output");
  app.add_option("--grid-step", cfg.grid_step, "Grid step (MWh) for sampling feasible dispatches")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  const std::map<std::string, Command> commands{
      {"solve", Command::Solve},   {"price", Command::Price},   {"uplift", Command::Uplift},
      {"eliminate", Command::Eliminate}, {"verify", Command::Verify}, {"nu-scan", Command::NuScan}};
  const std::map<std::string, std::string> help{
      {"solve", "Optimal dispatch"},
      {"price", "Marginal or convex hull prices"},
      {"uplift", "Lost profit per entry at nu = 0"},
      {"eliminate", "Build and verify a redundant constraint family, report uplift at nu = 0 and 1"},
      {"verify", "Verify a redundant constraint family"},
      {"nu-scan", "Largest nu keeping the dual value, and the uplift curve"}};
  for (const auto& [name, cmd] : commands) app.add_subcommand(name, help.at(name));

  try {
    app.parse(argc, argv);
    for (const auto& [name, cmd] : commands)
      if (app.got_subcommand(name)) cfg.command = cmd;
    cfg.method = *parse_price_method(method);
    cfg.gamma.variant = *parse_gamma(gamma);
    cfg.gamma.ramp_width = ramp_width;
    cfg.nu_grid = parse_nu_grid(nu_grid);
    cfg.format = format == "csv" ? OutputFormat::Csv : format == "text" ? OutputFormat::Text : OutputFormat::Json;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return ParsedArgs{std::nullopt, code == 0 ? kExitOk : kExitValidation};
  }
  return ParsedArgs{cfg, kExitOk};
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  const ParsedArgs parsed = parse_args(argc, argv, out, err);
  if (!parsed.config) return parsed.exit_code;
  return run(*parsed.config, out, err);
}

}  // namespace uplift
