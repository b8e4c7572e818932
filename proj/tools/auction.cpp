// Copyright 2026 The cloudauction Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Batch front door for the auction engine. Machine-readable JSON goes to
// standard output (or --out); diagnostics and the `compare` table go to
// standard error. Exit codes encode the economics so scripts can assert
// mechanism properties without parsing output:
//   0 success, 1 infeasible, 2 budget exceeded, 3 validation error,
//   4 I/O or ledger corruption, 5 monopoly provider, 6 verification failed.

#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "cloudauction/cloudauction.hpp"

namespace {

using namespace cloudauction;

enum ExitCode : int {
  kOk = 0,
  kInfeasible = 1,
  kBudgetExceeded = 2,
  kValidationError = 3,
  kIoError = 4,
  kMonopolyProvider = 5,
  kVerificationFailed = 6,
};

int exit_for_status(OutcomeStatus s) {
  switch (s) {
    case OutcomeStatus::success:
      return kOk;
    case OutcomeStatus::infeasible:
      return kInfeasible;
    case OutcomeStatus::budget_exceeded:
      return kBudgetExceeded;
    case OutcomeStatus::monopoly_provider:
      return kMonopolyProvider;
  }
  return kValidationError;
}

int exit_for_error(errc code) {
  switch (code) {
    case errc::io_failure:
    case errc::corrupt_ledger:
      return kIoError;
    default:
      return kValidationError;
  }
}

Mechanism parse_mechanism(const std::string& text) {
  if (text == "vcg") return Mechanism::Vcg();
  if (text == "first-price") return Mechanism::FirstPrice();
  const std::string prefix = "posted:";
  if (text.rfind(prefix, 0) == 0) {
    const std::string digits = text.substr(prefix.size());
    std::int64_t markup_bp = 0;
    const char* begin = digits.data();
    const char* end = begin + digits.size();
    auto [ptr, ec] = std::from_chars(begin, end, markup_bp);
    if (ec != std::errc() || ptr != end || digits.empty()) {
      throw MarketError(errc::invalid_range,
                        "bad markup in mechanism '" + text + "' (expected posted:MARKUPBP)");
    }
    return Mechanism::Posted(markup_bp);
  }
  throw MarketError(errc::invalid_range,
                    "unknown mechanism '" + text +
                        "' (expected vcg, first-price, or posted:MARKUPBP)");
}

/// FIXED_CLOCK pins every timestamp for reproducible ledgers.
ClockFn resolve_clock() {
  if (const char* fixed = std::getenv("FIXED_CLOCK")) {
    const std::string stamp = fixed;
    if (!stamp.empty()) {
      return [stamp] { return stamp; };
    }
  }
  return system_clock_utc();
}

void emit(const ordered_json& j, const std::string& out_path) {
  const std::string text = j.dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) {
    throw MarketError(errc::io_failure, "cannot open output file '" + out_path + "'");
  }
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  f.flush();
  if (!f) {
    throw MarketError(errc::io_failure, "write to '" + out_path + "' failed");
  }
}

struct RunArgs {
  std::string scenario_path;
  std::string mechanism = "vcg";
  std::string ledger_path;
  std::string out_path;
};

int cmd_run(const RunArgs& a) {
  const Mechanism m = parse_mechanism(a.mechanism);
  const Scenario s = load_scenario_file(a.scenario_path);
  const AuctionOutcome outcome = run_auction(s, m);
  if (!a.ledger_path.empty()) {
    append_record(a.ledger_path, outcome, resolve_clock());
  }
  emit(outcome_to_json(outcome), a.out_path);
  return exit_for_status(outcome.status);
}

struct SweepArgs {
  std::string scenario_path;
  std::string provider;
  std::string mechanism = "vcg";
  std::vector<std::int64_t> grid;
  std::string out_path;
};

int cmd_sweep(const SweepArgs& a) {
  const Mechanism m = parse_mechanism(a.mechanism);
  const Scenario s = load_scenario_file(a.scenario_path);
  const std::vector<std::int64_t>& grid = a.grid.empty() ? default_deviation_grid() : a.grid;
  const SweepReport report = deviation_sweep(s, a.provider, m, grid);
  emit(sweep_report_to_json(report), a.out_path);
  return report.max_gain > 0 ? kVerificationFailed : kOk;
}

struct VerifyArgs {
  std::uint64_t seeds = 100;
  std::string mechanism = "vcg";
  GenParams params;
  std::vector<std::int64_t> grid;
  std::string out_path;
};

int cmd_verify(const VerifyArgs& a) {
  const Mechanism m = parse_mechanism(a.mechanism);
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t i = 1; i <= a.seeds; ++i) seeds.push_back(i);
  const std::vector<std::int64_t>& grid = a.grid.empty() ? default_deviation_grid() : a.grid;
  const VerifyReport report = verify_strategyproof(seeds, a.params, grid, m);
  if (report.vacuous) {
    std::cerr << "warning: 0 scenarios examined; PASS is vacuous\n";
  }
  emit(verify_report_to_json(report), a.out_path);
  return report.pass ? kOk : kVerificationFailed;
}

struct CompareArgs {
  std::string scenario_path;
  std::int64_t markup_bp = 2500;
  std::string out_path;
};

void print_comparison_table(const std::vector<ComparisonRow>& rows) {
  auto cell = [](const std::optional<Cents>& v) {
    return v ? std::to_string(*v) : std::string("-");
  };
  std::ostringstream table;
  table << std::left << std::setw(14) << "mechanism" << std::setw(18) << "status"
        << std::right << std::setw(16) << "consumer_total" << std::setw(13) << "social_cost"
        << std::setw(10) << "surplus" << '\n';
  for (const ComparisonRow& row : rows) {
    table << std::left << std::setw(14) << mechanism_name(row.mechanism.kind) << std::setw(18)
          << status_name(row.status) << std::right << std::setw(16)
          << cell(row.consumer_total) << std::setw(13) << cell(row.social_cost_true)
          << std::setw(10) << cell(row.provider_surplus) << '\n';
  }
  std::cerr << table.str();
}

int cmd_compare(const CompareArgs& a) {
  const Scenario s = load_scenario_file(a.scenario_path);
  const std::vector<ComparisonRow> rows = compare_mechanisms(s, a.markup_bp);
  emit(comparison_to_json(scenario_digest(s), a.markup_bp, rows), a.out_path);
  print_comparison_table(rows);
  bool any_budget = false;
  bool any_monopoly = false;
  for (const ComparisonRow& row : rows) {
    if (row.status == OutcomeStatus::success) return kOk;
    any_budget |= row.status == OutcomeStatus::budget_exceeded;
    any_monopoly |= row.status == OutcomeStatus::monopoly_provider;
  }
  if (any_budget) return kBudgetExceeded;
  if (any_monopoly) return kMonopolyProvider;
  return kInfeasible;
}

struct GenArgs {
  GenParams params;
  std::uint64_t seed = 1;
  std::string out_path;
};

int cmd_gen(const GenArgs& a) {
  const Scenario s = generate_scenario(a.params, a.seed);
  emit(scenario_to_json(s), a.out_path);
  return kOk;
}

struct ReportArgs {
  std::string ledger_path;
  std::string out_path;
};

int cmd_report(const ReportArgs& a) {
  const MarketReport report = build_report(a.ledger_path);
  emit(report_to_json(report), a.out_path);
  return kOk;
}

void add_gen_param_flags(CLI::App* cmd, GenParams& p) {
  cmd->add_option("--tasks", p.tasks, "Number of tasks");
  cmd->add_option("--offers", p.offers_per_task, "Offers (distinct providers) per task");
  cmd->add_option("--cost-lo", p.cost_lo, "Minimum drawn cost in cents");
  cmd->add_option("--cost-hi", p.cost_hi, "Maximum drawn cost in cents");
  cmd->add_option("--quality-lo", p.quality_lo, "Minimum drawn quality level");
  cmd->add_option("--quality-hi", p.quality_hi, "Maximum drawn quality level");
  cmd->add_option("--threshold-bp", p.threshold_fraction_bp,
                  "Quality threshold as basis points of the attainable maximum");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reverse-auction engine for multi-task service composition"};
  app.require_subcommand(1);

  RunArgs run_args;
  CLI::App* run = app.add_subcommand("run", "Run one auction over a scenario file");
  run->add_option("--scenario", run_args.scenario_path, "Scenario JSON file")->required();
  run->add_option("--mechanism", run_args.mechanism, "vcg | first-price | posted:MARKUPBP");
  run->add_option("--ledger", run_args.ledger_path, "Append the outcome to this ledger");
  run->add_option("--out", run_args.out_path, "Write the outcome JSON here instead of stdout");

  SweepArgs sweep_args;
  CLI::App* sweep = app.add_subcommand("sweep", "Replay one provider's misreports on a grid");
  sweep->add_option("--scenario", sweep_args.scenario_path, "Scenario JSON file")->required();
  sweep->add_option("--provider", sweep_args.provider, "Deviating provider id")->required();
  sweep->add_option("--mechanism", sweep_args.mechanism, "vcg | first-price | posted:MARKUPBP");
  sweep->add_option("--grid", sweep_args.grid,
                    "Comma-separated multipliers in basis points (default built-in grid)")
      ->delimiter(',');
  sweep->add_option("--out", sweep_args.out_path, "Write the report JSON here instead of stdout");

  VerifyArgs verify_args;
  CLI::App* verify =
      app.add_subcommand("verify", "Sweep every provider across generated scenarios");
  verify->add_option("--seeds", verify_args.seeds, "Verify scenarios for seeds 1..N");
  verify->add_option("--mechanism", verify_args.mechanism,
                     "vcg | first-price | posted:MARKUPBP");
  verify
      ->add_option("--grid", verify_args.grid,
                   "Comma-separated multipliers in basis points (default built-in grid)")
      ->delimiter(',');
  verify->add_option("--out", verify_args.out_path,
                     "Write the report JSON here instead of stdout");
  add_gen_param_flags(verify, verify_args.params);

  CompareArgs compare_args;
  CLI::App* compare =
      app.add_subcommand("compare", "Price one scenario under all three mechanisms");
  compare->add_option("--scenario", compare_args.scenario_path, "Scenario JSON file")
      ->required();
  compare->add_option("--markup", compare_args.markup_bp,
                      "Posted-price markup in basis points");
  compare->add_option("--out", compare_args.out_path,
                      "Write the comparison JSON here instead of stdout");

  GenArgs gen_args;
  CLI::App* gen = app.add_subcommand("gen", "Generate a deterministic scenario file");
  gen->add_option("--seed", gen_args.seed, "Generator seed");
  gen->add_option("--out", gen_args.out_path, "Write the scenario here instead of stdout");
  add_gen_param_flags(gen, gen_args.params);

  ReportArgs report_args;
  CLI::App* report = app.add_subcommand("report", "Aggregate a ledger into a market report");
  report->add_option("--ledger", report_args.ledger_path, "Ledger JSON Lines file")->required();
  report->add_option("--out", report_args.out_path,
                     "Write the report JSON here instead of stdout");

  int rc = kOk;
  run->callback([&] { rc = cmd_run(run_args); });
  sweep->callback([&] { rc = cmd_sweep(sweep_args); });
  verify->callback([&] { rc = cmd_verify(verify_args); });
  compare->callback([&] { rc = cmd_compare(compare_args); });
  gen->callback([&] { rc = cmd_gen(gen_args); });
  report->callback([&] { rc = cmd_report(report_args); });

  try {
    app.parse(argc, argv);
    return rc;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kValidationError;
  } catch (const MarketError& e) {
    std::cerr << "error: " << e.what() << " [" << errc_name(e.code()) << "]\n";
    return exit_for_error(e.code());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kIoError;
  }
}
