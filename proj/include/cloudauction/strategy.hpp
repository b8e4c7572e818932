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

#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "cloudauction/core.hpp"
#include "cloudauction/io.hpp"
#include "cloudauction/pricing.hpp"
#include "cloudauction/solver.hpp"

namespace cloudauction {

// --- Complete auction runs ---------------------------------------------------

namespace detail {

/// Prices an allocation under a mechanism. Exactly one field is set: a VCG
/// monopolist yields the provider's name instead of a schedule.
struct PricingResult {
  std::optional<PaymentSchedule> schedule;
  std::string monopoly_provider;
};

inline PricingResult price_allocation(const Scenario& s, const Allocation& a,
                                      const Mechanism& m) {
  PricingResult r;
  switch (m.kind) {
    case MechanismKind::vcg: {
      VcgResult vcg = vcg_payments(s, a);
      if (!vcg.schedule) {
        r.monopoly_provider = vcg.monopoly_provider;
        return r;
      }
      r.schedule = std::move(*vcg.schedule);
      break;
    }
    case MechanismKind::first_price:
      r.schedule = first_price_payments(s, a);
      break;
    case MechanismKind::posted_price:
      r.schedule = posted_price_payments(s, a, m.markup_bp);
      break;
  }
  return r;
}

}  // namespace detail

/// The full pipeline: select the efficient composition, price it under the
/// requested mechanism, enforce the budget, and fold every way the auction
/// can end into one value. Identical inputs produce identical outcomes.
inline AuctionOutcome run_auction(const Scenario& s, const Mechanism& m) {
  AuctionOutcome out;
  out.scenario_digest = scenario_digest(s);
  out.mechanism = m;

  std::optional<Allocation> allocation = solve_dp(s);
  if (!allocation) {
    out.status = OutcomeStatus::infeasible;
    return out;
  }
  out.allocation = *allocation;

  detail::PricingResult priced = detail::price_allocation(s, *allocation, m);
  if (!priced.schedule) {
    out.status = OutcomeStatus::monopoly_provider;
    out.monopoly_provider = priced.monopoly_provider;
    return out;
  }

  if (std::optional<Cents> required = check_budget(*priced.schedule, s)) {
    out.status = OutcomeStatus::budget_exceeded;
    out.required_budget = *required;
    return out;
  }

  out.status = OutcomeStatus::success;
  out.payments = std::move(*priced.schedule);
  return out;
}

// --- Deviation sweeps --------------------------------------------------------

/// One misreport trial: the deviating provider scaled its true costs by
/// multiplier_bp (10000 = truthful). `won` means the provider holds winning
/// offers the mechanism priced; utility is the scheduled payment minus the
/// provider's true costs, zero for losers and for trials where no schedule
/// exists. `status` is the operational verdict of the full pipeline, so a
/// budget rejection stays visible without hiding the pricing rule's
/// incentives behind it.
struct DeviationPoint {
  std::int64_t multiplier_bp = 10000;
  OutcomeStatus status = OutcomeStatus::infeasible;
  bool won = false;
  Cents utility = 0;

  friend bool operator==(const DeviationPoint&, const DeviationPoint&) = default;
};

struct SweepReport {
  std::string scenario_digest;
  std::string provider;
  Mechanism mechanism;
  std::vector<DeviationPoint> points;
  Cents truthful_utility = 0;
  Cents max_gain = 0;  // best point utility minus truthful utility
};

/// Multipliers spanning heavy undercutting to 4x inflation around the
/// truthful point.
inline const std::vector<std::int64_t>& default_deviation_grid() {
  static const std::vector<std::int64_t> grid = {2500,  5000,  7500,  9000,
                                                 9900,  10000, 10100, 11000,
                                                 12500, 15000, 20000, 40000};
  return grid;
}

/// Replays the auction once per multiplier. In each trial every offer of
/// `provider` reports round-half-up(true_cost * k / 10000) while everyone
/// else reports exactly their true cost; utilities are read off the payment
/// schedule against true costs. A mechanism is manipulable on this grid iff
/// max_gain > 0.
inline SweepReport deviation_sweep(const Scenario& s, const std::string& provider,
                                   const Mechanism& m,
                                   const std::vector<std::int64_t>& multipliers_bp) {
  bool bids = false;
  for (const Offer& o : s.offers) {
    if (o.provider == provider) {
      bids = true;
      break;
    }
  }
  if (!bids) {
    throw MarketError(errc::unknown_provider,
                      "provider '" + provider + "' has no offers in the scenario");
  }
  if (multipliers_bp.empty()) {
    throw MarketError(errc::missing_truthful_point, "multiplier grid is empty");
  }
  for (std::int64_t k : multipliers_bp) {
    if (k <= 0) {
      throw MarketError(errc::invalid_range,
                        "multiplier " + std::to_string(k) + " is not positive");
    }
  }
  if (std::find(multipliers_bp.begin(), multipliers_bp.end(), 10000) ==
      multipliers_bp.end()) {
    throw MarketError(errc::missing_truthful_point,
                      "multiplier grid lacks the truthful point 10000");
  }

  SweepReport report;
  report.scenario_digest = scenario_digest(s);
  report.provider = provider;
  report.mechanism = m;

  for (std::int64_t k : multipliers_bp) {
    Scenario trial = s;
    for (Offer& o : trial.offers) {
      o.reported_cost = (o.provider == provider) ? scale_bp(o.true_cost, k) : o.true_cost;
    }

    DeviationPoint point;
    point.multiplier_bp = k;
    const std::optional<Allocation> allocation = solve_dp(trial);
    if (!allocation) {
      point.status = OutcomeStatus::infeasible;
    } else {
      const detail::PricingResult priced = detail::price_allocation(trial, *allocation, m);
      if (!priced.schedule) {
        point.status = OutcomeStatus::monopoly_provider;
      } else {
        point.status = check_budget(*priced.schedule, trial)
                           ? OutcomeStatus::budget_exceeded
                           : OutcomeStatus::success;
        auto it = priced.schedule->payments.find(provider);
        if (it != priced.schedule->payments.end()) {
          point.won = true;
          Cents true_cost = 0;
          for (const auto& [p, offers] : winners_by_provider(trial, *allocation)) {
            if (p == provider) {
              for (const Offer* o : offers) true_cost += o->true_cost;
            }
          }
          point.utility = it->second - true_cost;
        }
      }
    }
    report.points.push_back(point);
    if (k == 10000) report.truthful_utility = point.utility;
  }

  Cents best = report.points.front().utility;
  for (const DeviationPoint& p : report.points) best = std::max(best, p.utility);
  report.max_gain = best - report.truthful_utility;
  return report;
}

// --- Scenario generation -----------------------------------------------------

struct GenParams {
  int tasks = 3;
  int offers_per_task = 3;
  Cents cost_lo = 1;
  Cents cost_hi = 10000;
  Quality quality_lo = 0;
  Quality quality_hi = 5;
  std::int64_t threshold_fraction_bp = 6000;
};

/// Deterministic test-instance generator: provider pools are disjoint across
/// tasks, costs and qualities are drawn uniformly, the threshold is a
/// fraction of the attainable maximum quality (so any fraction <= 10000 keeps
/// the instance feasible), true costs equal reported costs, and the budget is
/// three times the truthful cost so budget failures only happen when a caller
/// asks for them. Identical parameters and seed give identical bytes.
inline Scenario generate_scenario(const GenParams& p, std::uint64_t seed) {
  if (p.tasks < 1 || p.offers_per_task < 1) {
    throw MarketError(errc::invalid_range, "tasks and offers_per_task must be at least 1");
  }
  if (p.cost_lo < 0 || p.cost_lo > p.cost_hi) {
    throw MarketError(errc::invalid_range, "cost range is empty or negative");
  }
  if (p.quality_lo < 0 || p.quality_lo > p.quality_hi) {
    throw MarketError(errc::invalid_range, "quality range is empty or negative");
  }
  if (p.threshold_fraction_bp < 0) {
    throw MarketError(errc::invalid_range, "threshold_fraction_bp must be nonnegative");
  }

  // Bounded draws use plain modulo on the raw 64-bit stream: the slight bias
  // is irrelevant for test instances and the mapping is identical on every
  // platform, which the byte-determinism contract needs.
  std::mt19937_64 rng(seed);
  auto draw = [&rng](std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
  };

  Scenario s;
  s.version = 1;
  Quality max_quality_sum = 0;
  Cents max_cost_sum = 0;
  for (int i = 0; i < p.tasks; ++i) {
    const std::string task = "t" + std::to_string(i + 1);
    s.tasks.push_back(task);
    Quality task_max_quality = 0;
    Cents task_max_cost = 0;
    for (int j = 0; j < p.offers_per_task; ++j) {
      Offer o;
      o.id = "o" + std::to_string(i + 1) + "_" + std::to_string(j + 1);
      o.provider = "p" + std::to_string(i + 1) + "_" + std::to_string(j + 1);
      o.task = task;
      o.reported_cost = draw(p.cost_lo, p.cost_hi);
      o.quality = draw(p.quality_lo, p.quality_hi);
      o.true_cost = o.reported_cost;
      task_max_quality = std::max(task_max_quality, o.quality);
      task_max_cost = std::max(task_max_cost, o.reported_cost);
      s.offers.push_back(std::move(o));
    }
    max_quality_sum += task_max_quality;
    max_cost_sum += task_max_cost;
  }
  s.quality_threshold = scale_bp(max_quality_sum, p.threshold_fraction_bp);

  if (std::optional<Allocation> truthful = solve_dp(s)) {
    s.budget = 3 * truthful->total_reported_cost;
  } else {
    s.budget = 3 * max_cost_sum;  // fraction > 10000 can make the instance infeasible
  }
  validate_scenario(s);
  return s;
}

// --- Strategy-proofness verification ------------------------------------------

struct Offender {
  std::uint64_t seed = 0;
  std::string provider;
  std::int64_t multiplier_bp = 0;
  Cents gain = 0;
};

struct ScenarioSweepSummary {
  std::uint64_t seed = 0;
  std::string scenario_digest;
  Cents max_gain = 0;
};

struct VerifyReport {
  Mechanism mechanism;
  bool pass = true;
  bool vacuous = false;
  std::size_t scenarios_examined = 0;
  Cents global_max_gain = 0;
  std::vector<Offender> offenders;
  std::vector<ScenarioSweepSummary> scenarios;
};

/// Sweeps every provider of every generated scenario over the grid and
/// reports the largest gain any misreport achieved. PASS means no grid
/// deviation anywhere beat truthful reporting. An empty seed list passes
/// vacuously and says so.
inline VerifyReport verify_strategyproof(const std::vector<std::uint64_t>& seeds,
                                         const GenParams& params,
                                         const std::vector<std::int64_t>& multipliers_bp,
                                         const Mechanism& m) {
  VerifyReport report;
  report.mechanism = m;
  report.vacuous = seeds.empty();
  for (std::uint64_t seed : seeds) {
    const Scenario s = generate_scenario(params, seed);
    ScenarioSweepSummary summary;
    summary.seed = seed;
    summary.scenario_digest = scenario_digest(s);
    bool first = true;
    for (const std::string& provider : s.providers()) {
      const SweepReport sweep = deviation_sweep(s, provider, m, multipliers_bp);
      if (first || sweep.max_gain > summary.max_gain) summary.max_gain = sweep.max_gain;
      first = false;
      if (sweep.max_gain > 0) {
        // First grid point achieving the best utility names the offender.
        for (const DeviationPoint& point : sweep.points) {
          if (point.utility - sweep.truthful_utility == sweep.max_gain) {
            report.offenders.push_back(
                {seed, provider, point.multiplier_bp, sweep.max_gain});
            break;
          }
        }
      }
      report.global_max_gain = std::max(report.global_max_gain, sweep.max_gain);
    }
    report.scenarios.push_back(std::move(summary));
    ++report.scenarios_examined;
  }
  report.pass = report.global_max_gain <= 0;
  return report;
}

// --- Mechanism comparison ------------------------------------------------------

/// One mechanism's bottom line on the shared truthful allocation. Totals are
/// present whenever a schedule was computable; the status still reports
/// budget or monopoly failures.
struct ComparisonRow {
  Mechanism mechanism;
  OutcomeStatus status = OutcomeStatus::infeasible;
  std::optional<Cents> consumer_total;
  std::optional<Cents> social_cost_true;
  std::optional<Cents> provider_surplus;
};

inline std::vector<ComparisonRow> compare_mechanisms(const Scenario& s,
                                                     std::int64_t markup_bp) {
  const std::vector<Mechanism> mechanisms = {Mechanism::Vcg(), Mechanism::FirstPrice(),
                                             Mechanism::Posted(markup_bp)};
  std::vector<ComparisonRow> rows;

  const std::optional<Allocation> allocation = solve_dp(s);
  if (!allocation) {
    for (const Mechanism& m : mechanisms) {
      rows.push_back({m, OutcomeStatus::infeasible, {}, {}, {}});
    }
    return rows;
  }

  Cents social_cost_true = 0;
  for (const auto& [provider, offers] : winners_by_provider(s, *allocation)) {
    for (const Offer* o : offers) social_cost_true += o->true_cost;
  }

  for (const Mechanism& m : mechanisms) {
    ComparisonRow row;
    row.mechanism = m;
    row.social_cost_true = social_cost_true;

    std::optional<PaymentSchedule> schedule;
    if (m.kind == MechanismKind::vcg) {
      VcgResult vcg = vcg_payments(s, *allocation);
      if (!vcg.schedule) {
        row.status = OutcomeStatus::monopoly_provider;
        rows.push_back(std::move(row));
        continue;
      }
      schedule = std::move(*vcg.schedule);
    } else if (m.kind == MechanismKind::first_price) {
      schedule = first_price_payments(s, *allocation);
    } else {
      schedule = posted_price_payments(s, *allocation, markup_bp);
    }

    row.consumer_total = schedule->consumer_total;
    row.provider_surplus = schedule->consumer_total - social_cost_true;
    row.status = check_budget(*schedule, s) ? OutcomeStatus::budget_exceeded
                                            : OutcomeStatus::success;
    rows.push_back(std::move(row));
  }
  return rows;
}

// --- Reputation ---------------------------------------------------------------

/// Operator-maintained feedback score, smoothed exponentially. Reputation
/// never mutates a running auction; it can only inform the quality levels an
/// operator writes into the next scenario.
struct ReputationState {
  std::string provider;
  Quality score = 0;
  std::int64_t alpha_bp = 0;

  friend bool operator==(const ReputationState&, const ReputationState&) = default;
};

inline ReputationState update_reputation(const ReputationState& r, Quality observed) {
  if (r.alpha_bp < 0 || r.alpha_bp > 10000) {
    throw MarketError(errc::invalid_range, "alpha_bp must lie in [0, 10000]");
  }
  if (r.score < 0 || observed < 0) {
    throw MarketError(errc::negative_value, "reputation scores are nonnegative");
  }
  ReputationState next = r;
  next.score = ((10000 - r.alpha_bp) * r.score + r.alpha_bp * observed + 5000) / 10000;
  return next;
}

// --- Report documents -----------------------------------------------------------

inline ordered_json sweep_report_to_json(const SweepReport& r) {
  ordered_json j = ordered_json::object();
  j["scenario_digest"] = r.scenario_digest;
  j["provider"] = r.provider;
  j["mechanism"] = mechanism_to_json(r.mechanism);
  ordered_json points = ordered_json::array();
  for (const DeviationPoint& p : r.points) {
    ordered_json pj = ordered_json::object();
    pj["multiplier_bp"] = p.multiplier_bp;
    pj["status"] = status_name(p.status);
    pj["won"] = p.won;
    pj["utility_cents"] = p.utility;
    points.push_back(std::move(pj));
  }
  j["points"] = std::move(points);
  j["truthful_utility_cents"] = r.truthful_utility;
  j["max_gain_cents"] = r.max_gain;
  return j;
}

inline ordered_json verify_report_to_json(const VerifyReport& r) {
  ordered_json j = ordered_json::object();
  j["mechanism"] = mechanism_to_json(r.mechanism);
  j["verdict"] = r.pass ? "PASS" : "FAIL";
  j["vacuous"] = r.vacuous;
  j["scenarios_examined"] = r.scenarios_examined;
  j["global_max_gain_cents"] = r.global_max_gain;
  ordered_json offenders = ordered_json::array();
  for (const Offender& o : r.offenders) {
    ordered_json oj = ordered_json::object();
    oj["seed"] = o.seed;
    oj["provider"] = o.provider;
    oj["multiplier_bp"] = o.multiplier_bp;
    oj["gain_cents"] = o.gain;
    offenders.push_back(std::move(oj));
  }
  j["offenders"] = std::move(offenders);
  ordered_json scenarios = ordered_json::array();
  for (const ScenarioSweepSummary& s : r.scenarios) {
    ordered_json sj = ordered_json::object();
    sj["seed"] = s.seed;
    sj["scenario_digest"] = s.scenario_digest;
    sj["max_gain_cents"] = s.max_gain;
    scenarios.push_back(std::move(sj));
  }
  j["scenarios"] = std::move(scenarios);
  return j;
}

inline ordered_json comparison_to_json(const std::string& digest, std::int64_t markup_bp,
                                       const std::vector<ComparisonRow>& rows) {
  ordered_json j = ordered_json::object();
  j["scenario_digest"] = digest;
  j["markup_bp"] = markup_bp;
  ordered_json out_rows = ordered_json::array();
  for (const ComparisonRow& row : rows) {
    ordered_json rj = ordered_json::object();
    rj["mechanism"] = mechanism_to_json(row.mechanism);
    rj["status"] = status_name(row.status);
    rj["consumer_total_cents"] =
        row.consumer_total ? ordered_json(*row.consumer_total) : ordered_json(nullptr);
    rj["social_cost_true_cents"] =
        row.social_cost_true ? ordered_json(*row.social_cost_true) : ordered_json(nullptr);
    rj["provider_surplus_cents"] =
        row.provider_surplus ? ordered_json(*row.provider_surplus) : ordered_json(nullptr);
    out_rows.push_back(std::move(rj));
  }
  j["rows"] = std::move(out_rows);
  return j;
}

}  // namespace cloudauction
