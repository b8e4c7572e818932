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
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cloudauction {

/// All money is integer cents. Persisted amounts are nonnegative; utilities
/// (payment minus cost) may be negative and reuse the same signed type.
using Cents = std::int64_t;

/// Abstract quality points. Nonnegative after validation.
using Quality = std::int64_t;

enum class errc {
  schema_violation,
  duplicate_offer_id,
  duplicate_bid,
  duplicate_task,
  unknown_task,
  missing_offers,
  negative_value,
  unknown_provider,
  missing_truthful_point,
  instance_too_large,
  invalid_range,
  corrupt_ledger,
  io_failure,
  record_not_found,
  already_settled,
  not_settleable,
};

inline const char* errc_name(errc code) {
  switch (code) {
    case errc::schema_violation:       return "SchemaViolation";
    case errc::duplicate_offer_id:     return "DuplicateOfferId";
    case errc::duplicate_bid:          return "DuplicateBid";
    case errc::duplicate_task:         return "DuplicateTask";
    case errc::unknown_task:           return "UnknownTask";
    case errc::missing_offers:         return "MissingOffers";
    case errc::negative_value:         return "NegativeValue";
    case errc::unknown_provider:       return "UnknownProvider";
    case errc::missing_truthful_point: return "MissingTruthfulPoint";
    case errc::instance_too_large:     return "InstanceTooLarge";
    case errc::invalid_range:          return "InvalidRange";
    case errc::corrupt_ledger:         return "CorruptLedger";
    case errc::io_failure:             return "IoFailure";
    case errc::record_not_found:       return "RecordNotFound";
    case errc::already_settled:        return "AlreadySettled";
    case errc::not_settleable:         return "NotSettleable";
  }
  return "UnknownError";
}

/// Typed failure shared by every module. `code()` is the machine-readable
/// classification; what() carries the human-readable detail.
class MarketError : public std::runtime_error {
 public:
  MarketError(errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message),
        code_(code) {}

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

/// One provider's bid for one task. `true_cost` is the provider's private
/// cost; it defaults to the reported cost when a scenario file omits it.
struct Offer {
  std::string id;
  std::string provider;
  std::string task;
  Cents reported_cost = 0;
  Quality quality = 0;
  Cents true_cost = 0;

  friend bool operator==(const Offer&, const Offer&) = default;
};

/// A composition request: ordered tasks, the bid pool, the minimum total
/// quality the chosen composition must reach, and the consumer budget.
struct Scenario {
  int version = 1;
  std::vector<std::string> tasks;
  std::vector<Offer> offers;
  Quality quality_threshold = 0;
  Cents budget = 0;

  friend bool operator==(const Scenario&, const Scenario&) = default;

  const Offer* find_offer(const std::string& offer_id) const {
    for (const Offer& o : offers) {
      if (o.id == offer_id) return &o;
    }
    return nullptr;
  }

  /// Offers for one task, sorted by offer id.
  std::vector<const Offer*> offers_for(const std::string& task_id) const {
    std::vector<const Offer*> out;
    for (const Offer& o : offers) {
      if (o.task == task_id) out.push_back(&o);
    }
    std::sort(out.begin(), out.end(),
              [](const Offer* a, const Offer* b) { return a->id < b->id; });
    return out;
  }

  /// Distinct provider ids, sorted.
  std::vector<std::string> providers() const {
    std::set<std::string> seen;
    for (const Offer& o : offers) seen.insert(o.provider);
    return {seen.begin(), seen.end()};
  }
};

struct Assignment {
  std::string task;
  std::string offer;

  friend bool operator==(const Assignment&, const Assignment&) = default;
};

/// One chosen offer per task, in scenario task order, plus the sum of the
/// chosen offers' reported costs.
struct Allocation {
  std::vector<Assignment> chosen;
  Cents total_reported_cost = 0;

  friend bool operator==(const Allocation&, const Allocation&) = default;

  const std::string* offer_for(const std::string& task_id) const {
    for (const Assignment& a : chosen) {
      if (a.task == task_id) return &a.offer;
    }
    return nullptr;
  }
};

enum class MechanismKind { vcg, first_price, posted_price };

/// Payment rule identifier. `markup_bp` (basis points over cost) is
/// meaningful only for posted_price.
struct Mechanism {
  MechanismKind kind = MechanismKind::vcg;
  std::int64_t markup_bp = 0;

  static Mechanism Vcg() { return {MechanismKind::vcg, 0}; }
  static Mechanism FirstPrice() { return {MechanismKind::first_price, 0}; }
  static Mechanism Posted(std::int64_t markup_bp) {
    return {MechanismKind::posted_price, markup_bp};
  }

  friend bool operator==(const Mechanism&, const Mechanism&) = default;
};

inline const char* mechanism_name(MechanismKind kind) {
  switch (kind) {
    case MechanismKind::vcg:          return "vcg";
    case MechanismKind::first_price:  return "first-price";
    case MechanismKind::posted_price: return "posted-price";
  }
  return "unknown";
}

/// Per-provider payments produced by one mechanism. Only winning providers
/// appear; consumer_total always equals the sum of the map values.
struct PaymentSchedule {
  Mechanism mechanism;
  std::map<std::string, Cents> payments;
  Cents consumer_total = 0;

  friend bool operator==(const PaymentSchedule&, const PaymentSchedule&) = default;
};

enum class OutcomeStatus { success, infeasible, monopoly_provider, budget_exceeded };

inline const char* status_name(OutcomeStatus s) {
  switch (s) {
    case OutcomeStatus::success:           return "success";
    case OutcomeStatus::infeasible:        return "infeasible";
    case OutcomeStatus::monopoly_provider: return "monopoly_provider";
    case OutcomeStatus::budget_exceeded:   return "budget_exceeded";
  }
  return "unknown";
}

/// The unit persisted to the ledger: what was auctioned (by digest), under
/// which rule, and how it ended. `allocation` is present whenever a feasible
/// selection exists; `payments` only on success.
struct AuctionOutcome {
  std::string scenario_digest;
  Mechanism mechanism;
  OutcomeStatus status = OutcomeStatus::infeasible;
  std::string monopoly_provider;  // set iff status == monopoly_provider
  Cents required_budget = 0;      // set iff status == budget_exceeded
  std::optional<Allocation> allocation;
  std::optional<PaymentSchedule> payments;

  friend bool operator==(const AuctionOutcome&, const AuctionOutcome&) = default;
};

/// round-half-up(value * bp / 10000). Both operands must be nonnegative;
/// every fractional parameter in this library is expressed in basis points
/// so that the economics stay integer-exact.
inline std::int64_t scale_bp(std::int64_t value, std::int64_t bp) {
  return (value * bp + 5000) / 10000;
}

// --- Scenario validation ---------------------------------------------------

/// The single validation gate. Checks every Scenario/Offer invariant and
/// returns the input unchanged; throws MarketError with the first violated
/// rule otherwise. Downstream operations assume their scenarios passed here.
inline const Scenario& validate_scenario(const Scenario& s) {
  if (s.tasks.empty()) {
    throw MarketError(errc::missing_offers, "scenario has no tasks");
  }
  {
    std::set<std::string> seen;
    for (const std::string& t : s.tasks) {
      if (!seen.insert(t).second) {
        throw MarketError(errc::duplicate_task, "task '" + t + "' listed twice");
      }
    }
  }
  if (s.budget < 0) {
    throw MarketError(errc::negative_value, "budget_cents is negative");
  }
  if (s.quality_threshold < 0) {
    throw MarketError(errc::negative_value, "quality_threshold is negative");
  }
  for (const Offer& o : s.offers) {
    if (o.reported_cost < 0) {
      throw MarketError(errc::negative_value,
                        "offer '" + o.id + "' has negative cost_cents");
    }
    if (o.true_cost < 0) {
      throw MarketError(errc::negative_value,
                        "offer '" + o.id + "' has negative true_cost_cents");
    }
    if (o.quality < 0) {
      throw MarketError(errc::negative_value,
                        "offer '" + o.id + "' has negative quality");
    }
  }
  {
    std::set<std::string> ids;
    for (const Offer& o : s.offers) {
      if (!ids.insert(o.id).second) {
        throw MarketError(errc::duplicate_offer_id,
                          "offer id '" + o.id + "' used twice");
      }
    }
  }
  {
    std::set<std::string> tasks(s.tasks.begin(), s.tasks.end());
    for (const Offer& o : s.offers) {
      if (!tasks.count(o.task)) {
        throw MarketError(errc::unknown_task, "offer '" + o.id +
                                                  "' references absent task '" +
                                                  o.task + "'");
      }
    }
  }
  {
    std::set<std::pair<std::string, std::string>> bids;
    for (const Offer& o : s.offers) {
      if (!bids.insert({o.provider, o.task}).second) {
        throw MarketError(errc::duplicate_bid,
                          "provider '" + o.provider + "' bids twice on task '" +
                              o.task + "'");
      }
    }
  }
  for (const std::string& t : s.tasks) {
    bool has_offer = false;
    for (const Offer& o : s.offers) {
      if (o.task == t) {
        has_offer = true;
        break;
      }
    }
    if (!has_offer) {
      throw MarketError(errc::missing_offers, "task '" + t + "' has no offers");
    }
  }
  return s;
}

// --- Allocation bookkeeping ------------------------------------------------

inline Cents allocation_cost(const Scenario& s, const Allocation& a) {
  Cents total = 0;
  for (const Assignment& pick : a.chosen) {
    const Offer* o = s.find_offer(pick.offer);
    if (o == nullptr) {
      throw std::logic_error("allocation references unknown offer '" + pick.offer + "'");
    }
    total += o->reported_cost;
  }
  return total;
}

inline Quality allocation_quality(const Scenario& s, const Allocation& a) {
  Quality total = 0;
  for (const Assignment& pick : a.chosen) {
    const Offer* o = s.find_offer(pick.offer);
    if (o == nullptr) {
      throw std::logic_error("allocation references unknown offer '" + pick.offer + "'");
    }
    total += o->quality;
  }
  return total;
}

/// Recomputes an allocation against its scenario: exactly one offer per task
/// in task order, stored total matches, quality threshold met. Throws
/// std::logic_error on any mismatch; used as an internal assertion.
inline void check_allocation(const Scenario& s, const Allocation& a) {
  if (a.chosen.size() != s.tasks.size()) {
    throw std::logic_error("allocation does not cover every task exactly once");
  }
  for (std::size_t i = 0; i < s.tasks.size(); ++i) {
    if (a.chosen[i].task != s.tasks[i]) {
      throw std::logic_error("allocation tasks out of order at index " + std::to_string(i));
    }
    const Offer* o = s.find_offer(a.chosen[i].offer);
    if (o == nullptr || o->task != a.chosen[i].task) {
      throw std::logic_error("allocation picks offer '" + a.chosen[i].offer +
                             "' that does not belong to task '" + a.chosen[i].task + "'");
    }
  }
  if (allocation_cost(s, a) != a.total_reported_cost) {
    throw std::logic_error("allocation total_reported_cost does not recompute");
  }
  if (allocation_quality(s, a) < s.quality_threshold) {
    throw std::logic_error("allocation misses the quality threshold");
  }
}

/// Winning offers grouped by provider, providers sorted by id.
inline std::map<std::string, std::vector<const Offer*>> winners_by_provider(
    const Scenario& s, const Allocation& a) {
  std::map<std::string, std::vector<const Offer*>> out;
  for (const Assignment& pick : a.chosen) {
    const Offer* o = s.find_offer(pick.offer);
    if (o == nullptr) {
      throw std::logic_error("allocation references unknown offer '" + pick.offer + "'");
    }
    out[o->provider].push_back(o);
  }
  return out;
}

}  // namespace cloudauction
