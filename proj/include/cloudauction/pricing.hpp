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

#include <optional>
#include <string>
#include <vector>

#include "cloudauction/core.hpp"
#include "cloudauction/solver.hpp"

namespace cloudauction {

/// What one winner earned against its private costs. utility is exactly
/// payment minus the sum of true costs of that provider's winning offers;
/// providers outside the schedule have utility 0 and are not listed.
struct ProviderUtility {
  std::string provider;
  Cents payment = 0;
  Cents true_cost_supplied = 0;
  Cents utility = 0;

  friend bool operator==(const ProviderUtility&, const ProviderUtility&) = default;
};

/// Result of the pivot-rule payment computation. `schedule` is empty exactly
/// when some winner is irreplaceable; paying such a provider would require an
/// unbounded externality price, so the auction reports it and aborts instead.
struct VcgResult {
  std::optional<PaymentSchedule> schedule;
  std::string monopoly_provider;
};

/// Clarke pivot payments on top of the efficient allocation `a = solve_dp(s)`.
///
/// For each winning provider p with winning bid total S_p, the payment is
///   C(-p) - (C* - S_p)
/// where C* is the allocation's total reported cost and C(-p) the optimal
/// cost with every offer of p removed. The bracket is what the rest of the
/// winners cost; the difference is the harm p's absence would do to the
/// market, which is the one price that makes truthful cost reporting a
/// dominant strategy. Payments never fall below the winning bid because
/// removing offers cannot cheapen the optimum.
inline VcgResult vcg_payments(const Scenario& s, const Allocation& a) {
  const Cents total = a.total_reported_cost;
  VcgResult result;
  PaymentSchedule schedule;
  schedule.mechanism = Mechanism::Vcg();

  for (const auto& [provider, offers] : winners_by_provider(s, a)) {
    Cents winning_bid_total = 0;
    for (const Offer* o : offers) winning_bid_total += o->reported_cost;

    const RestrictedScenario without = restrict_provider(s, provider);
    std::optional<Allocation> fallback;
    if (without.emptied_tasks.empty()) {
      fallback = solve_dp(without.scenario);
    }
    if (!fallback) {
      result.monopoly_provider = provider;
      return result;
    }
    schedule.payments[provider] =
        fallback->total_reported_cost - (total - winning_bid_total);
  }

  for (const auto& [provider, cents] : schedule.payments) {
    schedule.consumer_total += cents;
  }
  result.schedule = std::move(schedule);
  return result;
}

/// Pay-as-bid: each winner receives exactly the sum of its winning offers'
/// reported costs, so the consumer pays C* in total.
inline PaymentSchedule first_price_payments(const Scenario& s, const Allocation& a) {
  PaymentSchedule schedule;
  schedule.mechanism = Mechanism::FirstPrice();
  for (const auto& [provider, offers] : winners_by_provider(s, a)) {
    Cents winning_bid_total = 0;
    for (const Offer* o : offers) winning_bid_total += o->reported_cost;
    schedule.payments[provider] = winning_bid_total;
    schedule.consumer_total += winning_bid_total;
  }
  return schedule;
}

/// Catalog pricing: each winner is paid its winning bid total marked up by
/// `markup_bp` basis points, rounded half up. A markup of 0 collapses to the
/// first-price schedule.
inline PaymentSchedule posted_price_payments(const Scenario& s, const Allocation& a,
                                             std::int64_t markup_bp) {
  if (markup_bp < 0) {
    throw MarketError(errc::invalid_range, "markup_bp must be nonnegative");
  }
  PaymentSchedule schedule;
  schedule.mechanism = Mechanism::Posted(markup_bp);
  for (const auto& [provider, offers] : winners_by_provider(s, a)) {
    Cents winning_bid_total = 0;
    for (const Offer* o : offers) winning_bid_total += o->reported_cost;
    schedule.payments[provider] = scale_bp(winning_bid_total, 10000 + markup_bp);
    schedule.consumer_total += schedule.payments[provider];
  }
  return schedule;
}

/// nullopt when the consumer can afford the schedule; otherwise the total the
/// budget would have to cover. The verdict is a value, not a fault.
inline std::optional<Cents> check_budget(const PaymentSchedule& p, const Scenario& s) {
  if (p.consumer_total <= s.budget) return std::nullopt;
  return p.consumer_total;
}

inline std::vector<ProviderUtility> provider_utilities(const PaymentSchedule& p,
                                                       const Scenario& s,
                                                       const Allocation& a) {
  const auto winners = winners_by_provider(s, a);
  std::vector<ProviderUtility> out;
  for (const auto& [provider, cents] : p.payments) {
    ProviderUtility u;
    u.provider = provider;
    u.payment = cents;
    auto it = winners.find(provider);
    if (it != winners.end()) {
      for (const Offer* o : it->second) u.true_cost_supplied += o->true_cost;
    }
    u.utility = u.payment - u.true_cost_supplied;
    out.push_back(std::move(u));
  }
  return out;
}

}  // namespace cloudauction
