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
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "cloudauction/core.hpp"

namespace cloudauction {

inline constexpr Cents kInfiniteCost = std::numeric_limits<Cents>::max();
inline constexpr std::uint64_t kDefaultBruteForceCap = 1'000'000;

/// Forward table for the min-cost quality-feasible composition.
///
/// cost[i][g] is the cheapest way to serve the first i tasks while
/// accumulating quality exactly g, with accumulation capped at the scenario
/// threshold G: any surplus above G is folded into the G state, which is
/// lossless because the constraint only asks for "at least G". Row 0 is the
/// empty prefix: cost[0][0] = 0, everything else infinite. back[i][g] records
/// the offer that produced the entry and the predecessor quality state.
struct DpTable {
  struct Back {
    int offer = -1;       // index into Scenario::offers
    Quality prev = -1;    // quality state before task i was assigned
  };

  std::size_t task_count = 0;
  Quality quality_cap = 0;

  std::vector<Cents> cost;
  std::vector<Back> back;

  Cents cost_at(std::size_t task, Quality q) const {
    return cost[task * static_cast<std::size_t>(quality_cap + 1) + static_cast<std::size_t>(q)];
  }
  const Back& back_at(std::size_t task, Quality q) const {
    return back[task * static_cast<std::size_t>(quality_cap + 1) + static_cast<std::size_t>(q)];
  }

 private:
  friend DpTable build_dp_table(const Scenario&);
  Cents& cost_ref(std::size_t task, Quality q) {
    return cost[task * static_cast<std::size_t>(quality_cap + 1) + static_cast<std::size_t>(q)];
  }
  Back& back_ref(std::size_t task, Quality q) {
    return back[task * static_cast<std::size_t>(quality_cap + 1) + static_cast<std::size_t>(q)];
  }
};

namespace detail {

/// Offer indices grouped per task (scenario task order), each group sorted by
/// offer id so that tie-breaks and enumeration order are deterministic.
inline std::vector<std::vector<int>> offers_by_task(const Scenario& s) {
  std::vector<std::vector<int>> groups(s.tasks.size());
  for (std::size_t t = 0; t < s.tasks.size(); ++t) {
    for (std::size_t i = 0; i < s.offers.size(); ++i) {
      if (s.offers[i].task == s.tasks[t]) {
        groups[t].push_back(static_cast<int>(i));
      }
    }
    std::sort(groups[t].begin(), groups[t].end(),
              [&s](int a, int b) { return s.offers[a].id < s.offers[b].id; });
  }
  return groups;
}

}  // namespace detail

inline DpTable build_dp_table(const Scenario& s) {
  const std::size_t n = s.tasks.size();
  const Quality cap = s.quality_threshold;

  DpTable t;
  t.task_count = n;
  t.quality_cap = cap;
  t.cost.assign((n + 1) * static_cast<std::size_t>(cap + 1), kInfiniteCost);
  t.back.assign((n + 1) * static_cast<std::size_t>(cap + 1), DpTable::Back{});
  t.cost_ref(0, 0) = 0;

  const auto groups = detail::offers_by_task(s);
  for (std::size_t i = 1; i <= n; ++i) {
    for (Quality g = 0; g <= cap; ++g) {
      const Cents base = t.cost_at(i - 1, g);
      if (base == kInfiniteCost) continue;
      for (int idx : groups[i - 1]) {
        const Offer& o = s.offers[static_cast<std::size_t>(idx)];
        const Quality g2 = std::min<Quality>(cap, g + o.quality);
        const Cents candidate = base + o.reported_cost;
        Cents& slot = t.cost_ref(i, g2);
        DpTable::Back& back = t.back_ref(i, g2);
        // Ties go to the smaller offer id; an equal id means the same offer
        // reached via an earlier (smaller) predecessor state, which we keep.
        if (candidate < slot ||
            (candidate == slot && back.offer >= 0 &&
             o.id < s.offers[static_cast<std::size_t>(back.offer)].id)) {
          slot = candidate;
          back = {idx, g};
        }
      }
    }
  }
  return t;
}

/// Minimum-reported-cost composition meeting the quality threshold, found by
/// dynamic programming over capped accumulated quality. Returns nullopt when
/// no selection reaches the threshold; infeasibility is an ordinary value
/// here because failed auctions still get recorded. Runs in
/// O(n * (G+1) * max offers per task).
inline std::optional<Allocation> solve_dp(const Scenario& s) {
  const DpTable t = build_dp_table(s);
  const std::size_t n = s.tasks.size();
  const Quality cap = s.quality_threshold;
  if (t.cost_at(n, cap) == kInfiniteCost) {
    return std::nullopt;
  }

  Allocation a;
  a.total_reported_cost = t.cost_at(n, cap);
  a.chosen.resize(n);
  Quality g = cap;
  for (std::size_t i = n; i >= 1; --i) {
    const DpTable::Back& back = t.back_at(i, g);
    const Offer& o = s.offers[static_cast<std::size_t>(back.offer)];
    a.chosen[i - 1] = {s.tasks[i - 1], o.id};
    g = back.prev;
  }
  return a;
}

/// Exhaustive oracle: enumerates the full one-offer-per-task product in
/// lexicographic offer-id order, keeps the cheapest feasible selection, and
/// among cost ties the lexicographically smallest id sequence. Refuses
/// instances whose product exceeds `cap`.
inline std::optional<Allocation> solve_bruteforce(const Scenario& s,
                                                  std::uint64_t cap = kDefaultBruteForceCap) {
  const auto groups = detail::offers_by_task(s);
  std::uint64_t combinations = 1;
  for (const auto& g : groups) {
    if (g.empty()) return std::nullopt;
    combinations *= g.size();
    if (combinations > cap) {
      throw MarketError(errc::instance_too_large,
                        "offer product exceeds brute-force cap of " + std::to_string(cap));
    }
  }

  const std::size_t n = groups.size();
  std::vector<std::size_t> pick(n, 0);
  std::optional<Allocation> best;

  for (;;) {
    Cents total_cost = 0;
    Quality total_quality = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const Offer& o = s.offers[static_cast<std::size_t>(groups[i][pick[i]])];
      total_cost += o.reported_cost;
      total_quality += o.quality;
    }
    // Strict improvement only: the first combination seen at a given cost is
    // lexicographically smallest because enumeration follows id order.
    if (total_quality >= s.quality_threshold &&
        (!best || total_cost < best->total_reported_cost)) {
      Allocation a;
      a.total_reported_cost = total_cost;
      for (std::size_t i = 0; i < n; ++i) {
        const Offer& o = s.offers[static_cast<std::size_t>(groups[i][pick[i]])];
        a.chosen.push_back({s.tasks[i], o.id});
      }
      best = std::move(a);
    }

    std::size_t level = n;
    while (level > 0) {
      --level;
      if (++pick[level] < groups[level].size()) break;
      pick[level] = 0;
      if (level == 0) return best;
    }
  }
}

/// A scenario with one provider's offers removed, the operation a pivot-rule
/// payment needs. Tasks whose offer set becomes empty are reported rather
/// than rejected so the caller can classify the provider as a monopolist.
struct RestrictedScenario {
  Scenario scenario;
  std::vector<std::string> emptied_tasks;
};

inline RestrictedScenario restrict_provider(const Scenario& s, const std::string& provider) {
  bool found = false;
  RestrictedScenario out;
  out.scenario = s;
  out.scenario.offers.clear();
  for (const Offer& o : s.offers) {
    if (o.provider == provider) {
      found = true;
    } else {
      out.scenario.offers.push_back(o);
    }
  }
  if (!found) {
    throw MarketError(errc::unknown_provider,
                      "provider '" + provider + "' has no offers in the scenario");
  }
  for (const std::string& t : s.tasks) {
    bool has_offer = false;
    for (const Offer& o : out.scenario.offers) {
      if (o.task == t) {
        has_offer = true;
        break;
      }
    }
    if (!has_offer) out.emptied_tasks.push_back(t);
  }
  if (out.emptied_tasks.empty()) {
    validate_scenario(out.scenario);
  }
  return out;
}

}  // namespace cloudauction
