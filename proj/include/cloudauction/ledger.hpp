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

#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cloudauction/core.hpp"
#include "cloudauction/io.hpp"

namespace cloudauction {

// --- Records -------------------------------------------------------------------

enum class SettlementState { pending, settled };

/// One ledger line. The file is append-only: settling a record appends a
/// superseding copy (tracked via `supersedes`) rather than editing history,
/// so a reader can always reconstruct both the audit trail and the current
/// state of every auction.
struct LedgerRecord {
  std::int64_t record_id = 0;  // 1-based, strictly increasing, no gaps
  std::string timestamp;       // ISO-8601 UTC, from the injected clock
  AuctionOutcome outcome;
  SettlementState settlement = SettlementState::pending;
  std::string settlement_reference;        // opaque third-party token, settled only
  std::optional<std::int64_t> supersedes;  // present on settlement copies
};

/// Injectable time source so ledgers are reproducible under test.
using ClockFn = std::function<std::string()>;

inline std::string utc_now_iso8601() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%FT%TZ", &tm);
  return buf;
}

inline ClockFn system_clock_utc() {
  return [] { return utc_now_iso8601(); };
}

inline ordered_json record_to_json(const LedgerRecord& r) {
  ordered_json settlement = ordered_json::object();
  if (r.settlement == SettlementState::settled) {
    settlement["state"] = "settled";
    settlement["reference"] = r.settlement_reference;
  } else {
    settlement["state"] = "pending";
  }
  ordered_json j = ordered_json::object();
  j["record_id"] = r.record_id;
  j["timestamp"] = r.timestamp;
  j["outcome"] = outcome_to_json(r.outcome);
  j["settlement"] = std::move(settlement);
  if (r.supersedes) {
    j["supersedes"] = *r.supersedes;
  }
  return j;
}

inline LedgerRecord record_from_json(const ordered_json& j) {
  if (!j.is_object()) {
    throw MarketError(errc::corrupt_ledger, "ledger record must be a JSON object");
  }
  detail::expect_keys(j, {"record_id", "timestamp", "outcome", "settlement", "supersedes"},
                      "ledger record");
  LedgerRecord r;
  r.record_id = detail::as_int(detail::require(j, "record_id", "ledger record"), "record_id");
  r.timestamp =
      detail::as_string(detail::require(j, "timestamp", "ledger record"), "timestamp");
  r.outcome = outcome_from_json(detail::require(j, "outcome", "ledger record"));
  const ordered_json& settlement = detail::require(j, "settlement", "ledger record");
  if (!settlement.is_object()) {
    throw MarketError(errc::corrupt_ledger, "ledger 'settlement' must be an object");
  }
  detail::expect_keys(settlement, {"state", "reference"}, "settlement");
  const std::string state =
      detail::as_string(detail::require(settlement, "state", "settlement"), "state");
  if (state == "settled") {
    r.settlement = SettlementState::settled;
    r.settlement_reference =
        detail::as_string(detail::require(settlement, "reference", "settlement"), "reference");
  } else if (state == "pending") {
    if (settlement.contains("reference")) {
      throw MarketError(errc::corrupt_ledger, "pending settlement carries a reference");
    }
    r.settlement = SettlementState::pending;
  } else {
    throw MarketError(errc::corrupt_ledger, "unknown settlement state '" + state + "'");
  }
  if (j.contains("supersedes")) {
    r.supersedes = detail::as_int(j.at("supersedes"), "supersedes");
  }
  return r;
}

/// Canonical line bytes for one record; the ledger file is exactly these
/// lines joined by single '\n' terminators.
inline std::string serialize_record(const LedgerRecord& r) {
  return record_to_json(r).dump();
}

// --- Ledger files ----------------------------------------------------------------

/// Strict load: every line must parse, ids must run 1..N with no gaps, a
/// settled record must carry a Success outcome, and supersedes links must
/// point backwards at distinct targets. A file that does not end in a
/// newline had its last write torn and is rejected, which is what makes the
/// append discipline crash-safe.
inline std::vector<LedgerRecord> load_ledger(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw MarketError(errc::io_failure, "cannot open ledger '" + path + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();

  std::vector<LedgerRecord> records;
  if (text.empty()) return records;
  if (text.back() != '\n') {
    throw MarketError(errc::corrupt_ledger, "ledger '" + path + "' has a truncated final line");
  }

  std::set<std::int64_t> superseded;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t end = text.find('\n', pos);
    const std::string line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;

    LedgerRecord r;
    try {
      r = record_from_json(ordered_json::parse(line));
    } catch (const MarketError& e) {
      throw MarketError(errc::corrupt_ledger, "ledger '" + path + "' line " +
                                                  std::to_string(line_no) + ": " + e.what());
    } catch (const nlohmann::json::exception& e) {
      throw MarketError(errc::corrupt_ledger, "ledger '" + path + "' line " +
                                                  std::to_string(line_no) +
                                                  " is not valid JSON: " + e.what());
    }
    if (r.record_id != static_cast<std::int64_t>(line_no)) {
      throw MarketError(errc::corrupt_ledger,
                        "ledger '" + path + "' line " + std::to_string(line_no) +
                            " has record_id " + std::to_string(r.record_id));
    }
    if (r.settlement == SettlementState::settled &&
        r.outcome.status != OutcomeStatus::success) {
      throw MarketError(errc::corrupt_ledger,
                        "record " + std::to_string(r.record_id) +
                            " is settled but its outcome is not a success");
    }
    if (r.supersedes) {
      if (*r.supersedes < 1 || *r.supersedes >= r.record_id) {
        throw MarketError(errc::corrupt_ledger,
                          "record " + std::to_string(r.record_id) +
                              " supersedes out-of-range record " +
                              std::to_string(*r.supersedes));
      }
      if (!superseded.insert(*r.supersedes).second) {
        throw MarketError(errc::corrupt_ledger,
                          "record " + std::to_string(*r.supersedes) +
                              " is superseded twice");
      }
    }
    records.push_back(std::move(r));
  }
  return records;
}

namespace detail {

inline void append_line(const std::string& path, const std::string& line) {
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) {
    throw MarketError(errc::io_failure, "cannot open ledger '" + path + "' for append");
  }
  // One write call for the whole line, terminator included: a reader either
  // sees the full record or a missing trailing newline, never half a record
  // followed by a valid one.
  const std::string payload = line + '\n';
  out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  out.flush();
  if (!out) {
    throw MarketError(errc::io_failure, "write to ledger '" + path + "' failed");
  }
}

}  // namespace detail

/// Appends one outcome as a fresh pending record. A missing file starts a
/// new ledger; an existing file is fully validated first so corruption is
/// caught before it spreads.
inline LedgerRecord append_record(const std::string& path, const AuctionOutcome& outcome,
                                  const ClockFn& clock) {
  std::vector<LedgerRecord> records;
  if (std::filesystem::exists(path)) {
    records = load_ledger(path);
  }
  LedgerRecord r;
  r.record_id = static_cast<std::int64_t>(records.size()) + 1;
  r.timestamp = clock();
  r.outcome = outcome;
  r.settlement = SettlementState::pending;
  detail::append_line(path, serialize_record(r));
  return r;
}

/// Marks a successful auction as paid out by the external settlement party.
/// Appends a superseding copy carrying the opaque reference; the original
/// line is never touched.
inline LedgerRecord settle(const std::string& path, std::int64_t record_id,
                           const std::string& reference, const ClockFn& clock) {
  const std::vector<LedgerRecord> records = load_ledger(path);

  const LedgerRecord* target = nullptr;
  bool superseded = false;
  for (const LedgerRecord& r : records) {
    if (r.record_id == record_id) target = &r;
    if (r.supersedes && *r.supersedes == record_id) superseded = true;
  }
  if (!target) {
    throw MarketError(errc::record_not_found,
                      "ledger has no record " + std::to_string(record_id));
  }
  if (superseded || target->settlement == SettlementState::settled) {
    throw MarketError(errc::already_settled,
                      "record " + std::to_string(record_id) + " is already settled");
  }
  if (target->outcome.status != OutcomeStatus::success) {
    throw MarketError(errc::not_settleable,
                      "record " + std::to_string(record_id) + " has status " +
                          std::string(status_name(target->outcome.status)) +
                          ", only successes settle");
  }

  LedgerRecord r;
  r.record_id = static_cast<std::int64_t>(records.size()) + 1;
  r.timestamp = clock();
  r.outcome = target->outcome;
  r.settlement = SettlementState::settled;
  r.settlement_reference = reference;
  r.supersedes = record_id;
  detail::append_line(path, serialize_record(r));
  return r;
}

// --- Reports --------------------------------------------------------------------

struct MarketReport {
  std::size_t record_count = 0;   // physical lines
  std::size_t auction_count = 0;  // logical records after collapsing supersede chains
  std::map<std::string, std::size_t> by_status;
  Cents consumer_spend = 0;  // successes only
  std::map<std::string, Cents> provider_revenue;
  std::size_t settlement_backlog = 0;  // successful auctions still pending
};

/// Aggregates the current state of every auction: supersede chains collapse
/// to their newest record, so a settled auction is counted once. Spend
/// always equals the sum of provider revenues.
inline MarketReport build_report(const std::vector<LedgerRecord>& records) {
  MarketReport report;
  report.record_count = records.size();
  for (OutcomeStatus s : {OutcomeStatus::success, OutcomeStatus::infeasible,
                          OutcomeStatus::budget_exceeded, OutcomeStatus::monopoly_provider}) {
    report.by_status[std::string(status_name(s))] = 0;
  }

  std::set<std::int64_t> superseded;
  for (const LedgerRecord& r : records) {
    if (r.supersedes) superseded.insert(*r.supersedes);
  }
  for (const LedgerRecord& r : records) {
    if (superseded.count(r.record_id)) continue;
    ++report.auction_count;
    ++report.by_status[std::string(status_name(r.outcome.status))];
    if (r.outcome.status != OutcomeStatus::success) continue;
    report.consumer_spend += r.outcome.payments->consumer_total;
    for (const auto& [provider, cents] : r.outcome.payments->payments) {
      report.provider_revenue[provider] += cents;
    }
    if (r.settlement == SettlementState::pending) ++report.settlement_backlog;
  }
  return report;
}

inline MarketReport build_report(const std::string& path) {
  return build_report(load_ledger(path));
}

inline ordered_json report_to_json(const MarketReport& r) {
  ordered_json by_status = ordered_json::object();
  for (OutcomeStatus s : {OutcomeStatus::success, OutcomeStatus::infeasible,
                          OutcomeStatus::budget_exceeded, OutcomeStatus::monopoly_provider}) {
    const std::string key{status_name(s)};
    by_status[key] = r.by_status.count(key) ? r.by_status.at(key) : 0;
  }
  ordered_json revenue = ordered_json::object();
  for (const auto& [provider, cents] : r.provider_revenue) {
    revenue[provider] = cents;
  }
  ordered_json j = ordered_json::object();
  j["record_count"] = r.record_count;
  j["auction_count"] = r.auction_count;
  j["by_status"] = std::move(by_status);
  j["consumer_spend_cents"] = r.consumer_spend;
  j["provider_revenue_cents"] = std::move(revenue);
  j["settlement_backlog"] = r.settlement_backlog;
  return j;
}

}  // namespace cloudauction
