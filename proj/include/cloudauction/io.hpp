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
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>

#include <openssl/evp.h>

#include "json.hpp"

#include "cloudauction/core.hpp"

namespace cloudauction {

using ordered_json = nlohmann::ordered_json;

namespace detail {

// Strict field accessors. The file schema rejects anything it does not name,
// so a typo cannot silently change the economics.

inline void expect_keys(const ordered_json& j, std::initializer_list<const char*> allowed,
                        const char* what) {
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* k : allowed) {
      if (item.key() == k) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw MarketError(errc::schema_violation,
                        std::string(what) + " has unknown field '" + item.key() + "'");
    }
  }
}

inline const ordered_json& require(const ordered_json& j, const char* key, const char* what) {
  auto it = j.find(key);
  if (it == j.end()) {
    throw MarketError(errc::schema_violation,
                      std::string(what) + " is missing field '" + key + "'");
  }
  return *it;
}

inline std::int64_t as_int(const ordered_json& j, const char* field) {
  if (!j.is_number_integer()) {
    throw MarketError(errc::schema_violation,
                      std::string("field '") + field + "' must be an integer");
  }
  if (j.is_number_unsigned() &&
      j.get<std::uint64_t>() > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) {
    throw MarketError(errc::schema_violation,
                      std::string("field '") + field + "' is out of range");
  }
  return j.get<std::int64_t>();
}

inline std::string as_string(const ordered_json& j, const char* field) {
  if (!j.is_string()) {
    throw MarketError(errc::schema_violation,
                      std::string("field '") + field + "' must be a string");
  }
  return j.get<std::string>();
}

inline std::string hex_digest_sha256(std::string_view bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw MarketError(errc::io_failure, "SHA-256 digest failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 0xf]);
  }
  return out;
}

}  // namespace detail

// --- Scenario files ----------------------------------------------------------

inline ordered_json scenario_to_json(const Scenario& s) {
  ordered_json j = ordered_json::object();
  j["version"] = s.version;
  j["tasks"] = s.tasks;
  j["quality_threshold"] = s.quality_threshold;
  j["budget_cents"] = s.budget;
  ordered_json offers = ordered_json::array();
  for (const Offer& o : s.offers) {
    ordered_json oj = ordered_json::object();
    oj["id"] = o.id;
    oj["provider"] = o.provider;
    oj["task"] = o.task;
    oj["cost_cents"] = o.reported_cost;
    oj["quality"] = o.quality;
    oj["true_cost_cents"] = o.true_cost;
    offers.push_back(std::move(oj));
  }
  j["offers"] = std::move(offers);
  return j;
}

/// Canonical bytes: fields in schema order, no whitespace, true_cost_cents
/// always written out. Digests and golden files are computed over this form.
inline std::string serialize_scenario(const Scenario& s) {
  return scenario_to_json(s).dump();
}

inline Scenario scenario_from_json(const ordered_json& j) {
  if (!j.is_object()) {
    throw MarketError(errc::schema_violation, "scenario document must be a JSON object");
  }
  detail::expect_keys(j, {"version", "tasks", "quality_threshold", "budget_cents", "offers"},
                      "scenario");
  Scenario s;
  std::int64_t version = detail::as_int(detail::require(j, "version", "scenario"), "version");
  if (version != 1) {
    throw MarketError(errc::schema_violation,
                      "unsupported schema version " + std::to_string(version));
  }
  s.version = 1;
  const ordered_json& tasks = detail::require(j, "tasks", "scenario");
  if (!tasks.is_array()) {
    throw MarketError(errc::schema_violation, "field 'tasks' must be an array");
  }
  for (const ordered_json& t : tasks) {
    s.tasks.push_back(detail::as_string(t, "tasks[]"));
  }
  s.quality_threshold =
      detail::as_int(detail::require(j, "quality_threshold", "scenario"), "quality_threshold");
  s.budget = detail::as_int(detail::require(j, "budget_cents", "scenario"), "budget_cents");
  const ordered_json& offers = detail::require(j, "offers", "scenario");
  if (!offers.is_array()) {
    throw MarketError(errc::schema_violation, "field 'offers' must be an array");
  }
  for (const ordered_json& oj : offers) {
    if (!oj.is_object()) {
      throw MarketError(errc::schema_violation, "offer entries must be objects");
    }
    detail::expect_keys(oj, {"id", "provider", "task", "cost_cents", "quality", "true_cost_cents"},
                        "offer");
    Offer o;
    o.id = detail::as_string(detail::require(oj, "id", "offer"), "id");
    o.provider = detail::as_string(detail::require(oj, "provider", "offer"), "provider");
    o.task = detail::as_string(detail::require(oj, "task", "offer"), "task");
    o.reported_cost = detail::as_int(detail::require(oj, "cost_cents", "offer"), "cost_cents");
    o.quality = detail::as_int(detail::require(oj, "quality", "offer"), "quality");
    o.true_cost =
        oj.contains("true_cost_cents")
            ? detail::as_int(oj.at("true_cost_cents"), "true_cost_cents")
            : o.reported_cost;
    s.offers.push_back(std::move(o));
  }
  return s;
}

/// Parses and validates one scenario document. Any malformed input surfaces
/// as a typed MarketError; nothing else escapes.
inline Scenario parse_scenario(std::string_view text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw MarketError(errc::schema_violation, std::string("not valid JSON: ") + e.what());
  }
  Scenario s = scenario_from_json(j);
  validate_scenario(s);
  return s;
}

inline Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw MarketError(errc::io_failure, "cannot open scenario file '" + path + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

/// SHA-256 over the canonical serialization; 64 lowercase hex characters.
inline std::string scenario_digest(const Scenario& s) {
  return detail::hex_digest_sha256(serialize_scenario(s));
}

// --- Mechanisms, allocations, outcomes ---------------------------------------

inline ordered_json mechanism_to_json(const Mechanism& m) {
  ordered_json j = ordered_json::object();
  j["name"] = mechanism_name(m.kind);
  if (m.kind == MechanismKind::posted_price) {
    j["markup_bp"] = m.markup_bp;
  }
  return j;
}

inline Mechanism mechanism_from_json(const ordered_json& j) {
  if (!j.is_object()) {
    throw MarketError(errc::schema_violation, "mechanism must be an object");
  }
  detail::expect_keys(j, {"name", "markup_bp"}, "mechanism");
  std::string name = detail::as_string(detail::require(j, "name", "mechanism"), "name");
  if (name == "vcg") return Mechanism::Vcg();
  if (name == "first-price") return Mechanism::FirstPrice();
  if (name == "posted-price") {
    return Mechanism::Posted(detail::as_int(detail::require(j, "markup_bp", "mechanism"),
                                            "markup_bp"));
  }
  throw MarketError(errc::schema_violation, "unknown mechanism '" + name + "'");
}

inline ordered_json allocation_to_json(const Allocation& a) {
  ordered_json chosen = ordered_json::object();
  for (const Assignment& pick : a.chosen) {
    chosen[pick.task] = pick.offer;
  }
  ordered_json j = ordered_json::object();
  j["chosen"] = std::move(chosen);
  j["total_reported_cost_cents"] = a.total_reported_cost;
  return j;
}

inline Allocation allocation_from_json(const ordered_json& j) {
  detail::expect_keys(j, {"chosen", "total_reported_cost_cents"}, "allocation");
  Allocation a;
  const ordered_json& chosen = detail::require(j, "chosen", "allocation");
  if (!chosen.is_object()) {
    throw MarketError(errc::schema_violation, "allocation 'chosen' must be an object");
  }
  for (const auto& item : chosen.items()) {
    a.chosen.push_back({item.key(), detail::as_string(item.value(), "chosen[]")});
  }
  a.total_reported_cost = detail::as_int(
      detail::require(j, "total_reported_cost_cents", "allocation"), "total_reported_cost_cents");
  return a;
}

inline ordered_json payments_to_json(const PaymentSchedule& p) {
  ordered_json per = ordered_json::object();
  for (const auto& [provider, cents] : p.payments) {
    per[provider] = cents;
  }
  ordered_json j = ordered_json::object();
  j["per_provider"] = std::move(per);
  j["consumer_total_cents"] = p.consumer_total;
  return j;
}

inline PaymentSchedule payments_from_json(const ordered_json& j, const Mechanism& m) {
  detail::expect_keys(j, {"per_provider", "consumer_total_cents"}, "payments");
  PaymentSchedule p;
  p.mechanism = m;
  const ordered_json& per = detail::require(j, "per_provider", "payments");
  if (!per.is_object()) {
    throw MarketError(errc::schema_violation, "payments 'per_provider' must be an object");
  }
  for (const auto& item : per.items()) {
    p.payments[item.key()] = detail::as_int(item.value(), "per_provider[]");
  }
  p.consumer_total =
      detail::as_int(detail::require(j, "consumer_total_cents", "payments"),
                     "consumer_total_cents");
  return p;
}

inline OutcomeStatus status_from_name(const std::string& name) {
  if (name == "success") return OutcomeStatus::success;
  if (name == "infeasible") return OutcomeStatus::infeasible;
  if (name == "monopoly_provider") return OutcomeStatus::monopoly_provider;
  if (name == "budget_exceeded") return OutcomeStatus::budget_exceeded;
  throw MarketError(errc::schema_violation, "unknown outcome status '" + name + "'");
}

inline ordered_json outcome_to_json(const AuctionOutcome& o) {
  ordered_json j = ordered_json::object();
  j["scenario_digest"] = o.scenario_digest;
  j["mechanism"] = mechanism_to_json(o.mechanism);
  j["status"] = status_name(o.status);
  if (o.status == OutcomeStatus::monopoly_provider) {
    j["monopoly_provider"] = o.monopoly_provider;
  }
  if (o.status == OutcomeStatus::budget_exceeded) {
    j["required_cents"] = o.required_budget;
  }
  if (o.allocation) {
    j["allocation"] = allocation_to_json(*o.allocation);
  }
  if (o.payments) {
    j["payments"] = payments_to_json(*o.payments);
  }
  return j;
}

inline AuctionOutcome outcome_from_json(const ordered_json& j) {
  if (!j.is_object()) {
    throw MarketError(errc::schema_violation, "outcome must be an object");
  }
  detail::expect_keys(j,
                      {"scenario_digest", "mechanism", "status", "monopoly_provider",
                       "required_cents", "allocation", "payments"},
                      "outcome");
  AuctionOutcome o;
  o.scenario_digest =
      detail::as_string(detail::require(j, "scenario_digest", "outcome"), "scenario_digest");
  o.mechanism = mechanism_from_json(detail::require(j, "mechanism", "outcome"));
  o.status = status_from_name(
      detail::as_string(detail::require(j, "status", "outcome"), "status"));
  if (o.status == OutcomeStatus::monopoly_provider) {
    o.monopoly_provider = detail::as_string(
        detail::require(j, "monopoly_provider", "outcome"), "monopoly_provider");
  }
  if (o.status == OutcomeStatus::budget_exceeded) {
    o.required_budget =
        detail::as_int(detail::require(j, "required_cents", "outcome"), "required_cents");
  }
  if (j.contains("allocation")) {
    o.allocation = allocation_from_json(j.at("allocation"));
  }
  if (j.contains("payments")) {
    o.payments = payments_from_json(j.at("payments"), o.mechanism);
  }
  if (o.status == OutcomeStatus::success && !o.payments) {
    throw MarketError(errc::schema_violation, "successful outcome lacks payments");
  }
  if (o.status != OutcomeStatus::success && o.payments) {
    throw MarketError(errc::schema_violation, "failed outcome carries payments");
  }
  return o;
}

}  // namespace cloudauction
