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

#include <random>
#include <string>

#include <gtest/gtest.h>

#include "cloudauction/cloudauction.hpp"
#include "fixtures.hpp"

namespace {

using namespace cloudauction;
using catest::data_path;
using catest::expect_market_error;
using catest::make_ex1;

TEST(ScenarioFile, ParsesTheWorkedFixture) {
  const Scenario s = load_scenario_file(data_path("ex1.json"));
  EXPECT_EQ(s, make_ex1());
  // true_cost_cents is absent in the file, so it defaults to the reported cost.
  EXPECT_EQ(s.offers[1].true_cost, 1200);
}

TEST(ScenarioFile, MissingFileIsIoFailure) {
  expect_market_error(errc::io_failure,
                      [] { load_scenario_file(data_path("does_not_exist.json")); });
}

TEST(ScenarioFile, RoundTripsEveryGeneratedScenario) {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    GenParams p;
    p.tasks = 1 + static_cast<int>(seed % 4);
    const Scenario s = generate_scenario(p, seed);
    const Scenario back = parse_scenario(serialize_scenario(s));
    EXPECT_EQ(back, s) << "seed " << seed;
  }
}

TEST(ScenarioFile, RoundTripPreservesDistinctTrueCost) {
  Scenario s = make_ex1();
  s.offers[0].true_cost = 950;
  const Scenario back = parse_scenario(serialize_scenario(s));
  EXPECT_EQ(back, s);
  EXPECT_EQ(back.offers[0].true_cost, 950);
}

TEST(ScenarioFile, StrictSchemaRejections) {
  const std::string base = serialize_scenario(make_ex1());

  ordered_json j = ordered_json::parse(base);
  j["surprise"] = 1;
  expect_market_error(errc::schema_violation, [&] { parse_scenario(j.dump()); });

  j = ordered_json::parse(base);
  j["offers"][0]["surprise"] = 1;
  expect_market_error(errc::schema_violation, [&] { parse_scenario(j.dump()); });

  j = ordered_json::parse(base);
  j["version"] = 2;
  expect_market_error(errc::schema_violation, [&] { parse_scenario(j.dump()); });

  j = ordered_json::parse(base);
  j.erase("budget_cents");
  expect_market_error(errc::schema_violation, [&] { parse_scenario(j.dump()); });

  j = ordered_json::parse(base);
  j["offers"][0]["cost_cents"] = 12.5;
  expect_market_error(errc::schema_violation, [&] { parse_scenario(j.dump()); });

  j = ordered_json::parse(base);
  j["offers"][0]["cost_cents"] = "1000";
  expect_market_error(errc::schema_violation, [&] { parse_scenario(j.dump()); });

  j = ordered_json::parse(base);
  j["tasks"] = 3;
  expect_market_error(errc::schema_violation, [&] { parse_scenario(j.dump()); });

  expect_market_error(errc::schema_violation, [] { parse_scenario("[1, 2, 3]"); });
  expect_market_error(errc::schema_violation, [] { parse_scenario("not json at all"); });
}

TEST(ScenarioFile, ParseRunsSemanticValidation) {
  ordered_json j = ordered_json::parse(serialize_scenario(make_ex1()));
  j["offers"][0]["id"] = "oB1";  // collides with the second offer
  expect_market_error(errc::duplicate_offer_id, [&] { parse_scenario(j.dump()); });
}

TEST(Digest, StableAcrossReparse) {
  const Scenario s = make_ex1();
  const Scenario back = parse_scenario(serialize_scenario(s));
  EXPECT_EQ(scenario_digest(s), scenario_digest(back));
}

TEST(Digest, ChangesWhenAFieldChanges) {
  Scenario s = make_ex1();
  const std::string before = scenario_digest(s);
  s.budget = 2001;
  EXPECT_NE(scenario_digest(s), before);
}

TEST(Digest, FixedLengthLowercaseHex) {
  const std::string d = scenario_digest(make_ex1());
  ASSERT_EQ(d.size(), 64u);
  for (char c : d) {
    EXPECT_TRUE((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f')) << c;
  }
}

TEST(OutcomeJson, RoundTripsEveryStatus) {
  const Scenario ex1 = make_ex1();

  Scenario g7 = ex1;
  g7.quality_threshold = 7;

  Scenario tight = ex1;
  tight.budget = 1800;

  Scenario mono = ex1;
  mono.offers.erase(mono.offers.begin());  // drop oA1, P2 becomes irreplaceable

  for (const Scenario& s : {ex1, g7, tight, mono}) {
    for (const Mechanism& m :
         {Mechanism::Vcg(), Mechanism::FirstPrice(), Mechanism::Posted(2500)}) {
      const AuctionOutcome outcome = run_auction(s, m);
      const ordered_json j = outcome_to_json(outcome);
      const AuctionOutcome back = outcome_from_json(j);
      EXPECT_EQ(back, outcome);
      EXPECT_EQ(outcome_to_json(back).dump(), j.dump());
    }
  }
}

TEST(OutcomeJson, PaymentsRequiredExactlyOnSuccess) {
  const AuctionOutcome ok = run_auction(make_ex1(), Mechanism::Vcg());
  ASSERT_EQ(ok.status, OutcomeStatus::success);

  ordered_json j = outcome_to_json(ok);
  j.erase("payments");
  expect_market_error(errc::schema_violation, [&] { outcome_from_json(j); });

  Scenario g7 = make_ex1();
  g7.quality_threshold = 7;
  ordered_json j2 = outcome_to_json(run_auction(g7, Mechanism::Vcg()));
  j2["payments"] = outcome_to_json(ok)["payments"];
  expect_market_error(errc::schema_violation, [&] { outcome_from_json(j2); });
}

TEST(MechanismJson, RoundTrip) {
  for (const Mechanism& m :
       {Mechanism::Vcg(), Mechanism::FirstPrice(), Mechanism::Posted(2500)}) {
    EXPECT_EQ(mechanism_from_json(mechanism_to_json(m)), m);
  }
  expect_market_error(errc::schema_violation,
                      [] { mechanism_from_json(ordered_json{{"name", "dutch"}}); });
}

// Parsing is total: arbitrary bytes either parse or raise a typed error.
TEST(Fuzz, ArbitraryBytesNeverCrashTheParser) {
  std::mt19937_64 rng(20260819);
  for (int i = 0; i < 2000; ++i) {
    const std::size_t len = rng() % 64;
    std::string bytes;
    for (std::size_t k = 0; k < len; ++k) {
      bytes.push_back(static_cast<char>(rng() % 256));
    }
    try {
      parse_scenario(bytes);
    } catch (const MarketError&) {
    }
  }
}

TEST(Fuzz, EveryTruncationOfAValidDocumentIsRejectedCleanly) {
  const std::string full = serialize_scenario(make_ex1());
  for (std::size_t len = 0; len < full.size(); ++len) {
    try {
      parse_scenario(full.substr(0, len));
      ADD_FAILURE() << "truncation to " << len << " bytes parsed unexpectedly";
    } catch (const MarketError&) {
    }
  }
}

}  // namespace
