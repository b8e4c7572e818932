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

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "cloudauction/cloudauction.hpp"
#include "fixtures.hpp"

namespace {

using namespace cloudauction;
using catest::expect_market_error;
using catest::make_ex1;
using catest::read_file;
using catest::write_file;

ClockFn fixed_clock(const std::string& stamp = "2026-01-02T03:04:05Z") {
  return [stamp] { return stamp; };
}

AuctionOutcome ex1_outcome(Mechanism m = Mechanism::Vcg()) {
  return run_auction(make_ex1(), m);
}

class LedgerTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = catest::make_temp_dir();
    path_ = (dir_ / "ledger.jsonl").string();
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }

  std::filesystem::path dir_;
  std::string path_;
};

TEST_F(LedgerTest, FirstAppendCreatesRecordOne) {
  const LedgerRecord r = append_record(path_, ex1_outcome(), fixed_clock());
  EXPECT_EQ(r.record_id, 1);
  EXPECT_EQ(r.timestamp, "2026-01-02T03:04:05Z");
  EXPECT_EQ(r.settlement, SettlementState::pending);
  EXPECT_FALSE(r.supersedes.has_value());

  const std::vector<LedgerRecord> loaded = load_ledger(path_);
  ASSERT_EQ(loaded.size(), 1u);
  EXPECT_EQ(loaded[0].record_id, 1);
  EXPECT_EQ(loaded[0].outcome.scenario_digest, scenario_digest(make_ex1()));
}

TEST_F(LedgerTest, IdsGrowByOnePerAppend) {
  for (std::int64_t want = 1; want <= 3; ++want) {
    const LedgerRecord r = append_record(path_, ex1_outcome(), fixed_clock());
    EXPECT_EQ(r.record_id, want);
  }
  const std::vector<LedgerRecord> loaded = load_ledger(path_);
  ASSERT_EQ(loaded.size(), 3u);
  for (std::size_t i = 0; i < loaded.size(); ++i) {
    EXPECT_EQ(loaded[i].record_id, static_cast<std::int64_t>(i) + 1);
  }
}

TEST_F(LedgerTest, FileIsOneJsonObjectPerLine) {
  append_record(path_, ex1_outcome(), fixed_clock());
  append_record(path_, ex1_outcome(Mechanism::FirstPrice()), fixed_clock());
  const std::string bytes = read_file(path_);
  ASSERT_FALSE(bytes.empty());
  EXPECT_EQ(bytes.back(), '\n');
  EXPECT_EQ(std::count(bytes.begin(), bytes.end(), '\n'), 2);

  // Every line parses back to the record that produced it.
  const std::vector<LedgerRecord> loaded = load_ledger(path_);
  std::string rebuilt;
  for (const LedgerRecord& r : loaded) rebuilt += serialize_record(r) + "\n";
  EXPECT_EQ(bytes, rebuilt);
}

TEST_F(LedgerTest, MissingFileIsAnIoFailure) {
  expect_market_error(errc::io_failure, [&] { load_ledger(path_); });
}

TEST_F(LedgerTest, TruncatedFinalLineIsCorrupt) {
  append_record(path_, ex1_outcome(), fixed_clock());
  std::string bytes = read_file(path_);
  bytes.resize(bytes.size() / 2);  // tear the tail, no trailing newline survives
  write_file(path_, bytes);
  expect_market_error(errc::corrupt_ledger, [&] { load_ledger(path_); });
}

TEST_F(LedgerTest, NonJsonLineIsCorrupt) {
  append_record(path_, ex1_outcome(), fixed_clock());
  write_file(path_, read_file(path_) + "not json\n");
  expect_market_error(errc::corrupt_ledger, [&] { load_ledger(path_); });
}

TEST_F(LedgerTest, WrongRecordIdIsCorrupt) {
  LedgerRecord r = append_record(path_, ex1_outcome(), fixed_clock());
  r.record_id = 7;  // line 2 must carry id 2
  write_file(path_, read_file(path_) + serialize_record(r) + "\n");
  expect_market_error(errc::corrupt_ledger, [&] { load_ledger(path_); });
}

TEST_F(LedgerTest, SettledNonSuccessIsCorrupt) {
  Scenario s = make_ex1();
  s.quality_threshold = 7;
  LedgerRecord r;
  r.record_id = 1;
  r.timestamp = "2026-01-02T03:04:05Z";
  r.outcome = run_auction(s, Mechanism::Vcg());
  r.settlement = SettlementState::settled;
  r.settlement_reference = "TXN-BAD";
  write_file(path_, serialize_record(r) + "\n");
  expect_market_error(errc::corrupt_ledger, [&] { load_ledger(path_); });
}

TEST_F(LedgerTest, SettleAppendsASupersedingCopy) {
  append_record(path_, ex1_outcome(), fixed_clock());
  const LedgerRecord settled = settle(path_, 1, "TXN-001", fixed_clock("2026-01-03T00:00:00Z"));
  EXPECT_EQ(settled.record_id, 2);
  EXPECT_EQ(settled.settlement, SettlementState::settled);
  EXPECT_EQ(settled.settlement_reference, "TXN-001");
  ASSERT_TRUE(settled.supersedes.has_value());
  EXPECT_EQ(*settled.supersedes, 1);
  EXPECT_EQ(settled.timestamp, "2026-01-03T00:00:00Z");

  // The original line is untouched; history only ever grows.
  const std::vector<LedgerRecord> loaded = load_ledger(path_);
  ASSERT_EQ(loaded.size(), 2u);
  EXPECT_EQ(loaded[0].settlement, SettlementState::pending);
  EXPECT_EQ(loaded[1].outcome.scenario_digest, loaded[0].outcome.scenario_digest);
}

TEST_F(LedgerTest, SettlingTwiceIsRejected) {
  append_record(path_, ex1_outcome(), fixed_clock());
  settle(path_, 1, "TXN-001", fixed_clock());
  expect_market_error(errc::already_settled, [&] { settle(path_, 1, "TXN-002", fixed_clock()); });
  expect_market_error(errc::already_settled, [&] { settle(path_, 2, "TXN-002", fixed_clock()); });
}

TEST_F(LedgerTest, SettleValidatesTargetAndStatus) {
  append_record(path_, ex1_outcome(), fixed_clock());
  expect_market_error(errc::record_not_found,
                      [&] { settle(path_, 99, "TXN-001", fixed_clock()); });

  Scenario g7 = make_ex1();
  g7.quality_threshold = 7;
  append_record(path_, run_auction(g7, Mechanism::Vcg()), fixed_clock());
  expect_market_error(errc::not_settleable,
                      [&] { settle(path_, 2, "TXN-001", fixed_clock()); });

  Scenario tight = make_ex1();
  tight.budget = 1800;
  append_record(path_, run_auction(tight, Mechanism::Vcg()), fixed_clock());
  expect_market_error(errc::not_settleable,
                      [&] { settle(path_, 3, "TXN-001", fixed_clock()); });
}

TEST_F(LedgerTest, ReportOnEmptyLedgerIsAllZero) {
  write_file(path_, "");
  const MarketReport r = build_report(load_ledger(path_));
  EXPECT_EQ(r.record_count, 0);
  EXPECT_EQ(r.auction_count, 0);
  EXPECT_EQ(r.consumer_spend, 0);
  EXPECT_EQ(r.settlement_backlog, 0);
  EXPECT_TRUE(r.provider_revenue.empty());
  EXPECT_EQ(r.by_status.at("success"), 0);
  EXPECT_EQ(r.by_status.at("infeasible"), 0);
  EXPECT_EQ(r.by_status.at("budget_exceeded"), 0);
  EXPECT_EQ(r.by_status.at("monopoly_provider"), 0);
}

TEST_F(LedgerTest, ReportAggregatesTheWorkedFixture) {
  append_record(path_, ex1_outcome(), fixed_clock());
  MarketReport r = build_report(load_ledger(path_));
  EXPECT_EQ(r.record_count, 1);
  EXPECT_EQ(r.auction_count, 1);
  EXPECT_EQ(r.by_status.at("success"), 1);
  EXPECT_EQ(r.consumer_spend, 1900);
  EXPECT_EQ(r.provider_revenue.at("P2"), 1300);
  EXPECT_EQ(r.provider_revenue.at("P3"), 600);
  EXPECT_EQ(r.settlement_backlog, 1);

  // Settling collapses the chain: still one auction, backlog clears.
  settle(path_, 1, "TXN-001", fixed_clock());
  r = build_report(load_ledger(path_));
  EXPECT_EQ(r.record_count, 2);
  EXPECT_EQ(r.auction_count, 1);
  EXPECT_EQ(r.by_status.at("success"), 1);
  EXPECT_EQ(r.consumer_spend, 1900);
  EXPECT_EQ(r.settlement_backlog, 0);
}

TEST_F(LedgerTest, NonSuccessRecordsCountButNeverSpend) {
  Scenario g7 = make_ex1();
  g7.quality_threshold = 7;
  append_record(path_, run_auction(g7, Mechanism::Vcg()), fixed_clock());

  Scenario tight = make_ex1();
  tight.budget = 1800;
  append_record(path_, run_auction(tight, Mechanism::Vcg()), fixed_clock());

  Scenario mono = make_ex1();
  mono.offers.erase(mono.offers.begin());
  append_record(path_, run_auction(mono, Mechanism::Vcg()), fixed_clock());

  const MarketReport r = build_report(load_ledger(path_));
  EXPECT_EQ(r.auction_count, 3);
  EXPECT_EQ(r.by_status.at("infeasible"), 1);
  EXPECT_EQ(r.by_status.at("budget_exceeded"), 1);
  EXPECT_EQ(r.by_status.at("monopoly_provider"), 1);
  EXPECT_EQ(r.by_status.at("success"), 0);
  EXPECT_EQ(r.consumer_spend, 0);
  EXPECT_EQ(r.settlement_backlog, 0);
  EXPECT_TRUE(r.provider_revenue.empty());
}

TEST_F(LedgerTest, SpendAlwaysEqualsTheSumOfRevenue) {
  std::mt19937_64 rng(99);
  std::vector<std::int64_t> settleable;
  for (int i = 0; i < 12; ++i) {
    const std::uint64_t seed = rng() % 1000 + 1;
    const Scenario s = generate_scenario(GenParams{}, seed);
    const Mechanism m = (i % 3 == 0)   ? Mechanism::Vcg()
                        : (i % 3 == 1) ? Mechanism::FirstPrice()
                                       : Mechanism::Posted(2500);
    const LedgerRecord r = append_record(path_, run_auction(s, m), fixed_clock());
    if (r.outcome.status == OutcomeStatus::success && rng() % 2 == 0) {
      settleable.push_back(r.record_id);
    }
  }
  for (const std::int64_t id : settleable) {
    settle(path_, id, "TXN-" + std::to_string(id), fixed_clock());
  }

  const MarketReport r = build_report(load_ledger(path_));
  Cents revenue = 0;
  for (const auto& [provider, amount] : r.provider_revenue) revenue += amount;
  EXPECT_EQ(r.consumer_spend, revenue);
  EXPECT_EQ(r.settlement_backlog,
            r.by_status.at("success") - static_cast<std::int64_t>(settleable.size()));
}

TEST_F(LedgerTest, ReportJsonIsByteStableUnderAFixedClock) {
  append_record(path_, ex1_outcome(), fixed_clock());
  settle(path_, 1, "TXN-001", fixed_clock());
  const std::string once = report_to_json(build_report(load_ledger(path_))).dump(2);
  const std::string twice = report_to_json(build_report(load_ledger(path_))).dump(2);
  EXPECT_EQ(once, twice);

  // A rebuilt ledger with the same clock produces the same report bytes.
  const std::string other = (dir_ / "ledger2.jsonl").string();
  append_record(other, ex1_outcome(), fixed_clock());
  settle(other, 1, "TXN-001", fixed_clock());
  EXPECT_EQ(read_file(path_), read_file(other));
  EXPECT_EQ(once, report_to_json(build_report(load_ledger(other))).dump(2));
}

TEST(LedgerRecordJson, StrictFieldRules) {
  LedgerRecord r;
  r.record_id = 1;
  r.timestamp = "2026-01-02T03:04:05Z";
  r.outcome = run_auction(make_ex1(), Mechanism::Vcg());
  r.settlement = SettlementState::pending;

  ordered_json j = record_to_json(r);
  EXPECT_FALSE(j.contains("supersedes"));
  EXPECT_FALSE(j.at("settlement").contains("reference"));

  // Pending records must not carry a settlement reference.
  j["settlement"]["reference"] = "TXN-001";
  expect_market_error(errc::corrupt_ledger, [&] { record_from_json(j); });

  j = record_to_json(r);
  j["settlement"]["state"] = "limbo";
  expect_market_error(errc::corrupt_ledger, [&] { record_from_json(j); });

  // Unknown fields are schema errors; load_ledger reclassifies them per line.
  j = record_to_json(r);
  j["extra"] = 1;
  expect_market_error(errc::schema_violation, [&] { record_from_json(j); });

  const LedgerRecord back = record_from_json(record_to_json(r));
  EXPECT_EQ(serialize_record(back), serialize_record(r));
}

TEST(LedgerClock, Iso8601UtcShape) {
  const std::string now = system_clock_utc()();
  ASSERT_EQ(now.size(), 20u);
  EXPECT_EQ(now[4], '-');
  EXPECT_EQ(now[7], '-');
  EXPECT_EQ(now[10], 'T');
  EXPECT_EQ(now[13], ':');
  EXPECT_EQ(now[16], ':');
  EXPECT_EQ(now.back(), 'Z');
}

}  // namespace
