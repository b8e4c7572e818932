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
//
// Minimal library walkthrough: build a two-task request, clear it under the
// pivot mechanism, and print who gets paid what.

#include <cstdio>

#include "cloudauction/cloudauction.hpp"

int main() {
  using namespace cloudauction;

  Scenario s;
  s.tasks = {"t1", "t2"};
  s.quality_threshold = 4;
  s.budget = 2000;
  s.offers = {
      {"oA1", "P1", "t1", 1000, 2, 1000},
      {"oB1", "P2", "t1", 1200, 3, 1200},
      {"oA2", "P3", "t2", 500, 1, 500},
      {"oB2", "P4", "t2", 800, 3, 800},
  };
  validate_scenario(s);

  const AuctionOutcome outcome = run_auction(s, Mechanism::Vcg());
  std::printf("status: %s\n", status_name(outcome.status));
  if (outcome.status != OutcomeStatus::success) return 1;

  for (const auto& [task, offer] : outcome.allocation->chosen) {
    std::printf("  %s -> %s\n", task.c_str(), offer.c_str());
  }
  for (const auto& [provider, cents] : outcome.payments->payments) {
    std::printf("  pay %s %lld cents\n", provider.c_str(),
                static_cast<long long>(cents));
  }
  std::printf("consumer total: %lld cents\n",
              static_cast<long long>(outcome.payments->consumer_total));
  return 0;
}
