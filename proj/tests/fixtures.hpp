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

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "cloudauction/cloudauction.hpp"

namespace catest {

/// The worked fixture used across the suite: two tasks, four providers,
/// threshold 4, budget 2000. Optimal composition is oB1+oA2 at 1700.
inline cloudauction::Scenario make_ex1() {
  cloudauction::Scenario s;
  s.tasks = {"t1", "t2"};
  s.quality_threshold = 4;
  s.budget = 2000;
  s.offers = {
      {"oA1", "P1", "t1", 1000, 2, 1000},
      {"oB1", "P2", "t1", 1200, 3, 1200},
      {"oA2", "P3", "t2", 500, 1, 500},
      {"oB2", "P4", "t2", 800, 3, 800},
  };
  return s;
}

/// One task named t1, one offer per cost, provider p{i}, quality 0.
inline cloudauction::Scenario single_task(const std::vector<cloudauction::Cents>& costs,
                                          cloudauction::Quality threshold = 0) {
  cloudauction::Scenario s;
  s.tasks = {"t1"};
  s.quality_threshold = threshold;
  s.budget = 100'000'000;
  for (std::size_t i = 0; i < costs.size(); ++i) {
    const std::string suffix = (i < 10 ? "0" : "") + std::to_string(i);
    s.offers.push_back({"o" + suffix, "p" + suffix, "t1", costs[i], 0, costs[i]});
  }
  return s;
}

inline std::string data_path(const std::string& name) {
  return std::string(TEST_DATA_DIR) + "/" + name;
}

template <typename F>
void expect_market_error(cloudauction::errc code, F&& f) {
  try {
    f();
    ADD_FAILURE() << "expected MarketError " << cloudauction::errc_name(code);
  } catch (const cloudauction::MarketError& e) {
    EXPECT_EQ(e.code(), code) << e.what();
  }
}

inline std::string make_temp_dir() {
  std::string tmpl =
      (std::filesystem::temp_directory_path() / "cloudauction-XXXXXX").string();
  std::vector<char> buf(tmpl.begin(), tmpl.end());
  buf.push_back('\0');
  const char* made = mkdtemp(buf.data());
  EXPECT_NE(made, nullptr);
  return made ? std::string(made) : tmpl;
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct CliResult {
  int exit_code = -1;
  std::string out;
};

/// Runs the auction binary through the shell; stderr is discarded, stdout
/// captured. `env_prefix` may carry VAR=value assignments.
inline CliResult run_cli(const std::string& args, const std::string& env_prefix = "") {
  CliResult r;
  std::string cmd;
  if (!env_prefix.empty()) cmd += env_prefix + " ";
  cmd += std::string(AUCTION_BIN) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) {
    ADD_FAILURE() << "popen failed for: " << cmd;
    return r;
  }
  char buf[4096];
  std::size_t n = 0;
  while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  if (WIFEXITED(status)) r.exit_code = WEXITSTATUS(status);
  return r;
}

}  // namespace catest
