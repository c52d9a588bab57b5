// tests/test_ablation.cpp

// Copyright 2026  The speechground Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "speechground/ablation.hpp"
#include "test_util.hpp"

namespace sg = speechground;

TEST_SUITE("ablation") {

TEST_CASE("sweep cells") {
  sg::TrainConfig base;
  auto modules = sg::SweepCells(sg::SweepKind::kModules, base);
  REQUIRE(modules.size() == 4u);
  CHECK(modules[0].name == "baseline");
  CHECK(modules[0].cfg.modules == sg::ModuleToggles{false, false, false});
  CHECK(modules[3].cfg.modules == sg::ModuleToggles{true, true, true});

  auto align = sg::SweepCells(sg::SweepKind::kAlignment, base);
  REQUIRE(align.size() == 4u);
  CHECK_FALSE(align[0].cfg.modules.ccm);
  CHECK(align[1].cfg.alignment == sg::AlignmentSet{true, false, false});
  CHECK(align[3].cfg.alignment == sg::AlignmentSet{true, true, true});

  auto beta = sg::SweepCells(sg::SweepKind::kBeta, base);
  REQUIRE(beta.size() == sg::DefaultBetaGrid().size());
  CHECK(beta[2].name == "beta=0.5");
  CHECK(beta[2].eval_beta == 0.5);
  for (const auto &c : beta) CHECK(c.cfg == beta[0].cfg);
  CHECK_THROWS_AS(sg::SweepCells(sg::SweepKind::kBeta, base, {0.5, 1.2}), sg::ConfigError);

  auto rate = sg::SweepCells(sg::SweepKind::kRate, base, {0.75, 1.5});
  REQUIRE(rate.size() == 2u);
  CHECK(rate[1].cfg.input.rate_scale == 1.5);
  CHECK(rate[0].name == "rate=0.75");
  auto noise = sg::SweepCells(sg::SweepKind::kNoise, base);
  CHECK(noise.size() == 3u);

  CHECK(sg::SweepKindFromString("alignment") == sg::SweepKind::kAlignment);
  CHECK_THROWS_AS(sg::SweepKindFromString("lr"), sg::ConfigError);
}

TEST_CASE("summary statistics") {
  sg::AblationTable t;
  t.rows = {{"a", 1, "overall", 0.25, 70.0}, {"a", 2, "overall", 0.25, 74.0},
            {"a", 3, "overall", 0.25, 72.0}, {"b", 1, "overall", 0.25, 60.0}};
  auto s = t.Summary();
  REQUIRE(s.size() == 2u);
  CHECK(s[0].mean == doctest::Approx(72.0));
  CHECK(s[0].std == doctest::Approx(2.0));
  CHECK(s[0].min == 70.0);
  CHECK(s[0].max == 74.0);
  CHECK(s[1].std == 0.0);
  CHECK(t.SummaryCsv() ==
        "cell,subset,thresh,mean,std,min,max\n"
        "a,overall,0.25,72.0000,2.0000,70.0000,74.0000\n"
        "b,overall,0.25,60.0000,0.0000,60.0000,60.0000\n");
  CHECK(t.ToCsv().rfind("cell,seed,subset,thresh,accuracy\na,1,overall,0.25,70.0000\n", 0) == 0);
}

TEST_CASE("thread count does not change results") {
  const int m = 8;
  sg::Dataset train = sgtest::SmallDataset(4, 2, 51, m), val = sgtest::SmallDataset(3, 2, 52, m);
  sg::TrainConfig base;
  base.model = sgtest::TinyModel();
  base.input = sgtest::SmallInput(m);
  base.epochs = 2;
  base.batch_size = 4;
  sg::AblationSpec spec;
  spec.kind = sg::SweepKind::kBeta;
  spec.seeds = {1, 2};
  spec.values = {0.0, 0.5, 1.0};
  spec.threads = 1;
  auto one = sg::RunAblation(base, sgtest::SmallGen(m), train, val, spec);
  spec.threads = 3;
  auto three = sg::RunAblation(base, sgtest::SmallGen(m), train, val, spec);
  CHECK(one.ToCsv() == three.ToCsv());
  std::set<std::string> cells;
  for (const auto &r : one.rows) cells.insert(r.cell);
  CHECK(cells == std::set<std::string>{"beta=0", "beta=0.5", "beta=1"});
  spec.seeds.clear();
  CHECK_THROWS_AS(sg::RunAblation(base, sgtest::SmallGen(m), train, val, spec), sg::ConfigError);
}

TEST_CASE("thread count from the environment") {
  setenv("SPEECHGROUND_THREADS", "3", 1);
  CHECK(sg::ThreadsFromEnvironment() == 3);
  setenv("SPEECHGROUND_THREADS", "zero", 1);
  CHECK(sg::ThreadsFromEnvironment() == 1);
  unsetenv("SPEECHGROUND_THREADS");
  CHECK(sg::ThreadsFromEnvironment() == 1);
}

}  // TEST_SUITE
