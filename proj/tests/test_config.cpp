// tests/test_config.cpp

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

#include <string>

#include "doctest.h"
#include "speechground/config.hpp"
#include "test_util.hpp"

namespace sg = speechground;

namespace {

std::string ErrorOf(const std::string &text) {
  try {
    sg::ParseConfig(text, "cfg");
  } catch (const sg::ConfigError &e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("parse values and comments") {
  sg::Config c = sg::ParseConfig(
      "# comment\n"
      "seed = 9\n"
      "beta=0.25   # trailing\n"
      "\n"
      "  sll = false\n"
      "contrastive_mode = four\n"
      "rate_scale = 1.5\n"
      "scenes = 12\n"
      "data_dir = /tmp/x\n");
  CHECK(c.train.seed == 9);
  CHECK(c.train.loss.beta == 0.25);
  CHECK_FALSE(c.train.modules.sll);
  CHECK(c.train.modules.cbm);
  CHECK(c.train.loss.contrastive_mode == sg::ContrastiveMode::kFourGroup);
  CHECK(c.train.input.rate_scale == 1.5);
  CHECK(c.scenes == 12);
  CHECK(c.data_dir == "/tmp/x");
  CHECK(sg::ParseConfig("") == sg::Config{});
}

TEST_CASE("errors name the key and the line") {
  std::string e = ErrorOf("seed = 1\nbogus_key = 3\n");
  CHECK(e.find("bogus_key") != std::string::npos);
  CHECK(e.find("cfg:2") != std::string::npos);
  e = ErrorOf("epochs = many\n");
  CHECK(e.find("epochs") != std::string::npos);
  CHECK(e.find("many") != std::string::npos);
  CHECK(ErrorOf("sll = maybe\n").find("sll") != std::string::npos);
  CHECK(ErrorOf("no equals sign\n").find("cfg:1") != std::string::npos);
  CHECK(ErrorOf("beta = 0.5x\n").find("beta") != std::string::npos);
  CHECK_THROWS_AS(sg::LoadConfig("/nonexistent/config.txt"), sg::ConfigError);
}

TEST_CASE("text round trip covers every key") {
  sg::Config c;
  sg::SetConfigValue(c, "learning_rate", "0.0003");
  sg::SetConfigValue(c, "temperature", "0.1");
  sg::SetConfigValue(c, "align_speech_object", "false");
  sg::SetConfigValue(c, "room_x", "7.5");
  const std::string text = sg::ConfigToText(c);
  CHECK(sg::ParseConfig(text) == c);
  for (const auto &k : sg::ConfigKeys()) {
    CHECK_MESSAGE(text.find(k.key + " = ") != std::string::npos, k.key);
    CHECK(sg::GetConfigValue(c, k.key) == sg::GetConfigValue(sg::ParseConfig(text), k.key));
  }
  CHECK(std::stod(sg::GetConfigValue(c, "learning_rate")) == 0.0003);
  CHECK_THROWS_AS(sg::GetConfigValue(c, "nope"), sg::ConfigError);
}

TEST_CASE("validation") {
  sg::TrainConfig t;
  CHECK_NOTHROW(t.Validate());
  auto expect_bad = [](auto mutate) {
    sg::TrainConfig cfg;
    mutate(cfg);
    CHECK_THROWS_AS(cfg.Validate(), sg::ConfigError);
  };
  expect_bad([](sg::TrainConfig &c) { c.batch_size = 0; });
  expect_bad([](sg::TrainConfig &c) { c.learning_rate = 0; });
  expect_bad([](sg::TrainConfig &c) { c.clean_epochs = c.epochs + 1; });
  expect_bad([](sg::TrainConfig &c) { c.model.heads = 3; });
  expect_bad([](sg::TrainConfig &c) { c.alignment = {false, false, false}; });
  expect_bad([](sg::TrainConfig &c) { c.input.error_rate = 1.5; });
  expect_bad([](sg::TrainConfig &c) { c.input.rate_scale = 3.0; });
  expect_bad([](sg::TrainConfig &c) { c.loss.temperature = -1; });
  t.modules.ccm = false;
  t.alignment = {false, false, false};
  CHECK_NOTHROW(t.Validate());
}

}  // TEST_SUITE
