// src/config.cpp

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

#include "speechground/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

namespace speechground {

void TrainConfig::Validate() const {
  if (epochs < 0) throw ConfigError("epochs must be >= 0");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate))
    throw ConfigError("learning_rate must be positive");
  if (max_steps < 0) throw ConfigError("max_steps must be >= 0");
  if (train_limit < 0) throw ConfigError("train_limit must be >= 0");
  if (eval_every < 0) throw ConfigError("eval_every must be >= 0");
  if (clean_epochs < 0 || clean_epochs > epochs)
    throw ConfigError("clean_epochs must lie in [0, epochs]");
  loss.Validate();
  if (model.d_model < 1 || model.heads < 1 || model.d_model % model.heads != 0)
    throw ConfigError("d_model must be a positive multiple of heads");
  if (model.ffn_hidden < 1 || model.score_hidden < 1)
    throw ConfigError("hidden widths must be positive");
  if (modules.ccm && !alignment.any())
    throw ConfigError("ccm is on but no alignment pair is enabled");
  if (input.num_proposals < 1) throw ConfigError("num_proposals must be >= 1");
  if (!(input.proposal_jitter >= 0.0)) throw ConfigError("proposal_jitter must be >= 0");
  if (input.points_per_scene < 1) throw ConfigError("points_per_scene must be >= 1");
  if (!(input.error_rate >= 0.0 && input.error_rate <= 1.0))
    throw ConfigError("error_rate must lie in [0, 1]");
  if (!(input.rate_scale >= 0.5 && input.rate_scale <= 2.0))
    throw ConfigError("rate_scale must lie in [0.5, 2]");
  if (!(input.noise_level >= 0.0) || !std::isfinite(input.noise_level))
    throw ConfigError("noise_level must be >= 0");
}

namespace {

std::string FormatDouble(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::string Trim(const std::string &s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void BadValue(const std::string &key, const std::string &value,
                           const std::string &expected) {
  throw ConfigError("bad value '" + value + "' for config key '" + key + "' (expected " +
                    expected + ")");
}

template <class T>
T ParseInteger(const std::string &key, const std::string &value) {
  T out{};
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size() || value.empty())
    BadValue(key, value, "an integer");
  return out;
}

double ParseReal(const std::string &key, const std::string &value) {
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size() || value.empty() ||
      !std::isfinite(out))
    BadValue(key, value, "a finite number");
  return out;
}

bool ParseBool(const std::string &key, const std::string &value) {
  if (value == "true" || value == "1" || value == "on" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "off" || value == "no") return false;
  BadValue(key, value, "true or false");
}

struct Entry {
  std::string key;
  std::string doc;
  std::function<std::string(const Config &)> get;
  std::function<void(Config &, const std::string &)> set;
};

template <class Access>
Entry IntEntry(std::string key, std::string doc, Access access) {
  return {key, std::move(doc),
          [access](const Config &c) { return std::to_string(access(const_cast<Config &>(c))); },
          [access, key](Config &c, const std::string &v) {
            access(c) = ParseInteger<std::remove_reference_t<decltype(access(c))>>(key, v);
          }};
}

template <class Access>
Entry RealEntry(std::string key, std::string doc, Access access) {
  return {key, std::move(doc),
          [access](const Config &c) { return FormatDouble(access(const_cast<Config &>(c))); },
          [access, key](Config &c, const std::string &v) { access(c) = ParseReal(key, v); }};
}

template <class Access>
Entry BoolEntry(std::string key, std::string doc, Access access) {
  return {key, std::move(doc),
          [access](const Config &c) {
            return std::string(access(const_cast<Config &>(c)) ? "true" : "false");
          },
          [access, key](Config &c, const std::string &v) { access(c) = ParseBool(key, v); }};
}

#define SG_FIELD(expr) [](Config & c) -> auto & { return expr; }

const std::vector<Entry> &Entries() {
  static const std::vector<Entry> entries = [] {
    std::vector<Entry> e;
    // Training.
    e.push_back(IntEntry("seed", "master seed for initialization and batching", SG_FIELD(c.train.seed)));
    e.push_back(IntEntry("epochs", "training epochs", SG_FIELD(c.train.epochs)));
    e.push_back(IntEntry("batch_size", "utterances per optimizer step", SG_FIELD(c.train.batch_size)));
    e.push_back(RealEntry("learning_rate", "Adam step size", SG_FIELD(c.train.learning_rate)));
    e.push_back(IntEntry("max_steps", "stop after this many steps (0 = no limit)", SG_FIELD(c.train.max_steps)));
    e.push_back(IntEntry("train_limit", "use only the first n training utterances (0 = all)", SG_FIELD(c.train.train_limit)));
    e.push_back(IntEntry("eval_every", "validate every k epochs (0 = final only)", SG_FIELD(c.train.eval_every)));
    e.push_back(IntEntry("clean_epochs", "leading epochs trained without rate/noise perturbation", SG_FIELD(c.train.clean_epochs)));
    e.push_back(BoolEntry("calibrate_gammas", "rescale gamma1..3 from the first batch", SG_FIELD(c.train.calibrate_gammas)));
    // Losses.
    e.push_back(RealEntry("alpha1", "weight of the speech reference loss", SG_FIELD(c.train.loss.alpha1)));
    e.push_back(RealEntry("alpha2", "weight of the text reference loss", SG_FIELD(c.train.loss.alpha2)));
    e.push_back(RealEntry("beta", "speech share of the fused score", SG_FIELD(c.train.loss.beta)));
    e.push_back(RealEntry("gamma1", "weight of the contrastive loss", SG_FIELD(c.train.loss.gamma1)));
    e.push_back(RealEntry("gamma2", "weight of the reference loss", SG_FIELD(c.train.loss.gamma2)));
    e.push_back(RealEntry("gamma3", "weight of the speech classification loss", SG_FIELD(c.train.loss.gamma3)));
    e.push_back(RealEntry("temperature", "contrastive temperature", SG_FIELD(c.train.loss.temperature)));
    e.push_back({"contrastive_mode", "six (mean of directional terms) or four (grouped)",
                 [](const Config &c) {
                   return std::string(c.train.loss.contrastive_mode == ContrastiveMode::kSixTerm
                                          ? "six"
                                          : "four");
                 },
                 [](Config &c, const std::string &v) {
                   if (v == "six")
                     c.train.loss.contrastive_mode = ContrastiveMode::kSixTerm;
                   else if (v == "four")
                     c.train.loss.contrastive_mode = ContrastiveMode::kFourGroup;
                   else
                     BadValue("contrastive_mode", v, "six or four");
                 }});
    // Modules.
    e.push_back(BoolEntry("sll", "phonetic refinement and speech classification", SG_FIELD(c.train.modules.sll)));
    e.push_back(BoolEntry("cbm", "speech scores fused with text scores", SG_FIELD(c.train.modules.cbm)));
    e.push_back(BoolEntry("ccm", "contrastive alignment of speech, text and object", SG_FIELD(c.train.modules.ccm)));
    e.push_back(BoolEntry("align_text_object", "contrastive pair T&O", SG_FIELD(c.train.alignment.text_object)));
    e.push_back(BoolEntry("align_speech_object", "contrastive pair S&O", SG_FIELD(c.train.alignment.speech_object)));
    e.push_back(BoolEntry("align_text_speech", "contrastive pair T&S", SG_FIELD(c.train.alignment.text_speech)));
    // Model.
    e.push_back(IntEntry("d_model", "feature width of every encoder", SG_FIELD(c.train.model.d_model)));
    e.push_back(IntEntry("heads", "attention heads", SG_FIELD(c.train.model.heads)));
    e.push_back(IntEntry("ffn_hidden", "matcher feed-forward width", SG_FIELD(c.train.model.ffn_hidden)));
    e.push_back(IntEntry("score_hidden", "score head hidden width", SG_FIELD(c.train.model.score_hidden)));
    e.push_back(BoolEntry("share_matcher", "one matcher for both branches", SG_FIELD(c.train.model.share_matcher)));
    e.push_back(BoolEntry("logit_fusion", "fuse logits instead of probabilities", SG_FIELD(c.train.model.logit_fusion)));
    // Inputs.
    e.push_back(IntEntry("num_proposals", "candidate boxes per utterance", SG_FIELD(c.train.input.num_proposals)));
    e.push_back(RealEntry("proposal_jitter", "relative jitter of proposal boxes", SG_FIELD(c.train.input.proposal_jitter)));
    e.push_back(IntEntry("points_per_scene", "sampled points per scene", SG_FIELD(c.train.input.points_per_scene)));
    e.push_back(RealEntry("error_rate", "transcription substitution probability", SG_FIELD(c.train.input.error_rate)));
    e.push_back(RealEntry("rate_scale", "speaking rate multiplier in [0.5, 2]", SG_FIELD(c.train.input.rate_scale)));
    e.push_back(RealEntry("noise_level", "spectrogram noise standard deviation", SG_FIELD(c.train.input.noise_level)));
    // Scene generation.
    e.push_back(IntEntry("scenes", "training scenes", SG_FIELD(c.scenes)));
    e.push_back(IntEntry("val_scenes", "validation scenes", SG_FIELD(c.val_scenes)));
    e.push_back(IntEntry("utterances_per_scene", "training utterances per scene", SG_FIELD(c.utterances_per_scene)));
    e.push_back(IntEntry("val_utterances_per_scene", "validation utterances per scene", SG_FIELD(c.val_utterances_per_scene)));
    e.push_back(RealEntry("room_x", "room extent along x (m)", SG_FIELD(c.gen.room_extent[0])));
    e.push_back(RealEntry("room_y", "room extent along y (m)", SG_FIELD(c.gen.room_extent[1])));
    e.push_back(RealEntry("room_z", "room height (m)", SG_FIELD(c.gen.room_extent[2])));
    e.push_back(IntEntry("min_objects", "fewest objects per scene", SG_FIELD(c.gen.min_objects)));
    e.push_back(IntEntry("max_objects", "most objects per scene", SG_FIELD(c.gen.max_objects)));
    e.push_back(RealEntry("class_repeat_prob", "chance a new object repeats a placed class", SG_FIELD(c.gen.class_repeat_prob)));
    e.push_back(RealEntry("max_pair_iou", "largest allowed IoU between placed objects", SG_FIELD(c.gen.max_pair_iou)));
    e.push_back(IntEntry("max_placement_attempts", "rejection-sampling budget per object", SG_FIELD(c.gen.max_placement_attempts)));
    e.push_back(RealEntry("relation_prob", "chance an utterance names a nearby anchor", SG_FIELD(c.gen.relation_prob)));
    e.push_back(RealEntry("office_prob", "chance a chair is called an office chair", SG_FIELD(c.gen.office_prob)));
    e.push_back(RealEntry("floor_fraction", "share of points sampled on the floor", SG_FIELD(c.gen.floor_fraction)));
    e.push_back(RealEntry("color_noise", "per-point color noise", SG_FIELD(c.gen.color_noise)));
    e.push_back({"data_dir", "dataset directory read by train/eval/ablate",
                 [](const Config &c) { return c.data_dir; },
                 [](Config &c, const std::string &v) {
                   if (v.empty()) BadValue("data_dir", v, "a path");
                   c.data_dir = v;
                 }});
    // Gradient check.
    e.push_back(IntEntry("gradcheck_samples", "batch size of the gradient check", SG_FIELD(c.gradcheck_samples)));
    e.push_back(IntEntry("gradcheck_proposals", "proposals per utterance in the gradient check", SG_FIELD(c.gradcheck_proposals)));
    e.push_back(IntEntry("gradcheck_entries", "entries probed per tensor (0 = all)", SG_FIELD(c.gradcheck_entries)));
    e.push_back(RealEntry("gradcheck_epsilon", "central difference step", SG_FIELD(c.gradcheck_epsilon)));
    return e;
  }();
  return entries;
}

#undef SG_FIELD

const Entry &FindEntry(const std::string &key) {
  for (const auto &e : Entries())
    if (e.key == key) return e;
  throw ConfigError("unknown config key '" + key + "'");
}

}  // namespace

void SetConfigValue(Config &cfg, const std::string &key, const std::string &value) {
  FindEntry(key).set(cfg, Trim(value));
}

std::string GetConfigValue(const Config &cfg, const std::string &key) {
  return FindEntry(key).get(cfg);
}

Config ParseConfig(const std::string &text, const std::string &source) {
  Config cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = Trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(source + ":" + std::to_string(lineno) + ": expected key = value");
    std::string key = Trim(line.substr(0, eq));
    try {
      SetConfigValue(cfg, key, line.substr(eq + 1));
    } catch (const ConfigError &e) {
      throw ConfigError(source + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return cfg;
}

Config LoadConfig(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ParseConfig(ss.str(), path.string());
}

std::string ConfigToText(const Config &cfg) {
  std::string out;
  for (const auto &e : Entries()) out += e.key + " = " + e.get(cfg) + "\n";
  return out;
}

const std::vector<ConfigKeyInfo> &ConfigKeys() {
  static const std::vector<ConfigKeyInfo> keys = [] {
    std::vector<ConfigKeyInfo> k;
    for (const auto &e : Entries()) k.push_back({e.key, e.doc});
    return k;
  }();
  return keys;
}

}  // namespace speechground
