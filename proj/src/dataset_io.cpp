// src/dataset_io.cpp

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

#include "speechground/dataset_io.hpp"

#include <cstdio>
#include <fstream>
#include "json.hpp"
#include <sstream>

namespace speechground {

using nlohmann::json;

namespace {

json VecToJson(const Vector3 &v) { return json::array({v[0], v[1], v[2]}); }

Vector3 VecFromJson(const json &j) {
  if (!j.is_array() || j.size() != 3) throw Error("expected a 3-vector");
  return Vector3(j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>());
}

json SceneToJson(const Scene &s) {
  json objects = json::array();
  for (const auto &o : s.objects) {
    objects.push_back({{"instance_id", o.instance_id},
                       {"class_id", o.class_id},
                       {"attribute_id", o.attribute_id},
                       {"center", VecToJson(o.box.center)},
                       {"size", VecToJson(o.box.size)}});
  }
  return {{"scene_id", s.scene_id},
          {"room_extent", VecToJson(s.room_extent)},
          {"point_seed", s.point_seed},
          {"objects", objects}};
}

Scene SceneFromJson(const json &j) {
  Scene s;
  s.scene_id = j.at("scene_id").get<std::string>();
  s.room_extent = VecFromJson(j.at("room_extent"));
  s.point_seed = j.at("point_seed").get<uint64_t>();
  for (const auto &o : j.at("objects")) {
    SceneObject obj;
    obj.instance_id = o.at("instance_id").get<int>();
    obj.class_id = o.at("class_id").get<int>();
    obj.attribute_id = o.at("attribute_id").get<int>();
    obj.box.center = VecFromJson(o.at("center"));
    obj.box.size = VecFromJson(o.at("size"));
    if ((obj.box.size.array() <= 0.0).any()) throw Error("box size must be positive");
    s.objects.push_back(obj);
  }
  return s;
}

json UtteranceToJson(const Utterance &u) {
  return {{"scene_id", u.scene_id},
          {"target_instance_id", u.target_instance_id},
          {"tokens", u.tokens},
          {"subset_tag", ToString(u.subset_tag)},
          {"corruption_seed", u.corruption_seed}};
}

Utterance UtteranceFromJson(const json &j) {
  Utterance u;
  u.scene_id = j.at("scene_id").get<std::string>();
  u.target_instance_id = j.at("target_instance_id").get<int>();
  u.tokens = j.at("tokens").get<std::vector<std::string>>();
  u.subset_tag = SubsetTagFromString(j.at("subset_tag").get<std::string>());
  u.corruption_seed = j.at("corruption_seed").get<uint64_t>();
  return u;
}

template <typename T, typename Fn>
std::vector<T> ReadJsonl(const std::filesystem::path &path, Fn parse) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::vector<T> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      out.push_back(parse(json::parse(line)));
    } catch (const std::exception &e) {
      throw ParseError(path.string(), lineno, e.what());
    }
  }
  return out;
}

}  // namespace

int Dataset::SceneIndex(const std::string &scene_id) const {
  for (size_t i = 0; i < scenes.size(); ++i)
    if (scenes[i].scene_id == scene_id) return static_cast<int>(i);
  throw Error("unknown scene id '" + scene_id + "'");
}

void SaveDataset(const Dataset &dataset, const std::filesystem::path &dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / kScenesFile);
    if (!out) throw Error("cannot write " + (dir / kScenesFile).string());
    for (const auto &s : dataset.scenes) out << SceneToJson(s).dump() << '\n';
  }
  std::ofstream out(dir / kUtterancesFile);
  if (!out) throw Error("cannot write " + (dir / kUtterancesFile).string());
  for (const auto &u : dataset.utterances) out << UtteranceToJson(u).dump() << '\n';
}

Dataset LoadDataset(const std::filesystem::path &dir) {
  Dataset d;
  d.scenes = ReadJsonl<Scene>(dir / kScenesFile, SceneFromJson);
  d.utterances = ReadJsonl<Utterance>(dir / kUtterancesFile, UtteranceFromJson);
  std::unordered_map<std::string, int> index;
  for (size_t i = 0; i < d.scenes.size(); ++i) index[d.scenes[i].scene_id] = static_cast<int>(i);
  for (size_t i = 0; i < d.utterances.size(); ++i) {
    auto it = index.find(d.utterances[i].scene_id);
    if (it == index.end() || !d.scenes[it->second].HasObject(d.utterances[i].target_instance_id))
      throw ParseError((dir / kUtterancesFile).string(), static_cast<int>(i) + 1,
                       "utterance refers to a missing scene or target");
  }
  return d;
}

Dataset GenerateDataset(const DatasetSpec &spec, const GenConfig &cfg) {
  Dataset d;
  for (int i = 0; i < spec.num_scenes; ++i) {
    Scene s = GenerateScene(MixSeed(spec.seed, static_cast<uint64_t>(i)), cfg);
    char id[64];
    std::snprintf(id, sizeof(id), "%s%05d", spec.id_prefix.c_str(), i);
    s.scene_id = id;
    Rng rng(MixSeed(spec.seed ^ 0x7a26e7ULL, static_cast<uint64_t>(i)));
    for (int k = 0; k < spec.utterances_per_scene; ++k) {
      const auto &target =
          s.objects[UniformInt(rng, 0, static_cast<int>(s.objects.size()) - 1)];
      d.utterances.push_back(GenerateUtterance(s, target.instance_id, rng(), cfg));
    }
    d.scenes.push_back(std::move(s));
  }
  return d;
}

SubsetCounts CountSubsets(const Dataset &dataset) {
  SubsetCounts c;
  for (const auto &u : dataset.utterances)
    (u.subset_tag == SubsetTag::kUnique ? c.unique : c.multiple) += 1;
  return c;
}

}  // namespace speechground
