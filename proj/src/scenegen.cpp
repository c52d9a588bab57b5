// src/scenegen.cpp

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

#include "speechground/scenegen.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "speechground/vocabulary.hpp"

namespace speechground {

bool Box3D::Contains(const Vector3 &p) const {
  Vector3 lo = min_corner(), hi = max_corner();
  return (p.array() >= lo.array()).all() && (p.array() <= hi.array()).all();
}

double Iou(const Box3D &a, const Box3D &b) {
  Vector3 lo = a.min_corner().cwiseMax(b.min_corner());
  Vector3 hi = a.max_corner().cwiseMin(b.max_corner());
  Vector3 ext = (hi - lo).cwiseMax(0.0);
  double inter = ext.prod();
  if (inter <= 0.0) return 0.0;
  double uni = a.volume() + b.volume() - inter;
  return std::clamp(inter / uni, 0.0, 1.0);
}

const SceneObject &Scene::Object(int instance_id) const {
  for (const auto &o : objects)
    if (o.instance_id == instance_id) return o;
  throw Error("scene " + scene_id + " has no instance " + std::to_string(instance_id));
}

bool Scene::HasObject(int instance_id) const {
  return std::any_of(objects.begin(), objects.end(),
                     [&](const SceneObject &o) { return o.instance_id == instance_id; });
}

Vector3 ClassSizePrior(int class_id) {
  static const std::array<Vector3, 8> kPriors = {
      Vector3(0.55, 0.55, 0.90),  // chair
      Vector3(1.40, 0.90, 0.75),  // table
      Vector3(2.00, 1.50, 0.55),  // bed
      Vector3(2.00, 0.90, 0.85),  // sofa
      Vector3(1.20, 0.60, 0.75),  // desk
      Vector3(0.35, 0.35, 1.60),  // lamp
      Vector3(0.90, 0.40, 1.90),  // shelf
      Vector3(0.90, 0.15, 2.00),  // door
  };
  return kPriors.at(class_id);
}

Vector3 AttributeColor(int attribute_id) {
  static const std::array<Vector3, 6> kColors = {
      Vector3(0.50, 0.50, 0.50),  // grey
      Vector3(0.95, 0.95, 0.95),  // white
      Vector3(0.55, 0.35, 0.20),  // brown
      Vector3(0.08, 0.08, 0.08),  // black
      Vector3(0.85, 0.10, 0.10),  // red
      Vector3(0.10, 0.20, 0.85),  // blue
  };
  return kColors.at(attribute_id);
}

namespace {

const Vector3 kFloorColor(0.62, 0.58, 0.52);

Box3D RandomClassBox(int class_id, const Vector3 &room, Rng &rng) {
  Vector3 size = ClassSizePrior(class_id);
  for (int d = 0; d < 3; ++d) size[d] *= Uniform(rng, 0.85, 1.15);
  if (Uniform(rng, 0.0, 1.0) < 0.5) std::swap(size[0], size[1]);
  for (int d = 0; d < 3; ++d) size[d] = std::min(size[d], room[d]);
  Box3D box;
  box.size = size;
  box.center[0] = Uniform(rng, size[0] / 2, room[0] - size[0] / 2);
  box.center[1] = Uniform(rng, size[1] / 2, room[1] - size[1] / 2);
  box.center[2] = size[2] / 2;
  return box;
}

}  // namespace

Scene GenerateScene(uint64_t seed, const GenConfig &cfg) {
  const Vocabulary &vocab = Vocabulary::Get();
  if (cfg.min_objects < 2 || cfg.max_objects < cfg.min_objects)
    throw Error("invalid object count range");
  Rng rng(MixSeed(seed, 0x5ce7e));
  Scene scene;
  scene.scene_id = "scene_" + std::to_string(seed);
  scene.room_extent = cfg.room_extent;
  scene.point_seed = MixSeed(seed, 0x9017);
  int count = UniformInt(rng, cfg.min_objects, cfg.max_objects);
  for (int i = 0; i < count; ++i) {
    int class_id;
    if (!scene.objects.empty() && Uniform(rng, 0.0, 1.0) < cfg.class_repeat_prob) {
      class_id = scene.objects[UniformInt(rng, 0, static_cast<int>(scene.objects.size()) - 1)]
                     .class_id;
    } else {
      class_id = UniformInt(rng, 0, vocab.num_classes() - 1);
    }
    // Same-class objects get distinct attributes so every target is
    // describable by its attribute and class alone.
    std::vector<int> free_attrs;
    for (int a = 0; a < vocab.num_attributes(); ++a) {
      bool used = std::any_of(scene.objects.begin(), scene.objects.end(),
                              [&](const SceneObject &o) {
                                return o.class_id == class_id && o.attribute_id == a;
                              });
      if (!used) free_attrs.push_back(a);
    }
    if (free_attrs.empty()) {
      --i;  // redraw the class
      continue;
    }
    int attribute_id = free_attrs[UniformInt(rng, 0, static_cast<int>(free_attrs.size()) - 1)];

    bool placed = false;
    for (int attempt = 0; attempt < cfg.max_placement_attempts && !placed; ++attempt) {
      Box3D box = RandomClassBox(class_id, cfg.room_extent, rng);
      bool ok = std::all_of(scene.objects.begin(), scene.objects.end(),
                            [&](const SceneObject &o) { return Iou(o.box, box) <= cfg.max_pair_iou; });
      if (ok) {
        scene.objects.push_back({i, box, class_id, attribute_id});
        placed = true;
      }
    }
    if (!placed)
      throw PlacementError("placement failed: could not place object " + std::to_string(i) +
                           " of " + std::to_string(count) + " after " +
                           std::to_string(cfg.max_placement_attempts) + " attempts (seed " +
                           std::to_string(seed) + ")");
  }
  return scene;
}

std::string ToString(SubsetTag tag) {
  return tag == SubsetTag::kUnique ? "unique" : "multiple";
}

SubsetTag SubsetTagFromString(const std::string &s) {
  if (s == "unique") return SubsetTag::kUnique;
  if (s == "multiple") return SubsetTag::kMultiple;
  throw Error("bad subset tag '" + s + "'");
}

SubsetTag SubsetLabel(const Scene &scene, int target_class) {
  auto n = std::count_if(scene.objects.begin(), scene.objects.end(),
                         [&](const SceneObject &o) { return o.class_id == target_class; });
  return n == 1 ? SubsetTag::kUnique : SubsetTag::kMultiple;
}

Utterance GenerateUtterance(const Scene &scene, int target_instance_id, uint64_t seed,
                            const GenConfig &cfg) {
  const Vocabulary &vocab = Vocabulary::Get();
  const SceneObject &target = scene.Object(target_instance_id);
  Rng rng(MixSeed(seed, 0x07e4));

  Utterance utt;
  utt.scene_id = scene.scene_id;
  utt.target_instance_id = target_instance_id;
  utt.corruption_seed = MixSeed(seed, 0xc0de);
  utt.subset_tag = SubsetLabel(scene, target.class_id);

  auto &t = utt.tokens;
  if (Uniform(rng, 0.0, 1.0) < 0.5) {
    t = {"the"};
  } else {
    t = {"there", "is", "a"};
  }
  t.push_back(vocab.AttributeName(target.attribute_id));
  if (target.class_id == 0 && Uniform(rng, 0.0, 1.0) < cfg.office_prob) t.push_back("office");
  t.push_back(vocab.ClassName(target.class_id));

  if (scene.objects.size() > 1 && Uniform(rng, 0.0, 1.0) < cfg.relation_prob) {
    const SceneObject *anchor = nullptr;
    double best = 1e300;
    for (const auto &o : scene.objects) {
      if (o.instance_id == target_instance_id) continue;
      double d = (o.box.center - target.box.center).head<2>().norm();
      if (d < best) {
        best = d;
        anchor = &o;
      }
    }
    Vector3 delta = target.box.center - anchor->box.center;
    if (std::abs(delta[0]) > 2.0 * std::abs(delta[1]) && std::abs(delta[0]) > 0.5) {
      t.push_back(delta[0] < 0 ? "left" : "right");
      t.push_back("of");
    } else {
      switch (UniformInt(rng, 0, 2)) {
        case 0:
          t.insert(t.end(), {"next", "to"});
          break;
        case 1:
          t.push_back("near");
          break;
        default:
          t.push_back("beside");
      }
    }
    t.push_back("the");
    t.push_back(vocab.ClassName(anchor->class_id));
  }
  return utt;
}

PointCloud SamplePoints(const Scene &scene, int n, uint64_t seed, const GenConfig &cfg) {
  if (n <= 0) throw Error("sample_points: n must be positive");
  Rng rng(MixSeed(seed, 0x9a11));
  PointCloud cloud;
  cloud.points.resize(n, 3 + kAuxChannels);

  int n_floor = static_cast<int>(std::lround(n * cfg.floor_fraction));
  if (scene.objects.empty()) n_floor = n;
  int n_objects = n - n_floor;

  // Largest-remainder allocation proportional to box volume.
  std::vector<int> alloc(scene.objects.size(), 0);
  if (!scene.objects.empty()) {
    double total = 0.0;
    for (const auto &o : scene.objects) total += o.box.volume();
    std::vector<std::pair<double, int>> remainders;
    int assigned = 0;
    for (size_t i = 0; i < scene.objects.size(); ++i) {
      double share = n_objects * scene.objects[i].box.volume() / total;
      alloc[i] = static_cast<int>(std::floor(share));
      assigned += alloc[i];
      remainders.emplace_back(share - alloc[i], static_cast<int>(i));
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto &a, const auto &b) { return a.first > b.first; });
    for (int k = 0; assigned < n_objects; ++k, ++assigned) alloc[remainders[k].second] += 1;
  }

  int row = 0;
  auto emit = [&](const Vector3 &p, const Vector3 &color) {
    cloud.points.row(row).head<3>() = p.transpose();
    for (int c = 0; c < kAuxChannels; ++c)
      cloud.points(row, 3 + c) = color[c] + cfg.color_noise * Gaussian(rng);
    ++row;
  };
  for (size_t i = 0; i < scene.objects.size(); ++i) {
    const auto &o = scene.objects[i];
    Vector3 lo = o.box.min_corner(), hi = o.box.max_corner();
    Vector3 color = AttributeColor(o.attribute_id);
    for (int k = 0; k < alloc[i]; ++k) {
      Vector3 p(Uniform(rng, lo[0], hi[0]), Uniform(rng, lo[1], hi[1]), Uniform(rng, lo[2], hi[2]));
      emit(p, color);
    }
  }
  for (int k = 0; k < n_floor; ++k) {
    Vector3 p(Uniform(rng, 0.0, scene.room_extent[0]), Uniform(rng, 0.0, scene.room_extent[1]),
              0.0);
    emit(p, kFloorColor);
  }
  return cloud;
}

ProposalSet ProposeBoxes(const Scene &scene, int target_instance_id, int num_proposals,
                         double jitter, uint64_t seed) {
  const Vocabulary &vocab = Vocabulary::Get();
  if (num_proposals < static_cast<int>(scene.objects.size()))
    throw Error("propose_boxes: M must be at least the number of objects");
  const SceneObject &target = scene.Object(target_instance_id);
  Rng rng(MixSeed(seed, 0xb0c5));

  auto perturb = [&](const Box3D &gt) {
    Box3D b = gt;
    for (int d = 0; d < 3; ++d) {
      b.center[d] += Uniform(rng, -jitter, jitter);
      b.size[d] = std::max(0.05, b.size[d] + Uniform(rng, -jitter, jitter));
    }
    return b;
  };

  ProposalSet set;
  for (const auto &o : scene.objects) {
    Box3D b = perturb(o.box);
    if (o.instance_id == target.instance_id) {
      int tries = 0;
      while (Iou(b, o.box) < 0.5) {
        b = ++tries < 10000 ? perturb(o.box) : o.box;
      }
    }
    set.boxes.push_back(b);
    set.source_instance.push_back(o.instance_id);
  }
  while (set.size() < num_proposals) {
    int cls = UniformInt(rng, 0, vocab.num_classes() - 1);
    set.boxes.push_back(RandomClassBox(cls, scene.room_extent, rng));
    set.source_instance.push_back(-1);
  }

  // Fisher-Yates so the target position carries no information.
  for (int i = set.size() - 1; i > 0; --i) {
    int j = UniformInt(rng, 0, i);
    std::swap(set.boxes[i], set.boxes[j]);
    std::swap(set.source_instance[i], set.source_instance[j]);
  }
  return set;
}

}  // namespace speechground
