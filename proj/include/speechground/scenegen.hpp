// include/speechground/scenegen.hpp

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

#ifndef SPEECHGROUND_SCENEGEN_HPP_
#define SPEECHGROUND_SCENEGEN_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "speechground/common.hpp"
#include "speechground/matrix.hpp"

namespace speechground {

class PlacementError : public Error {
 public:
  using Error::Error;
};

/// Axis-aligned box given by its center and full edge lengths (meters).
struct Box3D {
  Vector3 center = Vector3::Zero();
  Vector3 size = Vector3::Ones();

  Vector3 min_corner() const { return center - 0.5 * size; }
  Vector3 max_corner() const { return center + 0.5 * size; }
  double volume() const { return size.prod(); }
  bool Contains(const Vector3 &p) const;
  bool operator==(const Box3D &) const = default;
};

/// Intersection volume over union volume; 0 for disjoint boxes.
double Iou(const Box3D &a, const Box3D &b);

struct SceneObject {
  int instance_id = 0;
  Box3D box;
  int class_id = 0;
  int attribute_id = 0;
  bool operator==(const SceneObject &) const = default;
};

struct Scene {
  std::string scene_id;
  std::vector<SceneObject> objects;
  Vector3 room_extent = Vector3(6.0, 6.0, 3.0);
  uint64_t point_seed = 0;

  const SceneObject &Object(int instance_id) const;
  bool HasObject(int instance_id) const;
  bool operator==(const Scene &) const = default;
};

struct GenConfig {
  Vector3 room_extent = Vector3(6.0, 6.0, 3.0);
  int min_objects = 4;
  int max_objects = 9;
  // Probability that a new object reuses an already placed class; controls
  // the unique/multiple balance.
  double class_repeat_prob = 0.45;
  double max_pair_iou = 0.05;
  int max_placement_attempts = 400;
  double relation_prob = 0.5;
  double office_prob = 0.2;
  double floor_fraction = 0.15;
  double color_noise = 0.03;
  bool operator==(const GenConfig &) const = default;
};

Scene GenerateScene(uint64_t seed, const GenConfig &cfg);

/// Nominal (sx, sy, sz) footprint of each object class.
Vector3 ClassSizePrior(int class_id);
/// Pseudo-RGB color of an attribute.
Vector3 AttributeColor(int attribute_id);

enum class SubsetTag { kUnique, kMultiple };

std::string ToString(SubsetTag tag);
SubsetTag SubsetTagFromString(const std::string &s);

SubsetTag SubsetLabel(const Scene &scene, int target_class);

struct Utterance {
  std::string scene_id;
  int target_instance_id = 0;
  std::vector<std::string> tokens;
  SubsetTag subset_tag = SubsetTag::kUnique;
  uint64_t corruption_seed = 0;
  bool operator==(const Utterance &) const = default;
};

/// Template "[the | there is a] <attribute> [office] <class> [<relation> the
/// <anchor class>]". Throws Error on an unknown target id.
Utterance GenerateUtterance(const Scene &scene, int target_instance_id,
                            uint64_t seed, const GenConfig &cfg = {});

/// N x (3 + 3): xyz followed by attribute-conditioned pseudo-color.
struct PointCloud {
  Matrix points;
  int num_points() const { return static_cast<int>(points.rows()); }
};

inline constexpr int kAuxChannels = 3;

PointCloud SamplePoints(const Scene &scene, int n, uint64_t seed,
                        const GenConfig &cfg = {});

struct ProposalSet {
  std::vector<Box3D> boxes;
  std::vector<int> source_instance;  // -1 for random distractors
  int size() const { return static_cast<int>(boxes.size()); }
};

/// One jittered box per object plus random distractors, in shuffled order.
/// The target's jitter is redrawn until its IoU with the ground truth is at
/// least 0.5.
ProposalSet ProposeBoxes(const Scene &scene, int target_instance_id, int num_proposals,
                         double jitter, uint64_t seed);

}  // namespace speechground

#endif  // SPEECHGROUND_SCENEGEN_HPP_
