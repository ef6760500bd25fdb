// Copyright 2026 The mpt Authors
//
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

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mpt {

inline constexpr int kBodyJointCount = 25;
inline constexpr int kFaceLandmarkCount = 70;

/// BODY_25 joint indices used by name elsewhere in the pipeline.
namespace body25 {
inline constexpr int kNose = 0;
inline constexpr int kNeck = 1;
inline constexpr int kMidHip = 8;
inline constexpr int kRightHip = 9;
inline constexpr int kRightAnkle = 11;
inline constexpr int kLeftHip = 12;
inline constexpr int kLeftAnkle = 14;
inline constexpr int kRightEye = 15;
inline constexpr int kLeftEye = 16;
inline constexpr int kRightEar = 17;
inline constexpr int kLeftEar = 18;

inline constexpr std::array<int, 2> kAnkles = {kRightAnkle, kLeftAnkle};
inline constexpr std::array<int, 5> kHead = {kNose, kRightEye, kLeftEye,
                                             kRightEar, kLeftEar};
}  // namespace body25

/// One row per joint: (x, y, confidence). x/y are image pixels with the
/// origin at the top-left. A row with confidence 0 is missing.
using KeypointMatrix = Eigen::Matrix<double, Eigen::Dynamic, 3>;

struct Keypoint {
  double x = 0.0;
  double y = 0.0;
  double confidence = 0.0;

  bool valid() const { return confidence > 0.0; }
  bool operator==(const Keypoint&) const = default;
};

struct PersonPose {
  KeypointMatrix body = KeypointMatrix::Zero(kBodyJointCount, 3);
  std::optional<KeypointMatrix> face;

  Keypoint joint(int i) const {
    return {body(i, 0), body(i, 1), body(i, 2)};
  }
  bool joint_valid(int i) const { return body(i, 2) > 0.0; }
  void set_joint(int i, const Keypoint& k) {
    body.row(i) << k.x, k.y, k.confidence;
  }

  friend bool operator==(const PersonPose& a, const PersonPose& b);
};

struct FrameDetections {
  std::int64_t frame_index = 0;
  int image_width = 0;
  int image_height = 0;
  std::vector<PersonPose> people;

  friend bool operator==(const FrameDetections&,
                         const FrameDetections&) = default;
};

/// Slot i always denotes identity i of the closed set.
struct TrackedFrame {
  std::int64_t frame_index = 0;
  std::vector<std::optional<PersonPose>> slots;

  int filled_count() const;
  friend bool operator==(const TrackedFrame&, const TrackedFrame&) = default;
};

enum class SequenceRole { kSource, kTarget };

struct SequenceMeta {
  int person_count = 1;
  int width = 1;
  int height = 1;
  double frame_rate = 30.0;
  SequenceRole role = SequenceRole::kSource;

  friend bool operator==(const SequenceMeta&, const SequenceMeta&) = default;
};

const char* to_string(SequenceRole role);
SequenceRole parse_role(const std::string& s);

/// Verdict of validate_pose; `reason` names the first violated invariant.
struct Validation {
  bool ok = true;
  std::string reason;

  explicit operator bool() const { return ok; }
};

Validation validate_pose(const PersonPose& pose);
Validation validate_meta(const SequenceMeta& meta);

int valid_joint_count(const PersonPose& pose);

/// Usable for tracking or normalization: at least one valid ankle or hip
/// and at least four valid body joints.
bool is_usable(const PersonPose& pose);

/// Mean x over valid body joints; nullopt when none are valid.
std::optional<double> mean_valid_x(const PersonPose& pose);

/// Mean (x, y) of the valid ankles; nullopt when neither ankle is valid.
std::optional<Eigen::Vector2d> ankle_anchor(const PersonPose& pose);

}  // namespace mpt
