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

#include "mpt/pose.hpp"

#include <cmath>

#include "mpt/error.hpp"

namespace mpt {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kUsage:
      return "usage";
    case ErrorKind::kData:
      return "data";
    case ErrorKind::kIo:
      return "io";
  }
  return "unknown";
}

bool operator==(const PersonPose& a, const PersonPose& b) {
  if (a.body.rows() != b.body.rows() || a.body != b.body) return false;
  if (a.face.has_value() != b.face.has_value()) return false;
  if (a.face && (a.face->rows() != b.face->rows() || *a.face != *b.face))
    return false;
  return true;
}

int TrackedFrame::filled_count() const {
  int n = 0;
  for (const auto& s : slots) n += s.has_value();
  return n;
}

const char* to_string(SequenceRole role) {
  return role == SequenceRole::kSource ? "source" : "target";
}

SequenceRole parse_role(const std::string& s) {
  if (s == "source") return SequenceRole::kSource;
  if (s == "target") return SequenceRole::kTarget;
  throw usage_error("unknown sequence role '" + s + "'");
}

namespace {

Validation check_block(const KeypointMatrix& m, const char* name) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const double c = m(i, 2);
    if (!std::isfinite(m(i, 0)) || !std::isfinite(m(i, 1)) ||
        !std::isfinite(c)) {
      return {false, std::string(name) + " keypoint " + std::to_string(i) +
                         " is not finite"};
    }
    if (c < 0.0 || c > 1.0) {
      return {false, std::string(name) + " keypoint " + std::to_string(i) +
                         " confidence outside [0, 1]"};
    }
  }
  return {};
}

}  // namespace

Validation validate_pose(const PersonPose& pose) {
  if (pose.body.rows() != kBodyJointCount) {
    return {false, "wrong body arity: " + std::to_string(pose.body.rows()) +
                       " keypoints, expected 25"};
  }
  if (pose.face && pose.face->rows() != kFaceLandmarkCount) {
    return {false, "wrong face arity: " + std::to_string(pose.face->rows()) +
                       " keypoints, expected 70"};
  }
  if (auto v = check_block(pose.body, "body"); !v) return v;
  if (pose.face) {
    if (auto v = check_block(*pose.face, "face"); !v) return v;
  }
  return {};
}

Validation validate_meta(const SequenceMeta& meta) {
  if (meta.person_count < 1) return {false, "person_count must be >= 1"};
  if (meta.width < 1 || meta.height < 1)
    return {false, "width and height must be >= 1"};
  return {};
}

int valid_joint_count(const PersonPose& pose) {
  return static_cast<int>((pose.body.col(2).array() > 0.0).count());
}

bool is_usable(const PersonPose& pose) {
  if (pose.body.rows() != kBodyJointCount) return false;
  const bool anchor =
      pose.joint_valid(body25::kRightAnkle) ||
      pose.joint_valid(body25::kLeftAnkle) ||
      pose.joint_valid(body25::kRightHip) ||
      pose.joint_valid(body25::kLeftHip) || pose.joint_valid(body25::kMidHip);
  return anchor && valid_joint_count(pose) >= 4;
}

std::optional<double> mean_valid_x(const PersonPose& pose) {
  double sum = 0.0;
  int n = 0;
  for (Eigen::Index i = 0; i < pose.body.rows(); ++i) {
    if (pose.body(i, 2) > 0.0) {
      sum += pose.body(i, 0);
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / n;
}

std::optional<Eigen::Vector2d> ankle_anchor(const PersonPose& pose) {
  Eigen::Vector2d sum = Eigen::Vector2d::Zero();
  int n = 0;
  for (int j : body25::kAnkles) {
    if (pose.joint_valid(j)) {
      sum += pose.body.block<1, 2>(j, 0).transpose();
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / n;
}

}  // namespace mpt
