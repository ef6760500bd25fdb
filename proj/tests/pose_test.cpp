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

#include <algorithm>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "mpt/error.hpp"
#include "mpt/pose.hpp"
#include "mpt/synthetic.hpp"

namespace mpt {
namespace {

PersonPose full_pose(double conf = 0.9) {
  PersonPose p;
  for (int j = 0; j < kBodyJointCount; ++j) p.set_joint(j, {10.0 + j, 20.0 + j, conf});
  return p;
}

TEST(ValidatePose, WellFormed) {
  EXPECT_TRUE(validate_pose(full_pose()).ok);
}

TEST(ValidatePose, WrongBodyArity) {
  PersonPose p = full_pose();
  p.body.conservativeResize(24, 3);
  const auto v = validate_pose(p);
  EXPECT_FALSE(v.ok);
  EXPECT_NE(v.reason.find("body"), std::string::npos);
}

TEST(ValidatePose, SixtyEightPointFaceRejected) {
  PersonPose p = full_pose();
  p.face = KeypointMatrix::Constant(68, 3, 0.5);
  const auto v = validate_pose(p);
  EXPECT_FALSE(v.ok);
  EXPECT_NE(v.reason.find("face"), std::string::npos);
  p.face = KeypointMatrix::Constant(70, 3, 0.5);
  EXPECT_TRUE(validate_pose(p).ok);
}

TEST(ValidatePose, NonFiniteAndConfidenceRange) {
  PersonPose p = full_pose();
  p.body(3, 0) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_FALSE(validate_pose(p).ok);
  p = full_pose();
  p.body(3, 2) = 1.5;
  EXPECT_FALSE(validate_pose(p).ok);
  p.body(3, 2) = -0.1;
  EXPECT_FALSE(validate_pose(p).ok);
}

TEST(ValidateMeta, Bounds) {
  SequenceMeta m;
  EXPECT_TRUE(validate_meta(m).ok);
  m.person_count = 0;
  EXPECT_FALSE(validate_meta(m).ok);
  m.person_count = 1;
  m.width = 0;
  EXPECT_FALSE(validate_meta(m).ok);
}

TEST(ValidJointCount, MonotoneUnderZeroing) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    PersonPose p = full_pose();
    std::vector<int> order(kBodyJointCount);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    int prev = valid_joint_count(p);
    EXPECT_EQ(prev, 25);
    for (int j : order) {
      p.body(j, 2) = 0.0;
      const int now = valid_joint_count(p);
      EXPECT_LE(now, prev);
      prev = now;
    }
    EXPECT_EQ(prev, 0);
  }
}

TEST(Usable, NeedsLowerBodyAnchorAndFourJoints) {
  PersonPose p;
  p.set_joint(body25::kNose, {1, 1, 0.9});
  p.set_joint(body25::kNeck, {1, 2, 0.9});
  p.set_joint(2, {1, 3, 0.9});
  p.set_joint(5, {1, 4, 0.9});
  EXPECT_FALSE(is_usable(p));  // no hip or ankle
  p.set_joint(body25::kMidHip, {1, 5, 0.9});
  EXPECT_TRUE(is_usable(p));
  p.body(2, 2) = 0;
  p.body(5, 2) = 0;
  EXPECT_FALSE(is_usable(p));  // only three joints
}

TEST(AnkleAnchor, MeanOfValidAnkles) {
  PersonPose p;
  EXPECT_FALSE(ankle_anchor(p));
  p.set_joint(body25::kRightAnkle, {10, 400, 0.8});
  EXPECT_EQ(*ankle_anchor(p), Eigen::Vector2d(10, 400));
  p.set_joint(body25::kLeftAnkle, {20, 410, 0.8});
  EXPECT_EQ(*ankle_anchor(p), Eigen::Vector2d(15, 405));
}

TEST(MeanValidX, IgnoresMissing) {
  PersonPose p;
  EXPECT_FALSE(mean_valid_x(p));
  p.set_joint(0, {100, 0, 0.5});
  p.set_joint(1, {200, 0, 0.5});
  p.set_joint(2, {999, 0, 0.0});
  EXPECT_DOUBLE_EQ(*mean_valid_x(p), 150.0);
}

TEST(Role, ParseRoundTrip) {
  EXPECT_EQ(parse_role(to_string(SequenceRole::kSource)), SequenceRole::kSource);
  EXPECT_EQ(parse_role(to_string(SequenceRole::kTarget)), SequenceRole::kTarget);
  EXPECT_THROW(parse_role("neither"), Error);
}

TEST(StandingPose, TemplateIsUsableWithAnklesOnGround) {
  const PersonPose p = synthetic::standing_pose(100, 400, 120, true);
  EXPECT_TRUE(validate_pose(p).ok);
  EXPECT_TRUE(is_usable(p));
  EXPECT_DOUBLE_EQ((*ankle_anchor(p))(1), 400.0);
  ASSERT_TRUE(p.face);
  EXPECT_EQ(p.face->rows(), kFaceLandmarkCount);
}

}  // namespace
}  // namespace mpt
