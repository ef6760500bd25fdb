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
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "mpt/error.hpp"
#include "mpt/synthetic.hpp"
#include "mpt/tracking.hpp"

namespace mpt {
namespace {

PersonPose at_x(double x, double y = 300.0) {
  return synthetic::standing_pose(x, y, 100.0);
}

FrameDetections frame(std::int64_t idx, std::vector<PersonPose> people) {
  FrameDetections f;
  f.frame_index = idx;
  f.image_width = 1024;
  f.image_height = 512;
  f.people = std::move(people);
  return f;
}

TEST(PoseDistance, IdentityIsZero) {
  const PersonPose a = at_x(100);
  EXPECT_EQ(*pose_distance(a, a), 0.0);
}

TEST(PoseDistance, UniformTranslation) {
  const PersonPose a = at_x(100);
  PersonPose b = a;
  b.body.col(0).array() += 3.0;
  b.body.col(1).array() += 4.0;
  EXPECT_NEAR(*pose_distance(a, b), 5.0, 1e-12);
}

TEST(PoseDistance, DisjointSupportIsIncomparable) {
  PersonPose a, b;
  a.set_joint(0, {0, 0, 1});
  a.set_joint(1, {0, 1, 1});
  b.set_joint(2, {0, 2, 1});
  b.set_joint(3, {0, 3, 1});
  EXPECT_FALSE(pose_distance(a, b, {3}));
}

TEST(PoseDistance, MinSharedThreshold) {
  PersonPose a, b;
  for (int j = 0; j < 3; ++j) {
    a.set_joint(j, {double(j), 0, 1});
    b.set_joint(j, {double(j), 2, 1});
  }
  EXPECT_NEAR(*pose_distance(a, b, {3}), 2.0, 1e-12);
  EXPECT_FALSE(pose_distance(a, b, {4}));
}

TEST(InitTracks, LeftToRight) {
  const auto r = init_tracks({frame(0, {at_x(300), at_x(100)})}, 2);
  ASSERT_TRUE(r);
  EXPECT_EQ(*mean_valid_x(*r->first.slots[0]), *mean_valid_x(at_x(100)));
  EXPECT_EQ(*mean_valid_x(*r->first.slots[1]), *mean_valid_x(at_x(300)));
}

TEST(InitTracks, SkipsOverDetectedFrames) {
  std::vector<FrameDetections> frames;
  for (int t = 0; t < 4; ++t)
    frames.push_back(frame(t, {at_x(100), at_x(300), at_x(500)}));
  frames.push_back(frame(4, {at_x(100), at_x(300)}));
  const auto r = init_tracks(frames, 2);
  ASSERT_TRUE(r);
  EXPECT_EQ(r->position, 4u);
  EXPECT_EQ(r->skipped, 4u);
  EXPECT_EQ(r->first.frame_index, 4);
}

TEST(InitTracks, TieGoesToLowerDetectorIndex) {
  PersonPose a = at_x(200, 300), b = at_x(200, 100);
  const auto r = init_tracks({frame(0, {a, b})}, 2);
  ASSERT_TRUE(r);
  EXPECT_EQ(*r->first.slots[0], a);
  EXPECT_EQ(*r->first.slots[1], b);
}

TEST(AssignFrame, NearestNeighbourAfterDetectorSwap) {
  auto r = init_tracks({frame(0, {at_x(100), at_x(300)})}, 2);
  ASSERT_TRUE(r);
  const PersonPose d290 = at_x(290), d110 = at_x(110);
  const auto out = assign_frame(r->state, frame(1, {d290, d110}));
  ASSERT_TRUE(out);
  EXPECT_EQ(*out->slots[0], d110);
  EXPECT_EQ(*out->slots[1], d290);
}

TEST(AssignFrame, OverDetectionDrops) {
  auto r = init_tracks({frame(0, {at_x(100), at_x(300)})}, 2);
  const TrackState before = r->state;
  EXPECT_FALSE(assign_frame(r->state, frame(1, {at_x(100), at_x(200), at_x(300)})));
  EXPECT_EQ(r->state.last_assigned, before.last_assigned);
}

TEST(AssignFrame, UnderDetectionLeavesEmptySlot) {
  auto r = init_tracks({frame(0, {at_x(100), at_x(300)})}, 2);
  const auto out = assign_frame(r->state, frame(1, {at_x(305)}));
  ASSERT_TRUE(out);
  EXPECT_FALSE(out->slots[0]);
  EXPECT_TRUE(out->slots[1]);
  EXPECT_EQ(out->filled_count(), 1);
}

TEST(AssignFrame, IncomparableDetectionDiscarded) {
  auto r = init_tracks({frame(0, {at_x(100)})}, 1);
  PersonPose stray;
  stray.set_joint(22, {5, 5, 0.9});  // only a foot point
  const auto out = assign_frame(r->state, frame(1, {stray}));
  ASSERT_TRUE(out);
  EXPECT_FALSE(out->slots[0]);
}

TEST(TrackSequence, SinglePerson) {
  std::vector<FrameDetections> frames;
  for (int t = 0; t < 10; ++t) frames.push_back(frame(t, {at_x(100 + t)}));
  const auto res = track_sequence(frames, 1);
  ASSERT_EQ(res.frames.size(), 10u);
  for (const auto& f : res.frames) EXPECT_TRUE(f.slots[0]);
  EXPECT_TRUE(res.report.dropped_frames.empty());
}

TEST(TrackSequence, DropAccounting) {
  std::vector<FrameDetections> frames;
  for (int t = 0; t < 9; ++t) {
    std::vector<PersonPose> people{at_x(100 + t), at_x(400 - t)};
    if (t == 5) people.push_back(at_x(250));
    frames.push_back(frame(t, people));
  }
  const auto res = track_sequence(frames, 2);
  EXPECT_EQ(res.frames.size(), 8u);
  EXPECT_EQ(res.report.dropped_frames, std::vector<std::int64_t>{5});
  EXPECT_NE(res.report.to_json().find("\"dropped_frames\""), std::string::npos);
  EXPECT_NE(res.report.summary().find("dropped 1"), std::string::npos);
}

TEST(TrackSequence, NeverInitializableIsAnError) {
  std::vector<FrameDetections> frames{frame(0, {at_x(1), at_x(2), at_x(3)})};
  EXPECT_THROW(track_sequence(frames, 2), Error);
  EXPECT_THROW(track_sequence({}, 2), Error);
}

TEST(TrackSequence, CrossingClipsKeepIdentities) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto clip = synthetic::crossing_clip(seed);
    std::vector<FrameDetections> frames;
    for (const auto& f : clip) frames.push_back(f.detections);
    const auto res = track_sequence(frames, 2);
    EXPECT_EQ(res.frames.size(), 60u);
    EXPECT_EQ(synthetic::count_identity_switches(clip, res.frames), 0) << seed;
  }
}

// Properties over random crossing clips.

std::vector<FrameDetections> detections_of(
    const std::vector<synthetic::LabeledFrame>& clip) {
  std::vector<FrameDetections> out;
  for (const auto& f : clip) out.push_back(f.detections);
  return out;
}

TEST(TrackProperties, PermutationInvariance) {
  std::mt19937_64 rng(17);
  for (std::uint64_t seed = 100; seed < 110; ++seed) {
    const auto frames = detections_of(synthetic::crossing_clip(seed));
    auto shuffled = frames;
    for (auto& f : shuffled) std::shuffle(f.people.begin(), f.people.end(), rng);
    EXPECT_EQ(track_sequence(frames, 2).frames, track_sequence(shuffled, 2).frames);
  }
}

TEST(TrackProperties, TranslationEquivariance) {
  for (std::uint64_t seed = 200; seed < 210; ++seed) {
    const auto frames = detections_of(synthetic::crossing_clip(seed));
    auto moved = frames;
    for (auto& f : moved)
      for (auto& p : f.people) {
        p.body.col(0).array() += 37.25;
        p.body.col(1).array() -= 11.5;
      }
    const auto a = track_sequence(frames, 2).frames;
    const auto b = track_sequence(moved, 2).frames;
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t t = 0; t < a.size(); ++t)
      for (int s = 0; s < 2; ++s) {
        ASSERT_EQ(bool(a[t].slots[s]), bool(b[t].slots[s]));
        if (!a[t].slots[s]) continue;
        EXPECT_DOUBLE_EQ(a[t].slots[s]->body(0, 0) + 37.25, b[t].slots[s]->body(0, 0));
      }
  }
}

TEST(TrackProperties, ClosedSetAndDeterminism) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> x(50, 900);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<FrameDetections> frames;
    for (int t = 0; t < 20; ++t) {
      std::vector<PersonPose> people;
      const int n = static_cast<int>(rng() % 5);
      for (int k = 0; k < n; ++k) people.push_back(at_x(x(rng)));
      frames.push_back(frame(t, people));
    }
    frames[3] = frame(3, {at_x(100), at_x(200), at_x(300)});
    const auto a = track_sequence(frames, 3);
    EXPECT_EQ(a.frames, track_sequence(frames, 3).frames);
    for (std::size_t t = 0; t < a.frames.size(); ++t) {
      const auto& f = a.frames[t];
      ASSERT_EQ(f.slots.size(), 3u);
      EXPECT_LE(f.filled_count(), 3);
      // Each bound pose is a distinct detection of that frame.
      const auto src = std::find_if(frames.begin(), frames.end(), [&](const auto& d) {
        return d.frame_index == f.frame_index;
      });
      std::set<std::size_t> used;
      for (const auto& s : f.slots) {
        if (!s) continue;
        std::size_t k = 0;
        while (k < src->people.size() && (used.count(k) || !(src->people[k] == *s))) ++k;
        ASSERT_LT(k, src->people.size());
        used.insert(k);
      }
    }
  }
}

}  // namespace
}  // namespace mpt
