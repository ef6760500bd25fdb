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

#include <cstdint>
#include <filesystem>
#include <random>
#include <vector>

#include "mpt/image.hpp"
#include "mpt/pose.hpp"

// Synthetic pose clips with ground-truth identities. Used by the test suites
// and by `mpt_fixture` to produce the bundled end-to-end fixture.
namespace mpt::synthetic {

/// Upright BODY_25 skeleton whose ankles sit on `ground_y` at horizontal
/// centre `cx`; `height` is the nose-to-ankle extent. All joints confidence
/// 0.9. With `with_face`, a 70-point face ring around the nose is added.
PersonPose standing_pose(double cx, double ground_y, double height,
                         bool with_face = false);

/// Adds uniform noise in [-amplitude, amplitude] to every valid coordinate.
void jitter(PersonPose& pose, double amplitude, std::mt19937_64& rng);

struct LabeledFrame {
  FrameDetections detections;
  std::vector<int> truth;  // truth[d] = ground-truth identity of detection d
};

struct CrossingSpec {
  int frames = 60;
  int width = 1024;
  int height = 512;
  double max_step = 10.0;       // per-frame motion bound (px)
  double min_separation = 25.0; // separation at the crossing frame (px)
  double jitter = 0.5;
};

/// Two subjects that walk through each other's x position. Identity 0
/// starts on the left. Detector order is shuffled every frame.
std::vector<LabeledFrame> crossing_clip(std::uint64_t seed,
                                        const CrossingSpec& cs = {});

/// Counts frames whose slot k holds a detection of an identity other than
/// the one slot k held at the first tracked frame. `tracked` frames must be
/// a subsequence of `clip` (matched by frame_index) and slots must hold the
/// exact detected poses.
int count_identity_switches(const std::vector<LabeledFrame>& clip,
                            const std::vector<TrackedFrame>& tracked);

/// N subjects dancing in place with a slow forward/backward drift, so each
/// subject covers a floor band. Detections are in identity order.
std::vector<FrameDetections> dancing_clip(std::uint64_t seed, int person_count,
                                          int frames, int width, int height,
                                          double ground_y, double body_height,
                                          double band);

/// Stand-in for a real video frame: a deterministic backdrop with each
/// subject drawn as thick limbs in an identity-specific clothing colour.
Image appearance_frame(const FrameDetections& frame, int width, int height);

/// Per-image 16-d descriptor (4x4 block-mean luminance, scaled to [0, 1]).
std::vector<float> image_descriptor(const Image& img);

/// Writes a complete 2-person fixture under `root`: source/ and target/
/// OpenPose JSON directories, target frame PNGs, target features and a
/// pipeline.json config.
void write_fixture(const std::filesystem::path& root, std::uint64_t seed = 7,
                   int frames = 60, int width = 256, int height = 128);

}  // namespace mpt::synthetic
