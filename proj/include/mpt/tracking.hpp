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
#include <optional>
#include <string>
#include <vector>

#include "mpt/pose.hpp"

namespace mpt {

struct SimilarityConfig {
  int min_shared_joints = 3;
};

/// Mean Euclidean distance over body joints valid in both poses, or nullopt
/// when fewer than `cfg.min_shared_joints` joints are shared.
std::optional<double> pose_distance(const PersonPose& a, const PersonPose& b,
                                    const SimilarityConfig& cfg = {});

/// Closed-set tracker state: one slot per identity, each holding the most
/// recent pose bound to it.
struct TrackState {
  int person_count = 0;
  std::vector<std::optional<PersonPose>> last_assigned;
  std::vector<std::int64_t> last_seen_frame;
  std::int64_t current_frame = 0;
};

struct InitResult {
  TrackState state;
  TrackedFrame first;
  std::size_t position = 0;  // index into the input frame list
  std::size_t skipped = 0;
};

/// Binds identities left to right (ascending mean valid-joint x; ties go to
/// the lower detector index) on the first frame with exactly N usable
/// detections. Returns nullopt if no frame qualifies.
std::optional<InitResult> init_tracks(const std::vector<FrameDetections>& frames,
                                      int person_count);

/// Greedy closed-set assignment of one frame. Returns nullopt when the frame
/// holds more detections than identities (frame dropped). Bound poses update
/// `state`.
std::optional<TrackedFrame> assign_frame(TrackState& state,
                                         const FrameDetections& detections,
                                         const SimilarityConfig& cfg = {});

struct DropReport {
  std::vector<std::int64_t> dropped_frames;
  std::size_t init_skip_count = 0;
  std::int64_t init_frame_index = 0;
  std::size_t discarded_detections = 0;
  std::size_t empty_slot_entries = 0;

  std::string summary() const;
  std::string to_json() const;
};

struct TrackResult {
  std::vector<TrackedFrame> frames;
  DropReport report;
};

/// Throws Error(kData) when no frame ever has exactly N usable detections.
TrackResult track_sequence(const std::vector<FrameDetections>& frames,
                           int person_count, const SimilarityConfig& cfg = {});

}  // namespace mpt
