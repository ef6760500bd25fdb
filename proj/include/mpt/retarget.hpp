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

#include <string>
#include <string_view>
#include <vector>

#include "mpt/pose.hpp"

namespace mpt {

/// Floor band and body height of one subject. Image y grows downwards, so
/// the far (small-y) end of the band is nearest the horizon.
struct SubjectStats {
  double y_far = 0.0;
  double y_close = 0.0;
  double h_far = 1.0;
  double h_close = 1.0;

  friend bool operator==(const SubjectStats&, const SubjectStats&) = default;
};

struct QuantileSettings {
  double low = 0.05;
  double high = 0.95;
  int min_frames = 10;
  double band_fraction = 0.05;  // "near the extreme" window, as band fraction
};

struct SubjectPair {
  SubjectStats source;
  SubjectStats target;
};

struct NormalizationParams {
  std::vector<SubjectPair> pairs;  // index = source identity slot
  std::vector<int> target_slot;    // which target slot each pair came from
  QuantileSettings quantiles;

  std::string to_json() const;
  static NormalizationParams from_json(std::string_view bytes);
};

struct SmoothingConfig {
  double beta = 0.0;  // weight on history, in [0, 1)
};

/// Linear-interpolation quantile of an unsorted sample (q in [0, 1]).
double quantile(std::vector<double> values, double q);

/// Per-frame ankle line (mean valid ankle y) and head-to-ankle height of one
/// slot. Head is the highest-confidence valid joint among nose, eyes, ears.
struct SubjectSample {
  double ankle_y = 0.0;
  std::optional<double> height;
};
std::vector<SubjectSample> collect_subject_samples(
    const std::vector<TrackedFrame>& tracked, int slot);

SubjectStats compute_subject_stats(const std::vector<TrackedFrame>& tracked,
                                   int slot, const QuantileSettings& q = {});

/// Builds one pair per source slot. `slot_map[i]` picks the target slot for
/// source slot i; empty means identity pairing.
NormalizationParams compute_normalization(
    const std::vector<TrackedFrame>& source,
    const std::vector<TrackedFrame>& target, int person_count,
    const QuantileSettings& q = {}, std::vector<int> slot_map = {});

struct RetargetedPose {
  PersonPose pose;
  bool flagged = false;  // no valid ankle, passed through unchanged
  double floor_y = 0.0;  // mapped ankle line
  double scale = 1.0;
};

RetargetedPose retarget_pose(const PersonPose& pose, const SubjectPair& pair);

struct RetargetResult {
  std::vector<TrackedFrame> frames;
  std::size_t flagged = 0;
};

RetargetResult retarget_sequence(const std::vector<TrackedFrame>& frames,
                                 const NormalizationParams& params);

/// Per-slot, per-joint exponential smoothing with hold-last gaps.
std::vector<TrackedFrame> smooth_sequence(const std::vector<TrackedFrame>& frames,
                                          const SmoothingConfig& cfg);

}  // namespace mpt
