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

#include "mpt/tracking.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "mpt/error.hpp"

namespace mpt {

std::optional<double> pose_distance(const PersonPose& a, const PersonPose& b,
                                    const SimilarityConfig& cfg) {
  const Eigen::Index rows = std::min(a.body.rows(), b.body.rows());
  const auto shared = (a.body.col(2).head(rows).array() > 0.0) &&
                      (b.body.col(2).head(rows).array() > 0.0);
  const auto n = shared.count();
  if (n < std::max(cfg.min_shared_joints, 1)) return std::nullopt;
  const Eigen::VectorXd d =
      (a.body.leftCols<2>().topRows(rows) - b.body.leftCols<2>().topRows(rows))
          .rowwise()
          .norm();
  return shared.select(d.array(), 0.0).sum() / static_cast<double>(n);
}

std::optional<InitResult> init_tracks(const std::vector<FrameDetections>& frames,
                                      int person_count) {
  if (person_count < 1) throw usage_error("person count must be >= 1");
  for (std::size_t pos = 0; pos < frames.size(); ++pos) {
    const auto& people = frames[pos].people;
    if (static_cast<int>(people.size()) != person_count) continue;
    if (!std::all_of(people.begin(), people.end(), is_usable)) continue;

    std::vector<std::size_t> order(people.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> mean_x(people.size());
    for (std::size_t i = 0; i < people.size(); ++i)
      mean_x[i] = *mean_valid_x(people[i]);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t l, std::size_t r) {
                       return mean_x[l] < mean_x[r];
                     });

    InitResult init;
    init.position = pos;
    init.skipped = pos;
    init.state.person_count = person_count;
    init.state.current_frame = frames[pos].frame_index;
    init.first.frame_index = frames[pos].frame_index;
    for (std::size_t det : order) {
      init.state.last_assigned.emplace_back(people[det]);
      init.state.last_seen_frame.push_back(frames[pos].frame_index);
      init.first.slots.emplace_back(people[det]);
    }
    return init;
  }
  return std::nullopt;
}

std::optional<TrackedFrame> assign_frame(TrackState& state,
                                         const FrameDetections& detections,
                                         const SimilarityConfig& cfg) {
  const int n_slots = state.person_count;
  state.current_frame = detections.frame_index;
  const auto& people = detections.people;
  if (static_cast<int>(people.size()) > n_slots) return std::nullopt;

  constexpr double kInf = std::numeric_limits<double>::infinity();
  const std::size_t n_det = people.size();
  Eigen::MatrixXd cost =
      Eigen::MatrixXd::Constant(n_slots, static_cast<Eigen::Index>(n_det), kInf);
  for (int s = 0; s < n_slots; ++s) {
    if (!state.last_assigned[s]) continue;
    for (std::size_t d = 0; d < n_det; ++d) {
      if (auto dist = pose_distance(*state.last_assigned[s], people[d], cfg))
        cost(s, static_cast<Eigen::Index>(d)) = *dist;
    }
  }

  TrackedFrame out;
  out.frame_index = detections.frame_index;
  out.slots.resize(n_slots);
  std::vector<bool> slot_used(n_slots, false);
  std::vector<bool> det_used(n_det, false);
  // Greedy: repeatedly bind the globally cheapest finite pair. Row-major scan
  // with strict '<' breaks ties by (slot, detection) ascending.
  for (;;) {
    double best = kInf;
    int best_s = -1;
    std::size_t best_d = 0;
    for (int s = 0; s < n_slots; ++s) {
      if (slot_used[s]) continue;
      for (std::size_t d = 0; d < n_det; ++d) {
        if (det_used[d]) continue;
        const double c = cost(s, static_cast<Eigen::Index>(d));
        if (c < best) {
          best = c;
          best_s = s;
          best_d = d;
        }
      }
    }
    if (best_s < 0) break;
    slot_used[best_s] = true;
    det_used[best_d] = true;
    out.slots[best_s] = people[best_d];
  }

  for (int s = 0; s < n_slots; ++s) {
    if (out.slots[s]) {
      state.last_assigned[s] = out.slots[s];
      state.last_seen_frame[s] = detections.frame_index;
    }
  }
  return out;
}

std::string DropReport::summary() const {
  std::ostringstream os;
  os << "tracking: initialized at frame " << init_frame_index << " (skipped "
     << init_skip_count << ")\n";
  os << "tracking: dropped " << dropped_frames.size() << " frame(s)";
  if (!dropped_frames.empty()) {
    os << ":";
    for (auto f : dropped_frames) os << ' ' << f;
  }
  os << "\ntracking: " << discarded_detections
     << " detection(s) discarded as incomparable, " << empty_slot_entries
     << " empty slot entries\n";
  return os.str();
}

std::string DropReport::to_json() const {
  nlohmann::json j;
  j["dropped_frames"] = dropped_frames;
  j["init_skip_count"] = init_skip_count;
  j["init_frame_index"] = init_frame_index;
  j["discarded_detections"] = discarded_detections;
  j["empty_slot_entries"] = empty_slot_entries;
  return j.dump(2) + "\n";
}

TrackResult track_sequence(const std::vector<FrameDetections>& frames,
                           int person_count, const SimilarityConfig& cfg) {
  if (frames.empty()) throw data_error("tracking needs at least one frame");
  if (cfg.min_shared_joints < 1)
    throw usage_error("min_shared_joints must be >= 1");
  auto init = init_tracks(frames, person_count);
  if (!init) {
    throw data_error("tracking cannot initialize: no frame has exactly " +
                     std::to_string(person_count) + " usable detections");
  }
  TrackResult result;
  result.report.init_skip_count = init->skipped;
  result.report.init_frame_index = init->first.frame_index;
  result.frames.push_back(std::move(init->first));
  TrackState state = std::move(init->state);

  for (std::size_t pos = init->position + 1; pos < frames.size(); ++pos) {
    auto tracked = assign_frame(state, frames[pos], cfg);
    if (!tracked) {
      result.report.dropped_frames.push_back(frames[pos].frame_index);
      continue;
    }
    const int filled = tracked->filled_count();
    result.report.discarded_detections +=
        frames[pos].people.size() - static_cast<std::size_t>(filled);
    result.report.empty_slot_entries +=
        static_cast<std::size_t>(person_count - filled);
    result.frames.push_back(std::move(*tracked));
  }
  return result;
}

}  // namespace mpt
