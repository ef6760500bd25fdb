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

#include "mpt/retarget.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "mpt/error.hpp"

namespace mpt {

using nlohmann::json;

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw data_error("quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double pos = std::clamp(q, 0.0, 1.0) * double(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - double(lo);
  if (frac == 0.0) return values[lo];
  return values[lo] + frac * (values[hi] - values[lo]);
}

std::vector<SubjectSample> collect_subject_samples(
    const std::vector<TrackedFrame>& tracked, int slot) {
  std::vector<SubjectSample> out;
  for (const auto& frame : tracked) {
    if (slot < 0 || slot >= static_cast<int>(frame.slots.size())) continue;
    const auto& pose = frame.slots[slot];
    if (!pose || !is_usable(*pose)) continue;
    const auto anchor = ankle_anchor(*pose);
    if (!anchor) continue;
    SubjectSample s{anchor->y(), std::nullopt};
    int head = -1;
    for (int j : body25::kHead) {
      if (pose->joint_valid(j) &&
          (head < 0 || pose->body(j, 2) > pose->body(head, 2)))
        head = j;
    }
    if (head >= 0) s.height = anchor->y() - pose->body(head, 1);
    out.push_back(s);
  }
  return out;
}

namespace {

double height_near(const std::vector<SubjectSample>& samples, double y_edge,
                   double tol, int slot) {
  std::vector<double> heights;
  for (const auto& s : samples)
    if (s.height && std::abs(s.ankle_y - y_edge) <= tol)
      heights.push_back(*s.height);
  if (heights.empty()) {
    // Nothing inside the window: fall back to the nearest ankle line(s).
    double best = std::numeric_limits<double>::infinity();
    for (const auto& s : samples)
      if (s.height) best = std::min(best, std::abs(s.ankle_y - y_edge));
    for (const auto& s : samples)
      if (s.height && std::abs(s.ankle_y - y_edge) == best)
        heights.push_back(*s.height);
  }
  if (heights.empty())
    throw data_error("stats: slot " + std::to_string(slot) +
                     " has no frame with a valid head joint");
  const double h = quantile(std::move(heights), 0.5);
  if (!(h > 0.0))
    throw data_error("stats: slot " + std::to_string(slot) +
                     " has non-positive body height");
  return h;
}

}  // namespace

SubjectStats compute_subject_stats(const std::vector<TrackedFrame>& tracked,
                                   int slot, const QuantileSettings& q) {
  if (!(q.low >= 0.0 && q.low <= q.high && q.high <= 1.0))
    throw usage_error("quantiles must satisfy 0 <= low <= high <= 1");
  const auto samples = collect_subject_samples(tracked, slot);
  if (static_cast<int>(samples.size()) < q.min_frames) {
    throw data_error("stats: slot " + std::to_string(slot) + " has only " +
                     std::to_string(samples.size()) +
                     " frame(s) with a valid ankle, need " +
                     std::to_string(q.min_frames));
  }
  std::vector<double> ankles;
  ankles.reserve(samples.size());
  for (const auto& s : samples) ankles.push_back(s.ankle_y);

  SubjectStats st;
  st.y_far = quantile(ankles, q.low);
  st.y_close = quantile(ankles, q.high);
  const double tol = q.band_fraction * (st.y_close - st.y_far);
  st.h_far = height_near(samples, st.y_far, tol, slot);
  st.h_close = height_near(samples, st.y_close, tol, slot);
  return st;
}

NormalizationParams compute_normalization(
    const std::vector<TrackedFrame>& source,
    const std::vector<TrackedFrame>& target, int person_count,
    const QuantileSettings& q, std::vector<int> slot_map) {
  if (slot_map.empty()) {
    slot_map.resize(person_count);
    for (int i = 0; i < person_count; ++i) slot_map[i] = i;
  }
  if (static_cast<int>(slot_map.size()) != person_count)
    throw usage_error("slot map must list one target slot per source slot");
  std::vector<int> sorted = slot_map;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < person_count; ++i)
    if (sorted[i] != i)
      throw usage_error("slot map must be a permutation of 0.." +
                        std::to_string(person_count - 1));

  NormalizationParams params;
  params.quantiles = q;
  params.target_slot = slot_map;
  for (int i = 0; i < person_count; ++i) {
    params.pairs.push_back({compute_subject_stats(source, i, q),
                            compute_subject_stats(target, slot_map[i], q)});
  }
  return params;
}

RetargetedPose retarget_pose(const PersonPose& pose, const SubjectPair& pair) {
  const auto anchor = ankle_anchor(pose);
  if (!anchor) return {pose, true, 0.0, 1.0};
  const SubjectStats& src = pair.source;
  const SubjectStats& dst = pair.target;

  const double y = anchor->y();
  const double span = src.y_close - src.y_far;
  const double alpha =
      span == 0.0 ? 0.5 : std::clamp((y - src.y_far) / span, 0.0, 1.0);
  const double y_mapped = std::clamp(
      dst.y_far + alpha * (dst.y_close - dst.y_far), dst.y_far, dst.y_close);
  const double scale = (dst.h_far + alpha * (dst.h_close - dst.h_far)) /
                       (src.h_far + alpha * (src.h_close - src.h_far));
  const Eigen::RowVector2d from(anchor->x(), y);
  const Eigen::RowVector2d to(anchor->x(), y_mapped);

  auto map_block = [&](KeypointMatrix& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (m(i, 2) > 0.0)
        m.block<1, 2>(i, 0) = to + scale * (m.block<1, 2>(i, 0) - from);
    }
  };
  RetargetedPose out{pose, false, y_mapped, scale};
  map_block(out.pose.body);
  if (out.pose.face) map_block(*out.pose.face);
  return out;
}

RetargetResult retarget_sequence(const std::vector<TrackedFrame>& frames,
                                 const NormalizationParams& params) {
  RetargetResult result;
  result.frames.reserve(frames.size());
  for (const auto& frame : frames) {
    if (frame.slots.size() != params.pairs.size()) {
      throw usage_error("normalization params have " +
                        std::to_string(params.pairs.size()) +
                        " slot pair(s) but frame " +
                        std::to_string(frame.frame_index) + " has " +
                        std::to_string(frame.slots.size()) + " slot(s)");
    }
    TrackedFrame out{frame.frame_index, {}};
    out.slots.reserve(frame.slots.size());
    for (std::size_t s = 0; s < frame.slots.size(); ++s) {
      if (!frame.slots[s]) {
        out.slots.emplace_back();
        continue;
      }
      auto r = retarget_pose(*frame.slots[s], params.pairs[s]);
      result.flagged += r.flagged;
      out.slots.emplace_back(std::move(r.pose));
    }
    result.frames.push_back(std::move(out));
  }
  return result;
}

namespace {

// Smoother state for one keypoint block: last output per joint, if any.
struct BlockState {
  Eigen::Matrix<double, Eigen::Dynamic, 2> value;
  Eigen::Array<bool, Eigen::Dynamic, 1> primed;

  void step(KeypointMatrix& m, double beta) {
    if (value.rows() != m.rows()) {
      value.setZero(m.rows(), 2);
      primed.setConstant(m.rows(), false);
    }
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (!(m(i, 2) > 0.0)) continue;
      for (int c = 0; c < 2; ++c) {
        const double in = m(i, c);
        double out = in;
        if (primed(i)) {
          const double prev = value(i, c);
          out = std::clamp(in + beta * (prev - in), std::min(in, prev),
                           std::max(in, prev));
        }
        value(i, c) = out;
        m(i, c) = out;
      }
      primed(i) = true;
    }
  }
};

}  // namespace

std::vector<TrackedFrame> smooth_sequence(const std::vector<TrackedFrame>& frames,
                                          const SmoothingConfig& cfg) {
  if (!(cfg.beta >= 0.0 && cfg.beta < 1.0))
    throw usage_error("smoothing beta must lie in [0, 1)");
  std::vector<TrackedFrame> out = frames;
  std::vector<BlockState> body, face;
  for (auto& frame : out) {
    if (body.size() < frame.slots.size()) {
      body.resize(frame.slots.size());
      face.resize(frame.slots.size());
    }
    for (std::size_t s = 0; s < frame.slots.size(); ++s) {
      auto& pose = frame.slots[s];
      if (!pose) continue;
      body[s].step(pose->body, cfg.beta);
      if (pose->face) face[s].step(*pose->face, cfg.beta);
    }
  }
  return out;
}

namespace {

json stats_json(const SubjectStats& s) {
  return json{{"y_far", s.y_far},
              {"y_close", s.y_close},
              {"h_far", s.h_far},
              {"h_close", s.h_close}};
}

SubjectStats stats_from(const json& j) {
  SubjectStats s{j.at("y_far").get<double>(), j.at("y_close").get<double>(),
                 j.at("h_far").get<double>(), j.at("h_close").get<double>()};
  if (!(s.y_far <= s.y_close && s.h_far > 0.0 && s.h_close > 0.0))
    throw data_error("normalization params violate y_far <= y_close, h > 0");
  return s;
}

}  // namespace

std::string NormalizationParams::to_json() const {
  json j;
  j["format"] = "mpt.normalization";
  j["version"] = 1;
  j["quantiles"] = {{"low", quantiles.low},
                    {"high", quantiles.high},
                    {"min_frames", quantiles.min_frames},
                    {"band_fraction", quantiles.band_fraction}};
  j["pairs"] = json::array();
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    j["pairs"].push_back({{"source_slot", i},
                          {"target_slot", target_slot.empty()
                                              ? static_cast<int>(i)
                                              : target_slot[i]},
                          {"source", stats_json(pairs[i].source)},
                          {"target", stats_json(pairs[i].target)}});
  }
  return j.dump(2) + "\n";
}

NormalizationParams NormalizationParams::from_json(std::string_view bytes) {
  try {
    const json j = json::parse(bytes.begin(), bytes.end());
    if (j.value("format", "") != "mpt.normalization" ||
        j.value("version", 0) != 1)
      throw data_error("not a version-1 normalization params document");
    NormalizationParams p;
    const json& q = j.at("quantiles");
    p.quantiles.low = q.at("low").get<double>();
    p.quantiles.high = q.at("high").get<double>();
    p.quantiles.min_frames = q.at("min_frames").get<int>();
    p.quantiles.band_fraction = q.at("band_fraction").get<double>();
    for (const auto& pair : j.at("pairs")) {
      p.pairs.push_back({stats_from(pair.at("source")),
                         stats_from(pair.at("target"))});
      p.target_slot.push_back(pair.at("target_slot").get<int>());
    }
    return p;
  } catch (const json::exception& e) {
    throw data_error(std::string("invalid normalization params: ") + e.what());
  }
}

}  // namespace mpt
