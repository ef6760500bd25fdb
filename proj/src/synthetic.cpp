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

#include "mpt/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>

#include <json.hpp>

#include "mpt/error.hpp"
#include "mpt/ingest.hpp"
#include "mpt/metrics.hpp"
#include "mpt/render.hpp"
#include "mpt/tracking.hpp"

namespace mpt::synthetic {

namespace fs = std::filesystem;

namespace {

// Joint offsets in units of height/100, relative to the ankle midpoint;
// negative y is up.
constexpr std::array<std::array<double, 2>, kBodyJointCount> kStanding = {{
    {0, -100},  {0, -88},   {-12, -86}, {-16, -70}, {-18, -56},
    {12, -86},  {16, -70},  {18, -56},  {0, -52},   {-7, -52},
    {-8, -27},  {-8, 0},    {7, -52},   {8, -27},   {8, 0},
    {-3, -103}, {3, -103},  {-6, -101}, {6, -101},  {11, 2},
    {13, 2},    {7, 1},     {-11, 2},   {-13, 2},   {-7, 1},
}};

constexpr std::array<Rgb, 6> kClothing = {{
    {200, 60, 40}, {40, 90, 200}, {60, 170, 70},
    {210, 180, 50}, {150, 60, 170}, {40, 170, 170},
}};

}  // namespace

PersonPose standing_pose(double cx, double ground_y, double height,
                         bool with_face) {
  PersonPose p;
  const double u = height / 100.0;
  for (int j = 0; j < kBodyJointCount; ++j)
    p.set_joint(j, {cx + kStanding[j][0] * u, ground_y + kStanding[j][1] * u, 0.9});
  if (with_face) {
    KeypointMatrix face(kFaceLandmarkCount, 3);
    for (int k = 0; k < kFaceLandmarkCount; ++k) {
      const double a = 2.0 * std::numbers::pi * k / kFaceLandmarkCount;
      face.row(k) << cx + 6.0 * u * std::cos(a),
          ground_y - 100.0 * u + 8.0 * u * std::sin(a), 0.8;
    }
    p.face = face;
  }
  return p;
}

void jitter(PersonPose& pose, double amplitude, std::mt19937_64& rng) {
  if (amplitude <= 0.0) return;
  std::uniform_real_distribution<double> noise(-amplitude, amplitude);
  auto apply = [&](KeypointMatrix& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (m(i, 2) <= 0.0) continue;
      m(i, 0) += noise(rng);
      m(i, 1) += noise(rng);
    }
  };
  apply(pose.body);
  if (pose.face) apply(*pose.face);
}

std::vector<LabeledFrame> crossing_clip(std::uint64_t seed,
                                        const CrossingSpec& cs) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto between = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

  // Per-frame displacement is speed + bounce slope + 2 * jitter per axis;
  // keep the total under max_step.
  const double bounce_amp = 1.5, bounce_period = 12.0;
  const double bounce_rate = bounce_amp * 2.0 * std::numbers::pi / bounce_period;
  const double speed_cap =
      std::max(0.5, cs.max_step - bounce_rate - 2.0 * std::sqrt(2.0) * cs.jitter);
  const double v0 = between(0.4, 1.0) * std::min(speed_cap, 6.0);
  const double v1 = between(0.4, 1.0) * std::min(speed_cap, 6.0);
  const double t_cross = between(0.3, 0.7) * (cs.frames - 1);
  const double dy = cs.min_separation + between(1.0, 25.0);
  const double sign = unit(rng) < 0.5 ? -1.0 : 1.0;
  const double height = between(0.3, 0.45) * cs.height;
  const double cx = cs.width / 2.0;
  const double ground0 = cs.height * 0.75;
  const double ground1 = ground0 + sign * dy;
  const double phase0 = between(0.0, 6.0), phase1 = between(0.0, 6.0);

  std::vector<LabeledFrame> clip;
  clip.reserve(cs.frames);
  for (int t = 0; t < cs.frames; ++t) {
    const double b0 = bounce_amp * std::sin(2 * std::numbers::pi * t / bounce_period + phase0);
    const double b1 = bounce_amp * std::sin(2 * std::numbers::pi * t / bounce_period + phase1);
    std::array<PersonPose, 2> people = {
        standing_pose(cx + v0 * (t - t_cross), ground0 + b0, height),
        standing_pose(cx - v1 * (t - t_cross), ground1 + b1, height)};
    for (auto& p : people) jitter(p, cs.jitter, rng);

    LabeledFrame f;
    f.detections.frame_index = t;
    f.detections.image_width = cs.width;
    f.detections.image_height = cs.height;
    const bool swap = unit(rng) < 0.5;
    f.truth = swap ? std::vector<int>{1, 0} : std::vector<int>{0, 1};
    for (int id : f.truth) f.detections.people.push_back(people[id]);
    clip.push_back(std::move(f));
  }
  return clip;
}

int count_identity_switches(const std::vector<LabeledFrame>& clip,
                            const std::vector<TrackedFrame>& tracked) {
  auto identity_of = [&](const TrackedFrame& tf, std::size_t slot) -> int {
    if (!tf.slots[slot]) return -1;
    for (const auto& lf : clip) {
      if (lf.detections.frame_index != tf.frame_index) continue;
      for (std::size_t d = 0; d < lf.detections.people.size(); ++d)
        if (lf.detections.people[d] == *tf.slots[slot]) return lf.truth[d];
    }
    return -2;
  };
  if (tracked.empty()) return 0;
  std::vector<int> initial(tracked.front().slots.size());
  for (std::size_t s = 0; s < initial.size(); ++s)
    initial[s] = identity_of(tracked.front(), s);
  int switches = 0;
  for (const auto& tf : tracked) {
    for (std::size_t s = 0; s < tf.slots.size(); ++s) {
      const int id = identity_of(tf, s);
      if (id != -1 && id != initial[s]) {
        ++switches;
        break;
      }
    }
  }
  return switches;
}

std::vector<FrameDetections> dancing_clip(std::uint64_t seed, int person_count,
                                          int frames, int width, int height,
                                          double ground_y, double body_height,
                                          double band) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> phase(person_count), period(person_count);
  for (int i = 0; i < person_count; ++i) {
    phase[i] = unit(rng) * 2.0 * std::numbers::pi;
    period[i] = 20.0 + 20.0 * unit(rng);
  }
  std::vector<FrameDetections> out;
  for (int t = 0; t < frames; ++t) {
    FrameDetections f;
    f.frame_index = t;
    f.image_width = width;
    f.image_height = height;
    for (int i = 0; i < person_count; ++i) {
      const double depth =
          0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * t / period[i] + phase[i]);
      const double g = ground_y + band * depth;
      const double h = body_height * (1.0 + 0.25 * depth);
      const double cx = width * (i + 1.0) / (person_count + 1.0) +
                        3.0 * std::sin(0.3 * t + phase[i]);
      PersonPose p = standing_pose(cx, g, h);
      // Arm wave so that poses differ beyond translation and scale.
      const double wave = std::sin(0.45 * t + 1.7 * phase[i]);
      p.body(4, 1) -= 0.25 * h * wave;
      p.body(7, 1) -= 0.25 * h * std::cos(0.45 * t + phase[i]);
      p.body(3, 0) -= 0.05 * h * wave;
      jitter(p, 0.3, rng);
      f.people.push_back(std::move(p));
    }
    out.push_back(std::move(f));
  }
  return out;
}

Image appearance_frame(const FrameDetections& frame, int width, int height) {
  Image img(width, height, 3, 0);
  const int horizon = height / 2;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      std::uint8_t* p = img.pixel(x, y);
      if (y < horizon) {
        p[0] = static_cast<std::uint8_t>(150 + (60 * y) / std::max(1, horizon));
        p[1] = static_cast<std::uint8_t>(170 + (50 * y) / std::max(1, horizon));
        p[2] = 220;
      } else {
        const int v = 90 + ((x / 8 + y / 8) % 2) * 12;
        p[0] = static_cast<std::uint8_t>(v + 20);
        p[1] = static_cast<std::uint8_t>(v);
        p[2] = static_cast<std::uint8_t>(v - 20);
      }
    }
  }
  const auto limbs = limb_topology();
  for (std::size_t i = 0; i < frame.people.size(); ++i) {
    const auto& body = frame.people[i].body;
    const Rgb cloth = kClothing[i % kClothing.size()];
    for (const auto& [a, b] : limbs) {
      if (body(a, 2) <= 0.0 || body(b, 2) <= 0.0) continue;
      draw_line(img, int(std::lround(body(a, 0))), int(std::lround(body(a, 1))),
                int(std::lround(body(b, 0))), int(std::lround(body(b, 1))), 5,
                cloth);
    }
    if (body(0, 2) > 0.0)
      draw_disc(img, int(std::lround(body(0, 0))), int(std::lround(body(0, 1))),
                5, {230, 190, 160});
  }
  return img;
}

std::vector<float> image_descriptor(const Image& img) {
  const Plane lum = luminance(img);
  std::vector<float> out;
  out.reserve(16);
  for (int by = 0; by < 4; ++by) {
    for (int bx = 0; bx < 4; ++bx) {
      const Eigen::Index r0 = lum.rows() * by / 4, r1 = lum.rows() * (by + 1) / 4;
      const Eigen::Index c0 = lum.cols() * bx / 4, c1 = lum.cols() * (bx + 1) / 4;
      const double m =
          r1 > r0 && c1 > c0 ? lum.block(r0, c0, r1 - r0, c1 - c0).mean() : 0.0;
      out.push_back(static_cast<float>(m / 255.0));
    }
  }
  return out;
}

namespace {

std::string openpose_json(const FrameDetections& f) {
  nlohmann::json doc;
  doc["version"] = 1.3;
  doc["people"] = nlohmann::json::array();
  for (const auto& p : f.people) {
    nlohmann::json person;
    person["person_id"] = {-1};
    nlohmann::json body = nlohmann::json::array();
    for (int j = 0; j < kBodyJointCount; ++j)
      for (int c = 0; c < 3; ++c) body.push_back(p.body(j, c));
    person["pose_keypoints_2d"] = std::move(body);
    person["face_keypoints_2d"] = nlohmann::json::array();
    person["hand_left_keypoints_2d"] = nlohmann::json::array();
    person["hand_right_keypoints_2d"] = nlohmann::json::array();
    doc["people"].push_back(std::move(person));
  }
  return doc.dump() + "\n";
}

std::string keypoint_file_name(std::int64_t index) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%012lld_keypoints.json",
                static_cast<long long>(index));
  return buf;
}

}  // namespace

void write_fixture(const fs::path& root, std::uint64_t seed, int frames,
                   int width, int height) {
  const auto source = dancing_clip(seed, 2, frames, width, height,
                                   height * 0.70, height * 0.40, height * 0.12);
  const auto target = dancing_clip(seed + 1, 2, frames, width, height,
                                   height * 0.80, height * 0.50, height * 0.08);
  std::vector<std::vector<float>> features;
  for (int t = 0; t < frames; ++t) {
    write_file(root / "source" / "detections" / keypoint_file_name(t),
               openpose_json(source[t]));
    write_file(root / "target" / "detections" / keypoint_file_name(t),
               openpose_json(target[t]));
    const Image frame = appearance_frame(target[t], width, height);
    fs::create_directories(root / "target" / "frames");
    write_png(root / "target" / "frames" / frame_file_name(t), frame);
    features.push_back(image_descriptor(frame));
  }
  const auto feat = encode_feature_file(features);
  write_file(root / "target" / "features.mpfv",
             std::string_view(reinterpret_cast<const char*>(feat.data()),
                              feat.size()));

  nlohmann::json cfg;
  cfg["person_count"] = 2;
  cfg["source"] = {{"detections", "source/detections"},
                   {"width", width},
                   {"height", height},
                   {"frame_rate", 30.0}};
  cfg["target"] = {{"detections", "target/detections"},
                   {"frames", "target/frames"},
                   {"features", "target/features.mpfv"},
                   {"width", width},
                   {"height", height},
                   {"frame_rate", 30.0}};
  cfg["render"] = {{"width", width},
                   {"height", height},
                   {"limb_thickness", 3},
                   {"joint_radius", 2},
                   {"face_mode", "none"},
                   {"min_confidence", 0.05}};
  cfg["smoothing"] = {{"beta", 0.3}};
  cfg["similarity"] = {{"min_shared_joints", 3}};
  cfg["quantiles"] = {{"low", 0.05}, {"high", 0.95}};
  cfg["slot_map"] = {0, 1};
  cfg["export"] = {{"train_ratio", 0.9}};
  cfg["seed"] = seed;
  cfg["output"] = "out";
  write_file(root / "pipeline.json", cfg.dump(2) + "\n");
}

}  // namespace mpt::synthetic
