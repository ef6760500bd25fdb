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

// Acceptance checks. One PASS/FAIL line per criterion; exit status is the
// number of failures.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <set>
#include <string>

#include <json.hpp>

#include "mpt/error.hpp"
#include "mpt/ingest.hpp"
#include "mpt/metrics.hpp"
#include "mpt/pipeline.hpp"
#include "mpt/render.hpp"
#include "mpt/retarget.hpp"
#include "mpt/synthetic.hpp"
#include "mpt/tracking.hpp"

namespace {

namespace fs = std::filesystem;
using namespace mpt;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("mpt_acceptance_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::vector<FrameDetections> detections_of(const std::vector<synthetic::LabeledFrame>& clip) {
  std::vector<FrameDetections> out;
  for (const auto& f : clip) out.push_back(f.detections);
  return out;
}

Outcome identity_switches() {
  const auto t0 = Clock::now();
  int switches = 0, frames = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto clip = synthetic::crossing_clip(1000 + seed);
    const auto res = track_sequence(detections_of(clip), 2);
    switches += synthetic::count_identity_switches(clip, res.frames);
    frames += static_cast<int>(res.frames.size());
  }
  const double secs = seconds_since(t0);
  return {switches == 0 && frames == 50 * 60 && secs < 5.0,
          std::to_string(switches) + " switches over " + std::to_string(frames) +
              " frames, " + fmt("%.3f s", secs)};
}

Outcome over_detection() {
  std::mt19937_64 rng(77);
  int exact = 0, clips = 0, bad_ids = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed, ++clips) {
    auto clip = synthetic::crossing_clip(2000 + seed);
    const int k = 1 + static_cast<int>(rng() % 10);
    std::set<std::int64_t> injected;
    while (static_cast<int>(injected.size()) < k) injected.insert(rng() % clip.size());
    for (auto t : injected) {
      std::uniform_real_distribution<double> x(50, 950), y(250, 450);
      clip[t].detections.people.insert(
          clip[t].detections.people.begin() + rng() % 3,
          synthetic::standing_pose(x(rng), y(rng), 100 + 60 * (rng() % 100) / 100.0));
      clip[t].truth.insert(clip[t].truth.begin(), -1);  // keep sizes aligned
    }
    const auto res = track_sequence(detections_of(clip), 2);
    std::set<std::int64_t> kept, missing;
    for (const auto& f : res.frames) kept.insert(f.frame_index);
    for (const auto& f : clip)
      if (!kept.count(f.detections.frame_index)) missing.insert(f.detections.frame_index);
    const std::size_t dropped = res.report.dropped_frames.size() + res.report.init_skip_count;
    // Identity check on the untouched frames only.
    std::vector<synthetic::LabeledFrame> clean;
    for (const auto& f : synthetic::crossing_clip(2000 + seed))
      if (!injected.count(f.detections.frame_index)) clean.push_back(f);
    const int sw = synthetic::count_identity_switches(clean, res.frames);
    bad_ids += sw;
    exact += missing == injected && dropped == injected.size() && sw == 0;
  }
  return {exact == clips, std::to_string(exact) + "/" + std::to_string(clips) +
                              " clips with exactly k dropped frames, " +
                              std::to_string(bad_ids) + " identity switches elsewhere"};
}

SubjectStats random_stats(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0, 1);
  const double far = 50 + 400 * u(rng);
  const double span = u(rng) < 0.1 ? 0.0 : 200 * u(rng);
  return {far, far + span, 20 + 200 * u(rng), 20 + 200 * u(rng)};
}

PersonPose random_pose(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0, 1);
  PersonPose p = synthetic::standing_pose(1000 * u(rng), 600 * u(rng), 30 + 200 * u(rng),
                                          u(rng) < 0.5);
  synthetic::jitter(p, 5.0, rng);
  for (int j = 0; j < kBodyJointCount; ++j)
    if (u(rng) < 0.2) p.body(j, 2) = 0.0;
  const int keep = body25::kAnkles[rng() % 2];
  if (!p.joint_valid(keep)) p.body(keep, 2) = 0.5;
  return p;
}

Outcome feet_on_floor() {
  std::mt19937_64 rng(303);
  int inside = 0, exact = 0;
  double worst = 0;
  for (int i = 0; i < 1000; ++i) {
    const SubjectPair pair{random_stats(rng), random_stats(rng)};
    const auto r = retarget_pose(random_pose(rng), pair);
    const double y = (*ankle_anchor(r.pose))(1);
    const double lo = pair.target.y_far, hi = pair.target.y_close;
    exact += !r.flagged && r.floor_y >= lo && r.floor_y <= hi;
    const double excess = std::max({0.0, lo - y, y - hi});
    worst = std::max(worst, excess);
    inside += excess <= 1e-9;
  }
  return {inside == 1000 && exact == 1000,
          std::to_string(inside) + "/1000 ankle lines inside the band (mapped line exact in " +
              std::to_string(exact) + "/1000, worst excess " + fmt("%.2e px)", worst)};
}

Outcome retarget_identity() {
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> u(0, 1);
  double worst = 0;
  for (int i = 0; i < 1000; ++i) {
    const SubjectStats s = random_stats(rng);
    PersonPose p = random_pose(rng);
    // Place the ankle line inside the source band.
    const double shift = s.y_far + u(rng) * (s.y_close - s.y_far) - (*ankle_anchor(p))(1);
    p.body.col(1).array() += shift;
    if (p.face) p.face->col(1).array() += shift;
    const auto r = retarget_pose(p, {s, s});
    worst = std::max(worst, (r.pose.body - p.body).cwiseAbs().maxCoeff());
    if (p.face) worst = std::max(worst, (*r.pose.face - *p.face).cwiseAbs().maxCoeff());
  }
  return {worst <= 1e-9, "max deviation " + fmt("%.2e px over 1000 poses", worst)};
}

Outcome metrics() {
  std::mt19937_64 rng(505);
  std::vector<std::string> parts;
  bool ok = true;

  Image a(64, 48);
  for (auto& v : a.data) v = static_cast<std::uint8_t>(rng() % 256);
  const double s = ssim(a, a);
  ok &= std::abs(s - 1.0) <= 1e-12;
  parts.push_back("SSIM(a,a)-1=" + fmt("%.1e", s - 1.0));

  const double p = psnr(Image(32, 32, 3, 100), Image(32, 32, 3, 105));
  ok &= std::abs(p - 34.1514) <= 1e-3;
  parts.push_back("PSNR=" + fmt("%.4f", p));

  std::uniform_real_distribution<double> u(0, 1);
  double worst_rel = 0, worst_self = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 1 + static_cast<int>(rng() % 16);
    FeatureStats<double> s1, s2;
    s1.mean = Eigen::VectorXd::NullaryExpr(d, [&] { return 4 * u(rng) - 2; });
    s2.mean = Eigen::VectorXd::NullaryExpr(d, [&] { return 4 * u(rng) - 2; });
    const Eigen::VectorXd v1 = Eigen::VectorXd::NullaryExpr(d, [&] { return 0.01 + 5 * u(rng); });
    const Eigen::VectorXd v2 = Eigen::VectorXd::NullaryExpr(d, [&] { return 0.01 + 5 * u(rng); });
    s1.covariance = v1.asDiagonal();
    s2.covariance = v2.asDiagonal();
    const double oracle = (s1.mean - s2.mean).squaredNorm() +
                          (v1.cwiseSqrt() - v2.cwiseSqrt()).squaredNorm();
    const double got = frechet_distance(s1, s2);
    worst_rel = std::max(worst_rel, std::abs(got - oracle) / std::max(oracle, 1e-300));
    worst_self = std::max(worst_self, std::abs(frechet_distance(s1, s1)));
  }
  ok &= worst_rel <= 1e-6 && worst_self <= 1e-9;
  parts.push_back("FID rel err " + fmt("%.1e", worst_rel));
  parts.push_back("FID(s,s)=" + fmt("%.1e", worst_self));

  std::string detail;
  for (const auto& x : parts) detail += (detail.empty() ? "" : ", ") + x;
  return {ok, detail};
}

std::string random_body(std::mt19937_64& rng, std::size_t n) {
  std::string s = "[";
  for (std::size_t i = 0; i < n; ++i) s += (i ? "," : "") + std::to_string(rng() % 1000);
  return s + "]";
}

Outcome parser_robustness() {
  std::mt19937_64 rng(606);
  const std::vector<std::string> seeds = {
      R"({"people":[{"pose_keypoints_2d":)" + random_body(rng, 75) + "}]}",
      R"({"version":1.3,"people":[{"pose_keypoints_2d":)" + random_body(rng, 75) +
          R"(,"face_keypoints_2d":)" + random_body(rng, 210) +
          R"(,"hand_left_keypoints_2d":[]}]})",
      R"({"people":[]})",
      R"({"people":[{"pose_keypoints_2d":[1e400,0,0]}]})",
      R"({"people":{"pose_keypoints_2d":null}})",
  };
  const std::string alphabet = "{}[]\",:0123456789.eE+-truefalsnul \n\t\\";
  int values = 0, errors = 0, crashes = 0;
  for (int i = 0; i < 10000; ++i) {
    std::string s;
    if (i % 5 == 0) {
      const std::size_t len = rng() % 300;
      for (std::size_t k = 0; k < len; ++k)
        s += (rng() % 2) ? alphabet[rng() % alphabet.size()] : static_cast<char>(rng() % 256);
    } else if (i % 5 == 1) {
      // Structure-preserving: rewrite digits and pad whitespace.
      s = seeds[rng() % 3];
      for (char& c : s)
        if (c >= '0' && c <= '9' && rng() % 4 == 0) c = static_cast<char>('0' + rng() % 10);
      s.insert(s.find(':') + 1, std::string(rng() % 4, ' '));
    } else {
      s = seeds[rng() % seeds.size()];
      const int edits = 1 + static_cast<int>(rng() % 10);
      for (int e = 0; e < edits && !s.empty(); ++e) {
        const std::size_t at = rng() % s.size();
        switch (rng() % 4) {
          case 0: s[at] = alphabet[rng() % alphabet.size()]; break;
          case 1: s.erase(at, 1 + rng() % 8); break;
          case 2: s.insert(at, 1, static_cast<char>(rng() % 256)); break;
          default: s = s.substr(0, at);
        }
      }
    }
    try {
      parse_detection_file(s);
      ++values;
    } catch (const Error&) {
      ++errors;
    } catch (...) {
      ++crashes;  // anything other than a structured error counts as a failure
    }
  }

  int round_trips = 0;
  std::uniform_real_distribution<double> coord(-1e4, 1e4), conf(0, 1);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<FrameDetections> frames;
    const int n = 1 + static_cast<int>(rng() % 10);
    for (int t = 0; t < n; ++t) {
      FrameDetections f;
      f.frame_index = t * (1 + static_cast<int>(rng() % 3));
      if (t && f.frame_index <= frames.back().frame_index) f.frame_index = frames.back().frame_index + 1;
      f.image_width = 1024;
      f.image_height = 512;
      for (int k = static_cast<int>(rng() % 5); k > 0; --k) {
        PersonPose p;
        for (int j = 0; j < kBodyJointCount; ++j)
          p.set_joint(j, {coord(rng), coord(rng), rng() % 4 ? conf(rng) : 0.0});
        if (rng() % 2) {
          p.face = KeypointMatrix(kFaceLandmarkCount, 3);
          for (int j = 0; j < kFaceLandmarkCount; ++j)
            p.face->row(j) << coord(rng), coord(rng), conf(rng);
        }
        f.people.push_back(std::move(p));
      }
      frames.push_back(std::move(f));
    }
    SequenceMeta meta{1 + static_cast<int>(rng() % 5), 1024, 512, 30 * conf(rng),
                      rng() % 2 ? SequenceRole::kSource : SequenceRole::kTarget};
    const auto back = read_canonical(write_canonical(frames, meta));
    round_trips += back.frames == frames && back.meta == meta;
  }
  return {crashes == 0 && values + errors == 10000 && round_trips == 100,
          std::to_string(values) + " values, " + std::to_string(errors) +
              " structured errors, " + std::to_string(crashes) + " crashes; " +
              std::to_string(round_trips) + "/100 exact round-trips"};
}

Outcome render_determinism() {
  std::vector<TrackedFrame> frames;
  for (const auto& f : synthetic::dancing_clip(9, 3, 12, 1024, 512, 420, 250, 40)) {
    TrackedFrame t;
    t.frame_index = f.frame_index;
    for (const auto& p : f.people) t.slots.emplace_back(p);
    frames.push_back(std::move(t));
  }
  RenderConfig cfg;
  cfg.face_mode = FaceMode::kSeventy;
  const fs::path dir = scratch("render");
  const PaletteSpec pal(3);
  const auto m = render_sequence(frames, pal, cfg, dir / "a");
  render_sequence(frames, pal, cfg, dir / "b");
  int identical = 0;
  for (const auto& name : m.files)
    identical += read_file(dir / "a" / name) == read_file(dir / "b" / name);
  identical += read_file(dir / "a/manifest.json") == read_file(dir / "b/manifest.json");

  bool gaps_ok = true;
  std::string gaps;
  for (int n = 2; n <= 5; ++n) {
    const double gap = PaletteSpec(n).min_inter_person_gap();
    const double need = 0.3 * 360.0 / n;
    // The gap equals the threshold analytically; allow for rounding of the
    // hue arithmetic.
    gaps_ok &= gap >= need - 1e-9;
    gaps += " N=" + std::to_string(n) + ":" + fmt("%.4f", gap) + ">=" + fmt("%.1f", need);
  }
  const int expected = static_cast<int>(m.files.size()) + 1;
  return {identical == expected && gaps_ok,
          std::to_string(identical) + "/" + std::to_string(expected) +
              " files byte-identical; gaps" + gaps};
}

Outcome end_to_end() {
  const fs::path dir = scratch("e2e");
  synthetic::write_fixture(dir, 7, 60, 256, 128);
  auto cfg = PipelineConfig::load(dir / "pipeline.json");
  const auto t0 = Clock::now();
  const auto res = cmd_pipeline(cfg);
  const double secs = seconds_since(t0);
  const auto report = nlohmann::json::parse(read_file(res.out_dir / "report.json"));
  const bool inf = report.at("PSNR_infinite").get<bool>() && std::isinf(res.self_report.mean_psnr);
  const double fid = res.self_report.fid ? *res.self_report.fid : -1.0;
  const bool drops = res.source_drops.dropped_frames.empty() &&
                     res.target_drops.dropped_frames.empty();
  return {secs < 10.0 && inf && fid >= 0 && fid <= 1e-9 &&
              res.self_report.frames.size() == 60 && drops,
          fmt("%.3f s, ", secs) + std::to_string(res.self_report.frames.size()) +
              " frames, PSNR " + (inf ? "inf" : "finite") + ", FID " + fmt("%.2e", fid) +
              (drops ? ", no drops" : ", frames dropped")};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"identity switches on 50 crossing clips", identity_switches},
      {"over-detection drops exactly k frames", over_detection},
      {"feet on floor for 1000 retargeted poses", feet_on_floor},
      {"identity retarget within 1e-9 px", retarget_identity},
      {"metric correctness (SSIM, PSNR, Frechet)", metrics},
      {"parser fuzz and canonical round-trip", parser_robustness},
      {"render determinism and palette separation", render_determinism},
      {"end-to-end pipeline on the bundled fixture", end_to_end},
  };
  int failures = 0, idx = 0;
  for (const auto& [name, check] : criteria) {
    ++idx;
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s [%d] %s: %s\n", o.pass ? "PASS" : "FAIL", idx, name.c_str(),
                o.detail.c_str());
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures;
}
