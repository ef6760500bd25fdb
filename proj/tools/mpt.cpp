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

// mpt: command-line front end for the multi-person transfer pipeline.
//
//   mpt [--config FILE] [--out PATH] [--seed N] [--json-errors] <command> ...
//
// Exit codes: 0 ok, 1 usage, 2 data, 3 I/O.

#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mpt/error.hpp"
#include "mpt/pipeline.hpp"

namespace {

namespace fs = std::filesystem;

struct Globals {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  bool json_errors = false;
};

void report_error(const Globals& g, mpt::ErrorKind kind, const std::string& msg) {
  if (g.json_errors) {
    nlohmann::json j{{"error",
                      {{"kind", mpt::to_string(kind)},
                       {"exit_code", static_cast<int>(kind)},
                       {"message", msg}}}};
    std::cerr << j.dump() << "\n";
  } else {
    std::cerr << "mpt: " << mpt::to_string(kind) << " error: " << msg << "\n";
  }
}

// Stage defaults come from --config when one is given.
struct Defaults {
  std::optional<mpt::PipelineConfig> cfg;

  mpt::RenderConfig render() const { return cfg ? cfg->render : mpt::RenderConfig{}; }
  mpt::SmoothingConfig smoothing() const {
    return cfg ? cfg->smoothing : mpt::SmoothingConfig{};
  }
  mpt::SimilarityConfig similarity() const {
    return cfg ? cfg->similarity : mpt::SimilarityConfig{};
  }
  mpt::QuantileSettings quantiles() const {
    return cfg ? cfg->quantiles : mpt::QuantileSettings{};
  }
};

fs::path require_out(const Globals& g, const char* cmd) {
  if (g.out.empty()) throw mpt::usage_error(std::string(cmd) + " requires --out");
  return g.out;
}

std::vector<int> parse_slot_map(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw mpt::usage_error("bad --slot-map entry '" + item + "'");
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-person pose transfer pipeline"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config, "pipeline config JSON");
  app.add_option("--out", g.out, "output file or directory");
  app.add_option("--seed", g.seed, "seed for the dataset split");
  app.add_flag("--json-errors", g.json_errors, "print errors as JSON on stderr");
  app.set_version_flag("--version", mpt::kVersion);

  // ingest
  auto* ingest = app.add_subcommand("ingest", "OpenPose JSON directory -> canonical sequence");
  std::string ing_dir, ing_role = "source";
  int ing_persons = 0, ing_w = 1024, ing_h = 512;
  double ing_fps = 30.0;
  ingest->add_option("--detections", ing_dir, "directory of *_keypoints.json")->required();
  ingest->add_option("--persons", ing_persons, "person count N")->required();
  ingest->add_option("--width", ing_w);
  ingest->add_option("--height", ing_h);
  ingest->add_option("--frame-rate", ing_fps);
  ingest->add_option("--role", ing_role, "source or target");

  // track
  auto* track = app.add_subcommand("track", "assign detections to persistent slots");
  std::string trk_in, trk_report;
  std::optional<int> trk_min_shared;
  track->add_option("--in", trk_in, "canonical detection sequence")->required();
  track->add_option("--report", trk_report, "drop report JSON");
  track->add_option("--min-shared", trk_min_shared, "min shared joints for a match");

  // stats
  auto* stats = app.add_subcommand("stats", "per-subject floor statistics");
  std::string st_src, st_dst, st_map;
  std::optional<double> st_low, st_high;
  stats->add_option("--source", st_src, "tracked source sequence")->required();
  stats->add_option("--target", st_dst, "tracked target sequence")->required();
  stats->add_option("--low", st_low, "low quantile");
  stats->add_option("--high", st_high, "high quantile");
  stats->add_option("--slot-map", st_map, "comma-separated target slot per source slot");

  // retarget
  auto* retarget = app.add_subcommand("retarget", "map source poses into the target frame");
  std::string rt_in, rt_params;
  std::optional<double> rt_beta;
  retarget->add_option("--in", rt_in, "tracked source sequence")->required();
  retarget->add_option("--params", rt_params, "normalization params JSON")->required();
  retarget->add_option("--beta", rt_beta, "temporal smoothing factor in [0, 1)");

  // render
  auto* render = app.add_subcommand("render", "draw label maps");
  std::string rn_in, rn_face;
  std::optional<int> rn_w, rn_h, rn_thick, rn_radius;
  render->add_option("--in", rn_in, "tracked sequence")->required();
  render->add_option("--width", rn_w);
  render->add_option("--height", rn_h);
  render->add_option("--thickness", rn_thick);
  render->add_option("--radius", rn_radius);
  render->add_option("--face", rn_face, "none, eight, sixty-eight or seventy");

  // export
  auto* exp = app.add_subcommand("export", "paired label/image dataset");
  std::string ex_labels, ex_images;
  std::optional<double> ex_ratio;
  bool ex_match = false;
  exp->add_option("--labels", ex_labels)->required();
  exp->add_option("--images", ex_images)->required();
  exp->add_option("--train-ratio", ex_ratio);
  exp->add_flag("--match-labels", ex_match, "ignore images without a label");

  // synthesize
  auto* synth = app.add_subcommand("synthesize", "nearest-neighbour frame synthesis");
  std::string sy_index, sy_frames, sy_query;
  synth->add_option("--index", sy_index, "tracked target sequence")->required();
  synth->add_option("--frames", sy_frames, "target frame PNGs")->required();
  synth->add_option("--query", sy_query, "tracked query sequence")->required();

  // evaluate
  auto* eval = app.add_subcommand("evaluate", "PSNR, SSIM and FID report");
  std::string ev_synth, ev_truth;
  std::optional<std::string> ev_fs, ev_ft;
  eval->add_option("--synth", ev_synth)->required();
  eval->add_option("--truth", ev_truth)->required();
  eval->add_option("--synth-features", ev_fs);
  eval->add_option("--truth-features", ev_ft);

  auto* pipeline = app.add_subcommand("pipeline", "run every stage from --config");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    report_error(g, mpt::ErrorKind::kUsage, e.what());
    return static_cast<int>(mpt::ErrorKind::kUsage);
  }

  try {
    Defaults d;
    if (!g.config.empty()) d.cfg = mpt::PipelineConfig::load(g.config);

    if (*ingest) {
      mpt::SequenceMeta meta;
      meta.person_count = ing_persons;
      meta.width = ing_w;
      meta.height = ing_h;
      meta.frame_rate = ing_fps;
      meta.role = mpt::parse_role(ing_role);
      mpt::cmd_ingest({ing_dir, require_out(g, "ingest"), meta});
    } else if (*track) {
      auto sim = d.similarity();
      if (trk_min_shared) sim.min_shared_joints = *trk_min_shared;
      const auto report =
          mpt::cmd_track({trk_in, require_out(g, "track"), trk_report, sim});
      std::cout << report.summary();
    } else if (*stats) {
      auto q = d.quantiles();
      if (st_low) q.low = *st_low;
      if (st_high) q.high = *st_high;
      std::vector<int> map = d.cfg ? d.cfg->slot_map : std::vector<int>{};
      if (!st_map.empty()) map = parse_slot_map(st_map);
      mpt::cmd_stats({st_src, st_dst, require_out(g, "stats"), q, map});
    } else if (*retarget) {
      auto sm = d.smoothing();
      if (rt_beta) sm.beta = *rt_beta;
      const auto flagged =
          mpt::cmd_retarget({rt_in, rt_params, require_out(g, "retarget"), sm});
      if (flagged) std::cout << flagged << " pose(s) without a valid ankle\n";
    } else if (*render) {
      auto rc = d.render();
      if (rn_w) rc.width = *rn_w;
      if (rn_h) rc.height = *rn_h;
      if (rn_thick) rc.limb_thickness = *rn_thick;
      if (rn_radius) rc.joint_radius = *rn_radius;
      if (!rn_face.empty()) rc.face_mode = mpt::parse_face_mode(rn_face);
      mpt::cmd_render({rn_in, require_out(g, "render"), rc});
    } else if (*exp) {
      double ratio = d.cfg ? d.cfg->train_ratio : 0.9;
      if (ex_ratio) ratio = *ex_ratio;
      const std::uint64_t seed = g.seed ? *g.seed : (d.cfg ? d.cfg->seed : 0);
      const auto ds = mpt::cmd_export(
          {ex_labels, ex_images, require_out(g, "export"), ratio, seed, ex_match});
      std::cout << ds.train.size() << " train, " << ds.test.size() << " test\n";
    } else if (*synth) {
      mpt::cmd_synthesize({sy_index, sy_frames, sy_query, require_out(g, "synthesize")});
    } else if (*eval) {
      std::optional<fs::path> fs_, ft_;
      if (ev_fs) fs_ = *ev_fs;
      if (ev_ft) ft_ = *ev_ft;
      const auto report = mpt::cmd_evaluate(
          {ev_synth, ev_truth, fs_, ft_, require_out(g, "evaluate")});
      std::cout << report.to_json();
    } else if (*pipeline) {
      if (!d.cfg) throw mpt::usage_error("pipeline requires --config");
      auto cfg = *d.cfg;
      if (!g.out.empty()) cfg.output = g.out;
      if (g.seed) cfg.seed = *g.seed;
      const auto result = mpt::cmd_pipeline(cfg);
      std::cout << "source: " << result.source_drops.summary()
                << "target: " << result.target_drops.summary()
                << "report: " << (result.out_dir / "report.json").string() << "\n";
    }
  } catch (const mpt::Error& e) {
    report_error(g, e.kind(), e.what());
    return e.exit_code();
  } catch (const std::filesystem::filesystem_error& e) {
    report_error(g, mpt::ErrorKind::kIo, e.what());
    return static_cast<int>(mpt::ErrorKind::kIo);
  } catch (const std::exception& e) {
    report_error(g, mpt::ErrorKind::kData, e.what());
    return static_cast<int>(mpt::ErrorKind::kData);
  }
  return 0;
}
