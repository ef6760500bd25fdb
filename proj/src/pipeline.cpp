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

#include "mpt/pipeline.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cstdio>
#include <iostream>

#include <json.hpp>

#include "mpt/error.hpp"
#include "mpt/ingest.hpp"

namespace mpt {

using nlohmann::json;
namespace fs = std::filesystem;

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(),
                 nullptr) != 1)
    throw io_error("sha256 failed");
  std::string hex;
  hex.reserve(len * 2);
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

std::string hash_path(const fs::path& p) {
  std::error_code ec;
  if (fs::is_directory(p, ec)) {
    std::vector<std::string> names;
    for (const auto& e : fs::directory_iterator(p))
      if (e.is_regular_file()) names.push_back(e.path().filename().string());
    std::sort(names.begin(), names.end());
    std::string listing;
    for (const auto& n : names)
      listing += n + " " + sha256_hex(read_file(p / n)) + "\n";
    return sha256_hex(listing);
  }
  return sha256_hex(read_file(p));
}

void write_run_info(const fs::path& where, const std::string& stage,
                    const std::string& config_json,
                    const std::vector<fs::path>& inputs) {
  json j;
  j["stage"] = stage;
  j["version"] = kVersion;
  j["config"] = json::parse(config_json);
  j["config_sha256"] = sha256_hex(config_json);
  j["inputs"] = json::array();
  for (const auto& in : inputs)
    j["inputs"].push_back({{"path", in.generic_string()},
                           {"sha256", hash_path(in)}});
  write_file(where, j.dump(2) + "\n");
}

namespace {

fs::path runinfo_for(const fs::path& artifact) {
  return fs::path(artifact.string() + ".runinfo.json");
}

void require_exists(const fs::path& p, const char* what) {
  std::error_code ec;
  if (!fs::exists(p, ec))
    throw io_error(std::string(what) + " not found: " + p.string());
}

TrackedSequence load_tracked(const fs::path& p) {
  require_exists(p, "tracked sequence");
  try {
    return read_canonical_tracked(read_file(p));
  } catch (const Error& e) {
    throw Error(e.kind(), p.string() + ": " + e.what());
  }
}

std::vector<fs::path> png_files(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec))
    throw io_error("directory not found: " + dir.string());
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".png")
      out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

json render_json(const RenderConfig& r) {
  return {{"width", r.width},
          {"height", r.height},
          {"limb_thickness", r.limb_thickness},
          {"joint_radius", r.joint_radius},
          {"face_mode", to_string(r.face_mode)},
          {"min_confidence", r.min_confidence}};
}

json quantile_json(const QuantileSettings& q) {
  return {{"low", q.low},
          {"high", q.high},
          {"min_frames", q.min_frames},
          {"band_fraction", q.band_fraction}};
}

json source_json(const SequenceSource& s) {
  json j{{"detections", s.detections.generic_string()},
         {"width", s.width},
         {"height", s.height},
         {"frame_rate", s.frame_rate}};
  if (!s.frames.empty()) j["frames"] = s.frames.generic_string();
  if (!s.features.empty()) j["features"] = s.features.generic_string();
  return j;
}

SequenceSource source_from(const json& j, const fs::path& base) {
  SequenceSource s;
  auto resolve = [&](const std::string& v) {
    fs::path p(v);
    return p.is_absolute() ? p : base / p;
  };
  s.detections = resolve(j.at("detections").get<std::string>());
  if (j.contains("frames")) s.frames = resolve(j.at("frames").get<std::string>());
  if (j.contains("features"))
    s.features = resolve(j.at("features").get<std::string>());
  s.width = j.value("width", s.width);
  s.height = j.value("height", s.height);
  s.frame_rate = j.value("frame_rate", s.frame_rate);
  return s;
}

}  // namespace

PipelineConfig PipelineConfig::load(const fs::path& path) {
  require_exists(path, "config file");
  const std::string text = read_file(path);
  const fs::path base = path.has_parent_path() ? path.parent_path() : fs::path(".");
  try {
    const json j = json::parse(text);
    PipelineConfig c;
    c.person_count = j.at("person_count").get<int>();
    if (c.person_count < 1) throw usage_error("person_count must be >= 1");
    c.source = source_from(j.at("source"), base);
    c.target = source_from(j.at("target"), base);
    if (auto r = j.find("render"); r != j.end()) {
      c.render.width = r->value("width", c.render.width);
      c.render.height = r->value("height", c.render.height);
      c.render.limb_thickness = r->value("limb_thickness", c.render.limb_thickness);
      c.render.joint_radius = r->value("joint_radius", c.render.joint_radius);
      c.render.face_mode = parse_face_mode(r->value("face_mode", std::string("none")));
      c.render.min_confidence = r->value("min_confidence", c.render.min_confidence);
    }
    if (auto s = j.find("smoothing"); s != j.end())
      c.smoothing.beta = s->value("beta", c.smoothing.beta);
    if (auto s = j.find("similarity"); s != j.end())
      c.similarity.min_shared_joints =
          s->value("min_shared_joints", c.similarity.min_shared_joints);
    if (auto q = j.find("quantiles"); q != j.end()) {
      c.quantiles.low = q->value("low", c.quantiles.low);
      c.quantiles.high = q->value("high", c.quantiles.high);
      c.quantiles.min_frames = q->value("min_frames", c.quantiles.min_frames);
      c.quantiles.band_fraction = q->value("band_fraction", c.quantiles.band_fraction);
    }
    if (j.contains("slot_map")) c.slot_map = j.at("slot_map").get<std::vector<int>>();
    if (auto e = j.find("export"); e != j.end())
      c.train_ratio = e->value("train_ratio", c.train_ratio);
    c.seed = j.value("seed", std::uint64_t{0});
    const fs::path out(j.value("output", std::string("out")));
    c.output = out.is_absolute() ? out : base / out;
    return c;
  } catch (const json::exception& e) {
    throw usage_error("invalid config " + path.string() + ": " + e.what());
  }
}

std::string PipelineConfig::to_json() const {
  json j;
  j["person_count"] = person_count;
  j["source"] = source_json(source);
  j["target"] = source_json(target);
  j["render"] = render_json(render);
  j["smoothing"] = {{"beta", smoothing.beta}};
  j["similarity"] = {{"min_shared_joints", similarity.min_shared_joints}};
  j["quantiles"] = quantile_json(quantiles);
  j["slot_map"] = slot_map;
  j["export"] = {{"train_ratio", train_ratio}};
  j["seed"] = seed;
  j["output"] = output.generic_string();
  return j.dump();
}

void cmd_ingest(const IngestArgs& args) {
  const auto files = list_detection_files(args.detections);
  const auto frames = load_sequence(files, args.meta);
  write_file(args.out, write_canonical(frames, args.meta));
  const json cfg{{"person_count", args.meta.person_count},
                 {"width", args.meta.width},
                 {"height", args.meta.height},
                 {"frame_rate", args.meta.frame_rate},
                 {"role", to_string(args.meta.role)}};
  write_run_info(runinfo_for(args.out), "ingest", cfg.dump(), {args.detections});
}

DropReport cmd_track(const TrackArgs& args) {
  require_exists(args.in, "detection sequence");
  DetectionSequence seq;
  try {
    seq = read_canonical(read_file(args.in));
  } catch (const Error& e) {
    throw Error(e.kind(), args.in.string() + ": " + e.what());
  }
  auto result = track_sequence(seq.frames, seq.meta.person_count, args.similarity);
  write_file(args.out, write_canonical_tracked(result.frames, seq.meta));
  if (!args.report.empty()) write_file(args.report, result.report.to_json());
  const json cfg{{"min_shared_joints", args.similarity.min_shared_joints}};
  write_run_info(runinfo_for(args.out), "track", cfg.dump(), {args.in});
  return result.report;
}

NormalizationParams cmd_stats(const StatsArgs& args) {
  const auto src = load_tracked(args.source);
  const auto dst = load_tracked(args.target);
  if (src.meta.person_count != dst.meta.person_count)
    throw data_error("source and target person counts differ");
  auto params = compute_normalization(src.frames, dst.frames,
                                      src.meta.person_count, args.quantiles,
                                      args.slot_map);
  write_file(args.out, params.to_json());
  const json cfg{{"quantiles", quantile_json(args.quantiles)},
                 {"slot_map", args.slot_map}};
  write_run_info(runinfo_for(args.out), "stats", cfg.dump(),
                 {args.source, args.target});
  return params;
}

std::size_t cmd_retarget(const RetargetArgs& args) {
  const auto seq = load_tracked(args.in);
  require_exists(args.params, "normalization params");
  const auto params = NormalizationParams::from_json(read_file(args.params));
  auto result = retarget_sequence(seq.frames, params);
  auto smoothed = smooth_sequence(result.frames, args.smoothing);
  SequenceMeta meta = seq.meta;
  meta.role = SequenceRole::kTarget;
  write_file(args.out, write_canonical_tracked(smoothed, meta));
  const json cfg{{"beta", args.smoothing.beta}};
  write_run_info(runinfo_for(args.out), "retarget", cfg.dump(),
                 {args.in, args.params});
  return result.flagged;
}

RenderManifest cmd_render(const RenderArgs& args) {
  const auto seq = load_tracked(args.in);
  const PaletteSpec palette(seq.meta.person_count);
  auto manifest = render_sequence(seq.frames, palette, args.render, args.out_dir);
  write_run_info(args.out_dir / "run_info.json", "render",
                 render_json(args.render).dump(), {args.in});
  return manifest;
}

PairedDataset cmd_export(const ExportArgs& args) {
  const auto labels = png_files(args.labels);
  auto images = png_files(args.images);
  if (args.match_labels) {
    std::vector<std::string> names;
    for (const auto& l : labels) names.push_back(l.filename().string());
    std::erase_if(images, [&](const fs::path& p) {
      return !std::binary_search(names.begin(), names.end(),
                                 p.filename().string());
    });
  }
  auto ds = export_paired(labels, images, args.train_ratio, args.seed, args.out_dir);
  const json cfg{{"train_ratio", args.train_ratio},
                 {"seed", args.seed},
                 {"match_labels", args.match_labels}};
  write_run_info(args.out_dir / "run_info.json", "export", cfg.dump(),
                 {args.labels, args.images});
  return ds;
}

std::vector<SynthesisRecord> cmd_synthesize(const SynthesizeArgs& args) {
  const auto target = load_tracked(args.index);
  const auto query = load_tracked(args.query);
  if (target.meta.person_count != query.meta.person_count)
    throw data_error("query and index person counts differ");
  require_exists(args.frames, "target frame directory");
  const PoseIndex index = build_index(target.frames, args.frames);
  auto records = synthesize_sequence(query.frames, index, args.out_dir);
  write_run_info(args.out_dir / "run_info.json", "synthesize", "{}",
                 {args.index, args.frames, args.query});
  return records;
}

MetricReport cmd_evaluate(const EvaluateArgs& args) {
  auto report = evaluate_sequence(args.synth, args.truth, args.synth_features,
                                  args.truth_features);
  write_file(args.out, report.to_json());
  std::vector<fs::path> inputs{args.synth, args.truth};
  if (args.synth_features) inputs.push_back(*args.synth_features);
  if (args.truth_features) inputs.push_back(*args.truth_features);
  write_run_info(runinfo_for(args.out), "evaluate", "{}", inputs);
  return report;
}

PipelineResult cmd_pipeline(const PipelineConfig& cfg) {
  require_exists(cfg.source.detections, "source detection directory");
  require_exists(cfg.target.detections, "target detection directory");
  require_exists(cfg.target.frames, "target frame directory");
  validate(cfg.render);
  const fs::path out = cfg.output;
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw io_error("cannot create " + out.string());
  write_file(out / "config.json", json::parse(cfg.to_json()).dump(2) + "\n");

  auto meta_for = [&](const SequenceSource& s, SequenceRole role) {
    SequenceMeta m;
    m.person_count = cfg.person_count;
    m.width = s.width;
    m.height = s.height;
    m.frame_rate = s.frame_rate;
    m.role = role;
    return m;
  };
  cmd_ingest({cfg.source.detections, out / "source.seq.json",
              meta_for(cfg.source, SequenceRole::kSource)});
  cmd_ingest({cfg.target.detections, out / "target.seq.json",
              meta_for(cfg.target, SequenceRole::kTarget)});

  PipelineResult result;
  result.out_dir = out;
  result.source_drops = cmd_track({out / "source.seq.json",
                                   out / "source.tracked.json",
                                   out / "source.drops.json", cfg.similarity});
  result.target_drops = cmd_track({out / "target.seq.json",
                                   out / "target.tracked.json",
                                   out / "target.drops.json", cfg.similarity});

  cmd_stats({out / "source.tracked.json", out / "target.tracked.json",
             out / "normalization.json", cfg.quantiles, cfg.slot_map});
  cmd_retarget({out / "source.tracked.json", out / "normalization.json",
                out / "source.retargeted.json", cfg.smoothing});

  cmd_render({out / "source.retargeted.json", out / "labels", cfg.render});
  cmd_render({out / "target.tracked.json", out / "target_labels", cfg.render});
  cmd_export({out / "target_labels", cfg.target.frames, out / "dataset",
              cfg.train_ratio, cfg.seed, true});

  // Source-driven transfer, then self-synthesis of the target clip, which has
  // ground truth and is what gets scored.
  cmd_synthesize({out / "target.tracked.json", cfg.target.frames,
                  out / "source.retargeted.json", out / "synth"});
  const auto self = cmd_synthesize({out / "target.tracked.json",
                                    cfg.target.frames,
                                    out / "target.tracked.json",
                                    out / "self_synth"});
  fs::create_directories(out / "self_truth", ec);
  for (const auto& r : self) {
    const std::string name = frame_file_name(r.query_frame);
    fs::copy_file(cfg.target.frames / name, out / "self_truth" / name,
                  fs::copy_options::overwrite_existing, ec);
    if (ec) throw io_error("cannot copy " + (cfg.target.frames / name).string());
  }
  EvaluateArgs eval{out / "self_synth", out / "self_truth", std::nullopt,
                    std::nullopt, out / "report.json"};
  if (!cfg.target.features.empty()) {
    eval.synth_features = cfg.target.features;
    eval.truth_features = cfg.target.features;
  }
  result.self_report = cmd_evaluate(eval);
  write_run_info(out / "run_info.json", "pipeline", cfg.to_json(),
                 {cfg.source.detections, cfg.target.detections,
                  cfg.target.frames});
  return result;
}

}  // namespace mpt
