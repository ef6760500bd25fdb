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
#include <optional>
#include <string>
#include <vector>

#include "mpt/metrics.hpp"
#include "mpt/render.hpp"
#include "mpt/retarget.hpp"
#include "mpt/synthesis.hpp"
#include "mpt/tracking.hpp"

namespace mpt {

struct SequenceSource {
  std::filesystem::path detections;
  std::filesystem::path frames;    // target only
  std::filesystem::path features;  // optional, target only
  int width = 1024;
  int height = 512;
  double frame_rate = 30.0;
};

/// Whole-run configuration, loaded from one JSON file. Relative paths are
/// resolved against the config file's directory.
struct PipelineConfig {
  int person_count = 1;
  SequenceSource source;
  SequenceSource target;
  RenderConfig render;
  SmoothingConfig smoothing;
  SimilarityConfig similarity;
  QuantileSettings quantiles;
  std::vector<int> slot_map;
  double train_ratio = 0.9;
  std::uint64_t seed = 0;
  std::filesystem::path output = "out";

  static PipelineConfig load(const std::filesystem::path& path);
  std::string to_json() const;  // canonical form, hashed into run-info
};

// Stage commands. Each writes its artifact plus a run-info record
// (<artifact>.runinfo.json, or run_info.json inside directory artifacts).

struct IngestArgs {
  std::filesystem::path detections;
  std::filesystem::path out;
  SequenceMeta meta;
};
void cmd_ingest(const IngestArgs& args);

struct TrackArgs {
  std::filesystem::path in;  // canonical detections
  std::filesystem::path out; // canonical tracked
  std::filesystem::path report;
  SimilarityConfig similarity;
};
DropReport cmd_track(const TrackArgs& args);

struct StatsArgs {
  std::filesystem::path source;  // tracked
  std::filesystem::path target;  // tracked
  std::filesystem::path out;
  QuantileSettings quantiles;
  std::vector<int> slot_map;
};
NormalizationParams cmd_stats(const StatsArgs& args);

struct RetargetArgs {
  std::filesystem::path in;  // tracked source
  std::filesystem::path params;
  std::filesystem::path out;
  SmoothingConfig smoothing;
};
std::size_t cmd_retarget(const RetargetArgs& args);

struct RenderArgs {
  std::filesystem::path in;  // tracked
  std::filesystem::path out_dir;
  RenderConfig render;
};
RenderManifest cmd_render(const RenderArgs& args);

struct ExportArgs {
  std::filesystem::path labels;
  std::filesystem::path images;
  std::filesystem::path out_dir;
  double train_ratio = 0.9;
  std::uint64_t seed = 0;
  bool match_labels = false;  // keep only images that have a label
};
PairedDataset cmd_export(const ExportArgs& args);

struct SynthesizeArgs {
  std::filesystem::path index;   // tracked target
  std::filesystem::path frames;  // target frame PNGs
  std::filesystem::path query;   // tracked (retargeted) sequence
  std::filesystem::path out_dir;
};
std::vector<SynthesisRecord> cmd_synthesize(const SynthesizeArgs& args);

struct EvaluateArgs {
  std::filesystem::path synth;
  std::filesystem::path truth;
  std::optional<std::filesystem::path> synth_features;
  std::optional<std::filesystem::path> truth_features;
  std::filesystem::path out;
};
MetricReport cmd_evaluate(const EvaluateArgs& args);

struct PipelineResult {
  DropReport source_drops;
  DropReport target_drops;
  MetricReport self_report;
  std::filesystem::path out_dir;
};
PipelineResult cmd_pipeline(const PipelineConfig& cfg);

// Run-info helpers.
std::string sha256_hex(std::string_view bytes);
/// Hash of a file, or of the sorted (name, hash) list of a directory.
std::string hash_path(const std::filesystem::path& p);
void write_run_info(const std::filesystem::path& where, const std::string& stage,
                    const std::string& config_json,
                    const std::vector<std::filesystem::path>& inputs);

inline constexpr const char* kVersion = "1.0.0";

}  // namespace mpt
