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

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "mpt/pose.hpp"

namespace mpt {

/// Parse one OpenPose-style per-frame JSON export. Hand arrays and unknown
/// keys are ignored. frame_index, image_width and image_height are left at
/// zero for the caller to fill in.
///
/// Throws Error(kData) with the byte offset on malformed JSON, the person
/// index on wrong array arity, and on any non-finite value.
FrameDetections parse_detection_file(std::string_view bytes);

/// Per-frame files of one sequence, in frame order.
struct DetectionFileSet {
  std::filesystem::path directory;
  std::vector<std::string> file_names;
};

/// Lists *.json in `dir` sorted lexicographically. Throws on an empty or
/// missing directory.
DetectionFileSet list_detection_files(const std::filesystem::path& dir);

std::vector<FrameDetections> load_sequence(const DetectionFileSet& files,
                                           const SequenceMeta& meta);

// Canonical sequence documents (single versioned JSON file). See
// docs/formats.md for the schema.
inline constexpr int kCanonicalVersion = 1;

struct DetectionSequence {
  SequenceMeta meta;
  std::vector<FrameDetections> frames;
};

struct TrackedSequence {
  SequenceMeta meta;
  std::vector<TrackedFrame> frames;
};

std::string write_canonical(const std::vector<FrameDetections>& frames,
                            const SequenceMeta& meta);
DetectionSequence read_canonical(std::string_view bytes);

std::string write_canonical_tracked(const std::vector<TrackedFrame>& frames,
                                    const SequenceMeta& meta);
TrackedSequence read_canonical_tracked(std::string_view bytes);

// Small file helpers shared by the pipeline stages.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

}  // namespace mpt
