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
#include <string>
#include <vector>

#include "mpt/pose.hpp"

namespace mpt {

/// Concatenated body-joint coordinates of all N slots of one frame, with a
/// per-joint validity mask. Row k*25 + j is joint j of slot k.
struct PoseSignature {
  Eigen::Matrix<double, Eigen::Dynamic, 2> coords;
  Eigen::Array<bool, Eigen::Dynamic, 1> valid;
};

/// Throws Error(kData) if any slot is empty.
PoseSignature make_signature(const TrackedFrame& frame);

/// Mean Euclidean distance over joints valid in both signatures; +inf when
/// nothing is shared or the slot counts differ.
double signature_distance(const PoseSignature& a, const PoseSignature& b);

struct PoseIndexEntry {
  std::int64_t frame_id = 0;
  PoseSignature signature;
  std::filesystem::path image;  // empty when built without an image dir
};

class PoseIndex {
 public:
  PoseIndex() = default;
  explicit PoseIndex(std::vector<PoseIndexEntry> entries);

  const std::vector<PoseIndexEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  const PoseIndexEntry* find(std::int64_t frame_id) const;

 private:
  std::vector<PoseIndexEntry> entries_;  // ascending frame_id
};

/// One entry per frame with every slot filled. Throws when none qualify.
PoseIndex build_index(const std::vector<TrackedFrame>& frames);

/// As above, and each entry must have frame%06d.png in `image_dir`.
PoseIndex build_index(const std::vector<TrackedFrame>& frames,
                      const std::filesystem::path& image_dir);

struct Retrieval {
  std::int64_t frame_id = 0;
  double distance = 0.0;
};

/// Nearest indexed frame; ties go to the lower frame id.
Retrieval synthesize_frame(const TrackedFrame& query, const PoseIndex& index);

struct SynthesisRecord {
  std::int64_t query_frame = 0;
  Retrieval match;
};

/// Copies the retrieved target image for every complete query frame to
/// out_dir/frame%06d.png (named by the query frame) and writes
/// out_dir/manifest.json. Incomplete query frames are skipped.
std::vector<SynthesisRecord> synthesize_sequence(
    const std::vector<TrackedFrame>& queries, const PoseIndex& index,
    const std::filesystem::path& out_dir);

struct PairedDataset {
  std::filesystem::path root;
  std::vector<std::string> train;
  std::vector<std::string> test;
  std::uint64_t seed = 0;
  double ratio = 0.9;
};

/// Writes train_label/, train_img/, test_label/, test_img/ and manifest.json
/// under `out_dir`. Labels and images pair by file name; any unmatched name
/// is a pairing error. The split is a seeded shuffle.
PairedDataset export_paired(const std::vector<std::filesystem::path>& labels,
                            const std::vector<std::filesystem::path>& images,
                            double train_ratio, std::uint64_t seed,
                            const std::filesystem::path& out_dir);

/// Seeded Fisher-Yates permutation of 0..n-1 (std::mt19937_64 draws).
std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed);

}  // namespace mpt
