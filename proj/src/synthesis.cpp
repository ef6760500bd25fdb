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

#include "mpt/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>

#include <json.hpp>

#include "mpt/error.hpp"
#include "mpt/ingest.hpp"
#include "mpt/render.hpp"

namespace mpt {

namespace fs = std::filesystem;

PoseSignature make_signature(const TrackedFrame& frame) {
  const auto n = static_cast<Eigen::Index>(frame.slots.size());
  PoseSignature sig;
  sig.coords.resize(n * kBodyJointCount, 2);
  sig.valid.resize(n * kBodyJointCount);
  for (Eigen::Index s = 0; s < n; ++s) {
    const auto& pose = frame.slots[s];
    if (!pose) {
      throw data_error("frame " + std::to_string(frame.frame_index) +
                       ": slot " + std::to_string(s) + " is empty");
    }
    sig.coords.middleRows(s * kBodyJointCount, kBodyJointCount) =
        pose->body.leftCols<2>();
    sig.valid.segment(s * kBodyJointCount, kBodyJointCount) =
        pose->body.col(2).array() > 0.0;
  }
  return sig;
}

double signature_distance(const PoseSignature& a, const PoseSignature& b) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  if (a.coords.rows() != b.coords.rows()) return kInf;
  const auto shared = a.valid && b.valid;
  const auto n = shared.count();
  if (n == 0) return kInf;
  const Eigen::ArrayXd d = (a.coords - b.coords).rowwise().norm().array();
  return shared.select(d, 0.0).sum() / double(n);
}

PoseIndex::PoseIndex(std::vector<PoseIndexEntry> entries)
    : entries_(std::move(entries)) {
  std::stable_sort(entries_.begin(), entries_.end(),
                   [](const auto& l, const auto& r) {
                     return l.frame_id < r.frame_id;
                   });
}

const PoseIndexEntry* PoseIndex::find(std::int64_t frame_id) const {
  auto it = std::lower_bound(
      entries_.begin(), entries_.end(), frame_id,
      [](const PoseIndexEntry& e, std::int64_t id) { return e.frame_id < id; });
  return it != entries_.end() && it->frame_id == frame_id ? &*it : nullptr;
}

namespace {

PoseIndex build(const std::vector<TrackedFrame>& frames,
                const fs::path* image_dir) {
  std::vector<PoseIndexEntry> entries;
  for (const auto& f : frames) {
    if (f.slots.empty() || f.filled_count() != static_cast<int>(f.slots.size()))
      continue;
    PoseIndexEntry e{f.frame_index, make_signature(f), {}};
    if (image_dir) {
      e.image = *image_dir / frame_file_name(f.frame_index);
      std::error_code ec;
      if (!fs::is_regular_file(e.image, ec))
        throw io_error("index: missing target frame image " + e.image.string());
    }
    entries.push_back(std::move(e));
  }
  if (entries.empty())
    throw data_error("index: no frame has every slot filled");
  return PoseIndex(std::move(entries));
}

}  // namespace

PoseIndex build_index(const std::vector<TrackedFrame>& frames) {
  return build(frames, nullptr);
}

PoseIndex build_index(const std::vector<TrackedFrame>& frames,
                      const fs::path& image_dir) {
  return build(frames, &image_dir);
}

Retrieval synthesize_frame(const TrackedFrame& query, const PoseIndex& index) {
  if (index.size() == 0) throw data_error("synthesize: empty index");
  const PoseSignature q = make_signature(query);
  Retrieval best{0, std::numeric_limits<double>::infinity()};
  bool found = false;
  for (const auto& e : index.entries()) {
    const double d = signature_distance(q, e.signature);
    if (d < best.distance) {
      best = {e.frame_id, d};
      found = true;
    }
  }
  if (!found) {
    throw data_error("synthesize: frame " + std::to_string(query.frame_index) +
                     " shares no valid joint with any indexed frame");
  }
  return best;
}

std::vector<SynthesisRecord> synthesize_sequence(
    const std::vector<TrackedFrame>& queries, const PoseIndex& index,
    const fs::path& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw io_error("cannot create " + out_dir.string());
  std::vector<SynthesisRecord> records;
  nlohmann::json manifest = nlohmann::json::array();
  for (const auto& q : queries) {
    if (q.filled_count() != static_cast<int>(q.slots.size())) continue;
    const Retrieval r = synthesize_frame(q, index);
    const PoseIndexEntry* e = index.find(r.frame_id);
    if (e->image.empty())
      throw usage_error("synthesize: index was built without target images");
    const fs::path dst = out_dir / frame_file_name(q.frame_index);
    fs::copy_file(e->image, dst, fs::copy_options::overwrite_existing, ec);
    if (ec) throw io_error("cannot copy " + e->image.string() + " to " +
                           dst.string());
    records.push_back({q.frame_index, r});
    manifest.push_back({{"query_frame", q.frame_index},
                        {"target_frame", r.frame_id},
                        {"distance", r.distance},
                        {"file", dst.filename().string()}});
  }
  write_file(out_dir / "manifest.json", manifest.dump(2) + "\n");
  return records;
}

std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = i;
  std::mt19937_64 rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(p[i - 1], p[j]);
  }
  return p;
}

PairedDataset export_paired(const std::vector<fs::path>& labels,
                            const std::vector<fs::path>& images,
                            double train_ratio, std::uint64_t seed,
                            const fs::path& out_dir) {
  if (!(train_ratio >= 0.0 && train_ratio <= 1.0))
    throw usage_error("train ratio must lie in [0, 1]");
  std::map<std::string, fs::path> by_label, by_image;
  for (const auto& p : labels) by_label[p.filename().string()] = p;
  for (const auto& p : images) by_image[p.filename().string()] = p;

  std::vector<std::string> unmatched;
  for (const auto& [name, _] : by_label)
    if (!by_image.count(name)) unmatched.push_back(name + " (label only)");
  for (const auto& [name, _] : by_image)
    if (!by_label.count(name)) unmatched.push_back(name + " (image only)");
  if (!unmatched.empty() || labels.size() != images.size()) {
    std::string msg = "pairing error: " + std::to_string(labels.size()) +
                      " label(s) vs " + std::to_string(images.size()) +
                      " image(s)";
    for (const auto& u : unmatched) msg += "; " + u;
    throw data_error(msg);
  }

  std::vector<std::string> names;
  for (const auto& [name, _] : by_label) names.push_back(name);
  const auto perm = seeded_permutation(names.size(), seed);
  const auto n_train = static_cast<std::size_t>(
      std::lround(train_ratio * static_cast<double>(names.size())));

  PairedDataset ds{out_dir, {}, {}, seed, train_ratio};
  for (std::size_t k = 0; k < perm.size(); ++k)
    (k < n_train ? ds.train : ds.test).push_back(names[perm[k]]);
  std::sort(ds.train.begin(), ds.train.end());
  std::sort(ds.test.begin(), ds.test.end());

  auto copy_split = [&](const std::vector<std::string>& split,
                        const char* label_dir, const char* img_dir) {
    std::error_code ec;
    fs::create_directories(out_dir / label_dir, ec);
    fs::create_directories(out_dir / img_dir, ec);
    if (ec) throw io_error("cannot create directories under " + out_dir.string());
    for (const auto& name : split) {
      fs::copy_file(by_label[name], out_dir / label_dir / name,
                    fs::copy_options::overwrite_existing, ec);
      if (ec) throw io_error("cannot copy " + by_label[name].string());
      fs::copy_file(by_image[name], out_dir / img_dir / name,
                    fs::copy_options::overwrite_existing, ec);
      if (ec) throw io_error("cannot copy " + by_image[name].string());
    }
  };
  copy_split(ds.train, "train_label", "train_img");
  copy_split(ds.test, "test_label", "test_img");

  nlohmann::json m;
  m["seed"] = seed;
  m["train_ratio"] = train_ratio;
  m["pairs"] = names.size();
  m["train"] = ds.train;
  m["test"] = ds.test;
  write_file(out_dir / "manifest.json", m.dump(2) + "\n");
  return ds;
}

}  // namespace mpt
