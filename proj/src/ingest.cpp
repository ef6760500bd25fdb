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

#include "mpt/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mpt/error.hpp"

namespace mpt {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr const char* kFormatTag = "mpt.sequence";

KeypointMatrix unpack_triples(const json& arr, int expected_points,
                              const std::string& what, std::size_t person) {
  if (!arr.is_array()) {
    throw data_error(what + " of person " + std::to_string(person) +
                     " is not an array");
  }
  const std::size_t expected = static_cast<std::size_t>(expected_points) * 3;
  if (arr.size() != expected) {
    throw data_error("arity error: " + what + " of person " +
                     std::to_string(person) + " has " +
                     std::to_string(arr.size()) + " values, expected " +
                     std::to_string(expected));
  }
  KeypointMatrix m(expected_points, 3);
  for (std::size_t k = 0; k < expected; ++k) {
    const json& v = arr[k];
    if (!v.is_number()) {
      throw data_error("value error: " + what + " of person " +
                       std::to_string(person) + " entry " + std::to_string(k) +
                       " is not a number");
    }
    const double d = v.get<double>();
    if (!std::isfinite(d)) {
      throw data_error("value error: " + what + " of person " +
                       std::to_string(person) + " entry " + std::to_string(k) +
                       " is not finite");
    }
    m(static_cast<Eigen::Index>(k / 3), static_cast<Eigen::Index>(k % 3)) = d;
  }
  return m;
}

json pack_triples(const KeypointMatrix& m) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index c = 0; c < 3; ++c) arr.push_back(m(i, c));
  return arr;
}

json pose_to_json(const PersonPose& p) {
  json j;
  j["body"] = pack_triples(p.body);
  if (p.face) j["face"] = pack_triples(*p.face);
  return j;
}

PersonPose pose_from_json(const json& j, std::size_t person) {
  if (!j.is_object())
    throw data_error("person " + std::to_string(person) + " is not an object");
  PersonPose p;
  p.body = unpack_triples(j.at("body"), kBodyJointCount, "body", person);
  if (auto it = j.find("face"); it != j.end() && !it->is_null())
    p.face = unpack_triples(*it, kFaceLandmarkCount, "face", person);
  if (auto v = validate_pose(p); !v)
    throw data_error("person " + std::to_string(person) + ": " + v.reason);
  return p;
}

json meta_to_json(const SequenceMeta& m) {
  return json{{"person_count", m.person_count},
              {"width", m.width},
              {"height", m.height},
              {"frame_rate", m.frame_rate},
              {"role", to_string(m.role)}};
}

SequenceMeta meta_from_json(const json& j) {
  SequenceMeta m;
  m.person_count = j.at("person_count").get<int>();
  m.width = j.at("width").get<int>();
  m.height = j.at("height").get<int>();
  m.frame_rate = j.at("frame_rate").get<double>();
  m.role = parse_role(j.at("role").get<std::string>());
  if (auto v = validate_meta(m); !v) throw data_error("meta: " + v.reason);
  return m;
}

json parse_json(std::string_view bytes) {
  try {
    return json::parse(bytes.begin(), bytes.end());
  } catch (const json::parse_error& e) {
    throw data_error("malformed JSON at byte " + std::to_string(e.byte) +
                     ": " + e.what());
  } catch (const json::exception& e) {
    throw data_error(std::string("malformed JSON: ") + e.what());
  }
}

json envelope(const char* kind, const SequenceMeta& meta) {
  json doc;
  doc["format"] = kFormatTag;
  doc["version"] = kCanonicalVersion;
  doc["kind"] = kind;
  doc["meta"] = meta_to_json(meta);
  return doc;
}

const json& open_envelope(const json& doc, const char* kind) {
  if (!doc.is_object() || doc.value("format", "") != kFormatTag)
    throw data_error("not a canonical sequence document");
  const json& version = doc.at("version");
  if (!version.is_number_integer() || version.get<int>() != kCanonicalVersion)
    throw data_error("unsupported canonical version " + version.dump() +
                     " (expected " + std::to_string(kCanonicalVersion) + ")");
  if (doc.at("kind") != kind)
    throw data_error("canonical document kind is " + doc.at("kind").dump() +
                     ", expected \"" + kind + "\"");
  return doc.at("frames");
}

void check_increasing(std::int64_t prev, std::int64_t cur, bool first) {
  if (cur < 0 || (!first && cur <= prev))
    throw data_error("frame_index must be nonnegative and strictly increasing");
}

}  // namespace

FrameDetections parse_detection_file(std::string_view bytes) {
  const json doc = parse_json(bytes);
  try {
    if (!doc.is_object()) throw data_error("top level is not a JSON object");
    auto people = doc.find("people");
    if (people == doc.end() || !people->is_array())
      throw data_error("missing \"people\" array");

    FrameDetections out;
    out.people.reserve(people->size());
    for (std::size_t i = 0; i < people->size(); ++i) {
      const json& person = (*people)[i];
      if (!person.is_object())
        throw data_error("person " + std::to_string(i) + " is not an object");
      auto body = person.find("pose_keypoints_2d");
      if (body == person.end())
        throw data_error("arity error: person " + std::to_string(i) +
                         " has no pose_keypoints_2d");
      PersonPose pose;
      pose.body = unpack_triples(*body, kBodyJointCount, "pose_keypoints_2d", i);
      if (auto face = person.find("face_keypoints_2d");
          face != person.end() && !face->is_null() &&
          !(face->is_array() && face->empty())) {
        pose.face =
            unpack_triples(*face, kFaceLandmarkCount, "face_keypoints_2d", i);
      }
      if (auto v = validate_pose(pose); !v)
        throw data_error("value error: person " + std::to_string(i) + ": " +
                         v.reason);
      out.people.push_back(std::move(pose));
    }
    return out;
  } catch (const json::exception& e) {
    throw data_error(std::string("unexpected detection layout: ") + e.what());
  }
}

DetectionFileSet list_detection_files(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec))
    throw io_error("detection directory not found: " + dir.string());
  DetectionFileSet set{dir, {}};
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json")
      set.file_names.push_back(entry.path().filename().string());
  }
  if (set.file_names.empty())
    throw data_error("no detection files in " + dir.string());
  std::sort(set.file_names.begin(), set.file_names.end());
  return set;
}

std::vector<FrameDetections> load_sequence(const DetectionFileSet& files,
                                           const SequenceMeta& meta) {
  if (files.file_names.empty()) throw data_error("no detection files");
  if (auto v = validate_meta(meta); !v) throw usage_error(v.reason);
  std::vector<FrameDetections> frames;
  frames.reserve(files.file_names.size());
  for (std::size_t i = 0; i < files.file_names.size(); ++i) {
    const fs::path path = files.directory / files.file_names[i];
    const std::string bytes = read_file(path);
    try {
      frames.push_back(parse_detection_file(bytes));
    } catch (const Error& e) {
      throw Error(e.kind(), files.file_names[i] + ": " + e.what());
    }
    frames.back().frame_index = static_cast<std::int64_t>(i);
    frames.back().image_width = meta.width;
    frames.back().image_height = meta.height;
  }
  return frames;
}

std::string write_canonical(const std::vector<FrameDetections>& frames,
                            const SequenceMeta& meta) {
  json doc = envelope("detections", meta);
  json arr = json::array();
  for (const auto& f : frames) {
    json jf;
    jf["frame_index"] = f.frame_index;
    jf["people"] = json::array();
    for (const auto& p : f.people) jf["people"].push_back(pose_to_json(p));
    arr.push_back(std::move(jf));
  }
  doc["frames"] = std::move(arr);
  return doc.dump() + "\n";
}

DetectionSequence read_canonical(std::string_view bytes) {
  const json doc = parse_json(bytes);
  try {
    const json& frames = open_envelope(doc, "detections");
    DetectionSequence seq;
    seq.meta = meta_from_json(doc.at("meta"));
    for (std::size_t i = 0; i < frames.size(); ++i) {
      const json& jf = frames.at(i);
      FrameDetections f;
      f.frame_index = jf.at("frame_index").get<std::int64_t>();
      check_increasing(i ? seq.frames.back().frame_index : 0, f.frame_index,
                       i == 0);
      f.image_width = seq.meta.width;
      f.image_height = seq.meta.height;
      const json& people = jf.at("people");
      for (std::size_t k = 0; k < people.size(); ++k)
        f.people.push_back(pose_from_json(people.at(k), k));
      seq.frames.push_back(std::move(f));
    }
    return seq;
  } catch (const json::exception& e) {
    throw data_error(std::string("invalid canonical document: ") + e.what());
  }
}

std::string write_canonical_tracked(const std::vector<TrackedFrame>& frames,
                                    const SequenceMeta& meta) {
  json doc = envelope("tracked", meta);
  json arr = json::array();
  for (const auto& f : frames) {
    if (static_cast<int>(f.slots.size()) != meta.person_count)
      throw data_error("tracked frame " + std::to_string(f.frame_index) +
                       " slot count differs from person_count");
    json jf;
    jf["frame_index"] = f.frame_index;
    jf["slots"] = json::array();
    for (const auto& s : f.slots)
      jf["slots"].push_back(s ? pose_to_json(*s) : json(nullptr));
    arr.push_back(std::move(jf));
  }
  doc["frames"] = std::move(arr);
  return doc.dump() + "\n";
}

TrackedSequence read_canonical_tracked(std::string_view bytes) {
  const json doc = parse_json(bytes);
  try {
    const json& frames = open_envelope(doc, "tracked");
    TrackedSequence seq;
    seq.meta = meta_from_json(doc.at("meta"));
    for (std::size_t i = 0; i < frames.size(); ++i) {
      const json& jf = frames.at(i);
      TrackedFrame f;
      f.frame_index = jf.at("frame_index").get<std::int64_t>();
      check_increasing(i ? seq.frames.back().frame_index : 0, f.frame_index,
                       i == 0);
      const json& slots = jf.at("slots");
      if (!slots.is_array() ||
          static_cast<int>(slots.size()) != seq.meta.person_count)
        throw data_error("frame " + std::to_string(f.frame_index) +
                         ": slot count differs from person_count");
      for (std::size_t k = 0; k < slots.size(); ++k) {
        if (slots[k].is_null())
          f.slots.emplace_back();
        else
          f.slots.emplace_back(pose_from_json(slots[k], k));
      }
      seq.frames.push_back(std::move(f));
    }
    return seq;
  } catch (const json::exception& e) {
    throw data_error(std::string("invalid canonical document: ") + e.what());
  }
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw io_error("read failed: " + path.string());
  return std::move(ss).str();
}

void write_file(const fs::path& path, std::string_view bytes) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw io_error("cannot create " + path.parent_path().string());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw io_error("write failed: " + path.string());
}

}  // namespace mpt
