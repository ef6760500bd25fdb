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

#include "mpt/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "mpt/error.hpp"
#include "mpt/ingest.hpp"

namespace mpt {

namespace fs = std::filesystem;

namespace {

constexpr std::array<std::pair<int, int>, 24> kBody25Limbs = {{
    {1, 8},   {1, 2},   {1, 5},   {2, 3},   {3, 4},   {5, 6},
    {6, 7},   {8, 9},   {9, 10},  {10, 11}, {8, 12},  {12, 13},
    {13, 14}, {1, 0},   {0, 15},  {15, 17}, {0, 16},  {16, 18},
    {14, 19}, {19, 20}, {14, 21}, {11, 22}, {22, 23}, {11, 24},
}};

// Jaw ends, chin, nose tip, outer eye corners, mouth corners.
constexpr std::array<int, 8> kFaceEight = {0, 8, 16, 30, 36, 45, 48, 54};

constexpr std::array<int, 70> make_iota70() {
  std::array<int, 70> a{};
  for (int i = 0; i < 70; ++i) a[i] = i;
  return a;
}
constexpr std::array<int, 70> kFaceAll = make_iota70();

constexpr double kBlockFraction = 0.35;

int to_pixel(double v) {
  return static_cast<int>(std::lround(std::clamp(v, -1.0e6, 1.0e6)));
}

}  // namespace

Rgb hsv_to_rgb(double hue_deg, double saturation, double value) {
  double h = std::fmod(hue_deg, 360.0);
  if (h < 0.0) h += 360.0;
  const double c = value * saturation;
  const double hp = h / 60.0;
  const double x = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
  double r = 0, g = 0, b = 0;
  switch (static_cast<int>(hp)) {
    case 0: r = c; g = x; break;
    case 1: r = x; g = c; break;
    case 2: g = c; b = x; break;
    case 3: g = x; b = c; break;
    case 4: r = x; b = c; break;
    default: r = c; b = x; break;
  }
  const double m = value - c;
  auto q = [](double v) {
    return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
  };
  return {q(r + m), q(g + m), q(b + m)};
}

std::span<const std::pair<int, int>> limb_topology() { return kBody25Limbs; }

FaceMode parse_face_mode(const std::string& s) {
  if (s == "none") return FaceMode::kNone;
  if (s == "eight") return FaceMode::kEight;
  if (s == "sixty-eight") return FaceMode::kSixtyEight;
  if (s == "seventy") return FaceMode::kSeventy;
  throw usage_error("unknown face mode '" + s +
                    "' (none | eight | sixty-eight | seventy)");
}

const char* to_string(FaceMode mode) {
  switch (mode) {
    case FaceMode::kNone: return "none";
    case FaceMode::kEight: return "eight";
    case FaceMode::kSixtyEight: return "sixty-eight";
    case FaceMode::kSeventy: return "seventy";
  }
  return "none";
}

std::span<const int> face_subset(FaceMode mode) {
  switch (mode) {
    case FaceMode::kNone: return {};
    case FaceMode::kEight: return kFaceEight;
    case FaceMode::kSixtyEight: return std::span<const int>(kFaceAll).first(68);
    case FaceMode::kSeventy: return kFaceAll;
  }
  return {};
}

PaletteSpec::PaletteSpec(int person_count) : person_count_(person_count) {
  if (person_count < 1) throw usage_error("palette needs person_count >= 1");
}

double PaletteSpec::base_hue(int person) const {
  return person * (360.0 / person_count_);
}

double PaletteSpec::block_half_width() const {
  return kBlockFraction * 360.0 / person_count_;
}

double PaletteSpec::limb_hue(int person, int limb) const {
  const int last = static_cast<int>(kBody25Limbs.size()) - 1;
  const double t = double(2 * limb - last) / last;  // -1 .. 1
  return base_hue(person) + t * block_half_width();
}

Rgb PaletteSpec::limb_color(int person, int limb) const {
  return hsv_to_rgb(limb_hue(person, limb), 1.0, 1.0);
}

Rgb PaletteSpec::base_color(int person) const {
  return hsv_to_rgb(base_hue(person), 1.0, 1.0);
}

double PaletteSpec::min_inter_person_gap() const {
  if (person_count_ < 2) return 360.0;
  double best = 360.0;
  const int limbs = static_cast<int>(kBody25Limbs.size());
  for (int a = 0; a < person_count_; ++a) {
    for (int b = a + 1; b < person_count_; ++b) {
      for (int la = 0; la < limbs; ++la) {
        for (int lb = 0; lb < limbs; ++lb) {
          double d = std::fmod(std::abs(limb_hue(a, la) - limb_hue(b, lb)), 360.0);
          best = std::min(best, std::min(d, 360.0 - d));
        }
      }
    }
  }
  return best;
}

std::string PaletteSpec::to_json() const {
  nlohmann::json j;
  j["person_count"] = person_count_;
  j["block_half_width_deg"] = block_half_width();
  j["persons"] = nlohmann::json::array();
  for (int p = 0; p < person_count_; ++p) {
    nlohmann::json jp;
    jp["base_hue_deg"] = base_hue(p);
    const Rgb base = base_color(p);
    jp["base_rgb"] = {base.r, base.g, base.b};
    jp["limbs"] = nlohmann::json::array();
    for (int l = 0; l < static_cast<int>(kBody25Limbs.size()); ++l) {
      const Rgb c = limb_color(p, l);
      jp["limbs"].push_back({{"joints", {kBody25Limbs[l].first,
                                         kBody25Limbs[l].second}},
                             {"hue_deg", limb_hue(p, l)},
                             {"rgb", {c.r, c.g, c.b}}});
    }
    j["persons"].push_back(std::move(jp));
  }
  return j.dump();
}

void validate(const RenderConfig& cfg) {
  if (cfg.width < 1 || cfg.height < 1)
    throw usage_error("render dimensions must be >= 1");
  if (cfg.limb_thickness < 1) throw usage_error("limb thickness must be >= 1");
  if (cfg.joint_radius < 0) throw usage_error("joint radius must be >= 0");
}

namespace {

void put(Image& img, int x, int y, Rgb c) {
  if (x < 0 || y < 0 || x >= img.width || y >= img.height) return;
  std::uint8_t* p = img.pixel(x, y);
  p[0] = c.r;
  p[1] = c.g;
  p[2] = c.b;
}

}  // namespace

void draw_line(Image& img, int x0, int y0, int x1, int y1, int thickness,
               Rgb color) {
  const int lo = -(thickness / 2);
  const int hi = lo + thickness - 1;
  const int dx = std::abs(x1 - x0), sx = x0 < x1 ? 1 : -1;
  const int dy = -std::abs(y1 - y0), sy = y0 < y1 ? 1 : -1;
  int err = dx + dy;
  for (;;) {
    for (int oy = lo; oy <= hi; ++oy)
      for (int ox = lo; ox <= hi; ++ox) put(img, x0 + ox, y0 + oy, color);
    if (x0 == x1 && y0 == y1) break;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
  }
}

void draw_disc(Image& img, int cx, int cy, int radius, Rgb color) {
  for (int dy = -radius; dy <= radius; ++dy)
    for (int dx = -radius; dx <= radius; ++dx)
      if (dx * dx + dy * dy <= radius * radius) put(img, cx + dx, cy + dy, color);
}

Image render_frame(const TrackedFrame& frame, const PaletteSpec& palette,
                   const RenderConfig& cfg) {
  validate(cfg);
  if (static_cast<int>(frame.slots.size()) != palette.person_count()) {
    throw usage_error("frame " + std::to_string(frame.frame_index) + " has " +
                      std::to_string(frame.slots.size()) +
                      " slot(s), palette expects " +
                      std::to_string(palette.person_count()));
  }
  Image img(cfg.width, cfg.height, 3, 0);
  const auto limbs = limb_topology();
  const auto face_points = face_subset(cfg.face_mode);
  const int face_radius = std::max(1, cfg.joint_radius / 2);

  for (int s = 0; s < palette.person_count(); ++s) {
    const auto& pose = frame.slots[s];
    if (!pose) continue;
    const auto& body = pose->body;
    auto shown = [&](int j) { return body(j, 2) >= cfg.min_confidence && body(j, 2) > 0.0; };
    for (int l = 0; l < static_cast<int>(limbs.size()); ++l) {
      const auto [a, b] = limbs[l];
      if (!shown(a) || !shown(b)) continue;
      draw_line(img, to_pixel(body(a, 0)), to_pixel(body(a, 1)),
                to_pixel(body(b, 0)), to_pixel(body(b, 1)), cfg.limb_thickness,
                palette.limb_color(s, l));
    }
    const Rgb base = palette.base_color(s);
    if (cfg.joint_radius > 0) {
      for (int j = 0; j < body.rows(); ++j)
        if (shown(j))
          draw_disc(img, to_pixel(body(j, 0)), to_pixel(body(j, 1)),
                    cfg.joint_radius, base);
    }
    if (pose->face) {
      const auto& face = *pose->face;
      for (int k : face_points) {
        if (face(k, 2) >= cfg.min_confidence && face(k, 2) > 0.0)
          draw_disc(img, to_pixel(face(k, 0)), to_pixel(face(k, 1)),
                    face_radius, base);
      }
    }
  }
  return img;
}

std::string frame_file_name(std::int64_t frame_index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "frame%06lld",
                static_cast<long long>(frame_index));
  return std::string(buf) + ".png";
}

std::string RenderManifest::to_json(const PaletteSpec& palette,
                                    const RenderConfig& cfg) const {
  nlohmann::json j;
  j["files"] = files;
  j["palette"] = nlohmann::json::parse(palette.to_json());
  j["render"] = {{"width", cfg.width},
                 {"height", cfg.height},
                 {"limb_thickness", cfg.limb_thickness},
                 {"joint_radius", cfg.joint_radius},
                 {"face_mode", to_string(cfg.face_mode)},
                 {"min_confidence", cfg.min_confidence}};
  return j.dump(2) + "\n";
}

RenderManifest render_sequence(const std::vector<TrackedFrame>& frames,
                               const PaletteSpec& palette,
                               const RenderConfig& cfg,
                               const fs::path& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw io_error("cannot create " + out_dir.string());
  RenderManifest manifest;
  for (const auto& frame : frames) {
    const std::string name = frame_file_name(frame.frame_index);
    write_png(out_dir / name, render_frame(frame, palette, cfg));
    manifest.files.push_back(name);
  }
  write_file(out_dir / "manifest.json", manifest.to_json(palette, cfg));
  return manifest;
}

}  // namespace mpt
