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

#include <array>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mpt/image.hpp"
#include "mpt/pose.hpp"

namespace mpt {

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// HSV with s, v in [0, 1] and hue in degrees (wrapped), rounded to 8 bits.
Rgb hsv_to_rgb(double hue_deg, double saturation, double value);

/// The fixed 24-edge BODY_25 limb list.
std::span<const std::pair<int, int>> limb_topology();

enum class FaceMode { kNone, kEight, kSixtyEight, kSeventy };
FaceMode parse_face_mode(const std::string& s);
const char* to_string(FaceMode mode);

/// Face landmark indices drawn in each mode.
std::span<const int> face_subset(FaceMode mode);

/// Per-identity colour blocks. Person i owns hues within +-block_half_width
/// of i * 360 / N; limb l sits at a fixed offset inside that block.
class PaletteSpec {
 public:
  explicit PaletteSpec(int person_count);

  int person_count() const { return person_count_; }
  double base_hue(int person) const;
  double block_half_width() const;
  double limb_hue(int person, int limb) const;
  Rgb limb_color(int person, int limb) const;
  Rgb base_color(int person) const;

  /// Smallest circular hue gap between the blocks of distinct persons,
  /// measured on the actual limb hues.
  double min_inter_person_gap() const;

  std::string to_json() const;

 private:
  int person_count_;
};

struct RenderConfig {
  int width = 1024;
  int height = 512;
  int limb_thickness = 4;
  int joint_radius = 4;  // 0 disables joint circles
  FaceMode face_mode = FaceMode::kNone;
  double min_confidence = 0.05;
};

void validate(const RenderConfig& cfg);

/// Integer Bresenham centre line stamped with a thickness x thickness
/// square brush. Pixels outside the image are clipped.
void draw_line(Image& img, int x0, int y0, int x1, int y1, int thickness,
               Rgb color);
void draw_disc(Image& img, int cx, int cy, int radius, Rgb color);

Image render_frame(const TrackedFrame& frame, const PaletteSpec& palette,
                   const RenderConfig& cfg);

struct RenderManifest {
  std::vector<std::string> files;
  std::string to_json(const PaletteSpec& palette,
                      const RenderConfig& cfg) const;
};

/// Writes frame%06d.png per tracked frame plus manifest.json.
RenderManifest render_sequence(const std::vector<TrackedFrame>& frames,
                               const PaletteSpec& palette,
                               const RenderConfig& cfg,
                               const std::filesystem::path& out_dir);

std::string frame_file_name(std::int64_t frame_index);

}  // namespace mpt
