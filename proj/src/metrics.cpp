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

#include "mpt/metrics.hpp"

#include <cstring>
#include <fstream>
#include <iterator>
#include <set>

#include <json.hpp>

namespace mpt {

namespace fs = std::filesystem;

namespace {

constexpr char kFeatureMagic[4] = {'M', 'P', 'F', 'V'};
constexpr std::size_t kFeatureHeader = 12;

std::uint32_t read_u32_le(const std::uint8_t* p) {
  return std::uint32_t(p[0]) | (std::uint32_t(p[1]) << 8) |
         (std::uint32_t(p[2]) << 16) | (std::uint32_t(p[3]) << 24);
}

void put_u32_le(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(std::uint8_t(v >> (8 * i)));
}

std::vector<std::string> png_names(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec))
    throw io_error("image directory not found: " + dir.string());
  std::vector<std::string> names;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".png")
      names.push_back(e.path().filename().string());
  std::sort(names.begin(), names.end());
  return names;
}

}  // namespace

std::vector<std::uint8_t> encode_feature_file(
    const std::vector<std::vector<float>>& features) {
  const std::size_t d = features.empty() ? 0 : features.front().size();
  std::vector<std::uint8_t> out(kFeatureMagic, kFeatureMagic + 4);
  put_u32_le(out, static_cast<std::uint32_t>(d));
  put_u32_le(out, static_cast<std::uint32_t>(features.size()));
  for (const auto& v : features) {
    if (v.size() != d) throw data_error("feature vectors differ in dimension");
    for (float f : v) {
      std::uint32_t bits;
      std::memcpy(&bits, &f, 4);
      put_u32_le(out, bits);
    }
  }
  return out;
}

std::vector<std::vector<double>> decode_feature_file(
    std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kFeatureHeader ||
      std::memcmp(bytes.data(), kFeatureMagic, 4) != 0)
    throw data_error("feature file: bad magic or truncated header");
  const std::uint64_t d = read_u32_le(bytes.data() + 4);
  const std::uint64_t n = read_u32_le(bytes.data() + 8);
  if (bytes.size() != kFeatureHeader + 4 * d * n)
    throw data_error("feature file: payload size does not match " +
                     std::to_string(n) + " x " + std::to_string(d));
  std::vector<std::vector<double>> out(n, std::vector<double>(d));
  const std::uint8_t* p = bytes.data() + kFeatureHeader;
  for (std::uint64_t i = 0; i < n; ++i) {
    for (std::uint64_t j = 0; j < d; ++j, p += 4) {
      const std::uint32_t bits = read_u32_le(p);
      float f;
      std::memcpy(&f, &bits, 4);
      if (!std::isfinite(f)) throw data_error("feature file: non-finite value");
      out[i][j] = f;
    }
  }
  return out;
}

std::vector<std::vector<double>> read_feature_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  try {
    return decode_feature_file(bytes);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

std::string MetricReport::to_json() const {
  using nlohmann::json;
  auto psnr_value = [](double v) -> json {
    return std::isinf(v) ? json("inf") : json(v);
  };
  json j;
  j["frame_count"] = frames.size();
  j["per_frame"] = json::array();
  for (const auto& f : frames)
    j["per_frame"].push_back(
        {{"name", f.name}, {"psnr", psnr_value(f.psnr)}, {"ssim", f.ssim}});
  j["PSNR"] = psnr_value(mean_psnr);
  j["PSNR_infinite"] = std::isinf(mean_psnr);
  j["SSIM"] = mean_ssim;
  j["FID"] = fid ? json(*fid) : json(nullptr);
  j["LPIPS"] = "unavailable";
  j["config"] = {{"max_value", config.max_value},
                 {"k1", config.k1},
                 {"k2", config.k2},
                 {"window", config.window},
                 {"sigma", config.sigma},
                 {"luminance", "BT.601"}};
  return j.dump(2) + "\n";
}

MetricReport evaluate_sequence(const fs::path& synth_dir,
                               const fs::path& truth_dir,
                               const std::optional<fs::path>& synth_features,
                               const std::optional<fs::path>& truth_features,
                               const MetricConfig<double>& cfg) {
  const auto synth = png_names(synth_dir);
  const auto truth = png_names(truth_dir);
  if (synth != truth) {
    const std::set<std::string> a(synth.begin(), synth.end());
    const std::set<std::string> b(truth.begin(), truth.end());
    std::string msg = "misaligned image sets:";
    for (const auto& n : a)
      if (!b.count(n)) msg += " " + n + " (synth only)";
    for (const auto& n : b)
      if (!a.count(n)) msg += " " + n + " (truth only)";
    throw data_error(msg);
  }
  if (synth.empty()) throw data_error("no images to evaluate");

  MetricReport report;
  report.config = cfg;
  double psnr_sum = 0.0, ssim_sum = 0.0;
  for (const auto& name : synth) {
    const Image a = read_png(synth_dir / name);
    const Image b = read_png(truth_dir / name);
    FrameScore s{name, psnr(a, b, cfg), ssim(a, b, cfg)};
    psnr_sum += s.psnr;
    ssim_sum += s.ssim;
    report.frames.push_back(std::move(s));
  }
  report.mean_psnr = psnr_sum / double(report.frames.size());
  report.mean_ssim = ssim_sum / double(report.frames.size());

  if (synth_features.has_value() != truth_features.has_value())
    throw usage_error("FID needs feature files for both synth and truth");
  if (synth_features) {
    const auto fa = feature_stats(read_feature_file(*synth_features));
    const auto fb = feature_stats(read_feature_file(*truth_features));
    report.fid = frechet_distance(fa, fb);
  }
  return report;
}

}  // namespace mpt
