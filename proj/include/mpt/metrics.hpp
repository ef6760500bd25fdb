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

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mpt/error.hpp"
#include "mpt/image.hpp"

namespace mpt {

template <typename Scalar>
struct MetricConfig {
  Scalar max_value = Scalar(255);
  Scalar k1 = Scalar(0.01);
  Scalar k2 = Scalar(0.03);
  int window = 11;
  Scalar sigma = Scalar(1.5);

  Scalar c1() const { return (k1 * max_value) * (k1 * max_value); }
  Scalar c2() const { return (k2 * max_value) * (k2 * max_value); }
};

/// Peak signal-to-noise ratio in dB over all samples; +inf for identical
/// images.
template <typename Scalar = double>
Scalar psnr(const Image& a, const Image& b,
            const MetricConfig<Scalar>& cfg = {}) {
  if (a.width != b.width || a.height != b.height || a.channels != b.channels)
    throw data_error("psnr: image dimensions differ");
  if (a.data.empty()) throw data_error("psnr: empty image");
  Scalar sum = 0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    const Scalar d = Scalar(a.data[i]) - Scalar(b.data[i]);
    sum += d * d;
  }
  if (sum == 0) return std::numeric_limits<Scalar>::infinity();
  const Scalar mse = sum / Scalar(a.data.size());
  return Scalar(10) * std::log10(cfg.max_value * cfg.max_value / mse);
}

/// Normalized 1-D Gaussian taps.
template <typename Scalar>
Eigen::Array<Scalar, Eigen::Dynamic, 1> gaussian_kernel(int size, Scalar sigma) {
  Eigen::Array<Scalar, Eigen::Dynamic, 1> k(size);
  const int half = size / 2;
  for (int i = 0; i < size; ++i) {
    const Scalar x = Scalar(i - half);
    k(i) = std::exp(-(x * x) / (Scalar(2) * sigma * sigma));
  }
  return k / k.sum();
}

/// Separable "valid" correlation: output is (rows - n + 1) x (cols - n + 1).
template <typename Derived>
Eigen::Array<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
filter_valid(const Eigen::ArrayBase<Derived>& in,
             const Eigen::Array<typename Derived::Scalar, Eigen::Dynamic, 1>& k) {
  using Scalar = typename Derived::Scalar;
  using Arr = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Eigen::Index n = k.size();
  const Eigen::Index rows = in.rows() - n + 1, cols = in.cols() - n + 1;
  Arr horiz = Arr::Zero(in.rows(), cols);
  for (Eigen::Index t = 0; t < n; ++t) horiz += k(t) * in.middleCols(t, cols);
  Arr out = Arr::Zero(rows, cols);
  for (Eigen::Index t = 0; t < n; ++t) out += k(t) * horiz.middleRows(t, rows);
  return out;
}

/// Mean SSIM over all valid window centres of two luminance planes.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar ssim(
    const Eigen::ArrayBase<DerivedA>& a, const Eigen::ArrayBase<DerivedB>& b,
    const MetricConfig<typename DerivedA::Scalar>& cfg = {}) {
  using Scalar = typename DerivedA::Scalar;
  using Arr = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw data_error("ssim: image dimensions differ");
  if (cfg.window < 1 || cfg.window % 2 == 0)
    throw usage_error("ssim: window size must be odd");
  if (a.rows() < cfg.window || a.cols() < cfg.window)
    throw data_error("ssim: image smaller than the " +
                     std::to_string(cfg.window) + "x" +
                     std::to_string(cfg.window) + " window");
  const auto k = gaussian_kernel<Scalar>(cfg.window, cfg.sigma);
  const Arr mu_a = filter_valid(a, k);
  const Arr mu_b = filter_valid(b, k);
  const Arr var_a = filter_valid(a.square(), k) - mu_a.square();
  const Arr var_b = filter_valid(b.square(), k) - mu_b.square();
  const Arr cov = filter_valid(a * b, k) - mu_a * mu_b;
  const Scalar c1 = cfg.c1(), c2 = cfg.c2();
  const Arr map = ((Scalar(2) * mu_a * mu_b + c1) * (Scalar(2) * cov + c2)) /
                   ((mu_a.square() + mu_b.square() + c1) * (var_a + var_b + c2));
  return map.mean();
}

template <typename Scalar = double>
Scalar ssim(const Image& a, const Image& b,
            const MetricConfig<Scalar>& cfg = {}) {
  if (a.width != b.width || a.height != b.height)
    throw data_error("ssim: image dimensions differ");
  return ssim(luminance(a).template cast<Scalar>().eval(),
              luminance(b).template cast<Scalar>().eval(), cfg);
}

/// Gaussian moments of a feature population.
template <typename Scalar>
struct FeatureStats {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> mean;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> covariance;
  std::size_t count = 0;

  Eigen::Index dim() const { return mean.size(); }
};

/// Rows are samples. Unbiased covariance, symmetrized.
template <typename Derived>
FeatureStats<typename Derived::Scalar> feature_stats(
    const Eigen::MatrixBase<Derived>& samples) {
  using Scalar = typename Derived::Scalar;
  if (samples.rows() < 2)
    throw data_error("feature_stats: need at least 2 vectors");
  FeatureStats<Scalar> s;
  s.count = static_cast<std::size_t>(samples.rows());
  s.mean = samples.colwise().mean().transpose();
  const auto centered = samples.rowwise() - s.mean.transpose();
  s.covariance = (centered.transpose() * centered) / Scalar(samples.rows() - 1);
  s.covariance = (Scalar(0.5) * (s.covariance + s.covariance.transpose())).eval();
  return s;
}

template <typename Scalar>
FeatureStats<Scalar> feature_stats(
    const std::vector<std::vector<Scalar>>& features) {
  if (features.size() < 2)
    throw data_error("feature_stats: need at least 2 vectors");
  const std::size_t d = features.front().size();
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> m(features.size(), d);
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (features[i].size() != d)
      throw data_error("feature_stats: vector " + std::to_string(i) + " has " +
                       std::to_string(features[i].size()) +
                       " dimensions, expected " + std::to_string(d));
    for (std::size_t j = 0; j < d; ++j) m(i, j) = features[i][j];
  }
  return feature_stats(m);
}

/// Symmetric PSD square root by eigendecomposition (negative eigenvalues
/// clamped to zero).
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
sqrt_psd(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Mat sym = Scalar(0.5) * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(sym);
  const auto roots = es.eigenvalues().cwiseMax(Scalar(0)).cwiseSqrt();
  return es.eigenvectors() * roots.asDiagonal() * es.eigenvectors().transpose();
}

/// Frechet distance between two Gaussians:
///   |mu1 - mu2|^2 + tr(S1 + S2 - 2 (S1 S2)^(1/2)).
/// tr((S1 S2)^(1/2)) is taken as tr(sqrt(sqrt(S1) S2 sqrt(S1))), which has
/// the same spectrum and stays symmetric.
template <typename Scalar>
Scalar frechet_distance(const FeatureStats<Scalar>& s1,
                        const FeatureStats<Scalar>& s2) {
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (s1.dim() != s2.dim() || s1.covariance.rows() != s1.dim() ||
      s2.covariance.rows() != s2.dim())
    throw data_error("frechet_distance: dimension mismatch");
  auto check_psd = [](const Mat& c, const char* which) {
    Eigen::SelfAdjointEigenSolver<Mat> es(Scalar(0.5) * (c + c.transpose()),
                                          Eigen::EigenvaluesOnly);
    const Scalar trace = c.trace();
    if (es.eigenvalues().size() > 0 &&
        es.eigenvalues().minCoeff() < -Scalar(1e-6) * std::abs(trace))
      throw data_error(std::string("frechet_distance: covariance ") + which +
                       " is not positive semidefinite");
  };
  check_psd(s1.covariance, "1");
  check_psd(s2.covariance, "2");

  const Mat root1 = sqrt_psd(s1.covariance);
  const Mat inner = root1 * s2.covariance * root1;
  Eigen::SelfAdjointEigenSolver<Mat> es(Scalar(0.5) * (inner + inner.transpose()),
                                        Eigen::EigenvaluesOnly);
  const Scalar tr_sqrt = es.eigenvalues().cwiseMax(Scalar(0)).cwiseSqrt().sum();
  const Scalar d = (s1.mean - s2.mean).squaredNorm() + s1.covariance.trace() +
                   s2.covariance.trace() - Scalar(2) * tr_sqrt;
  return std::max(d, Scalar(0));
}

// Feature files: "MPFV", u32 dim, u32 count, then count*dim little-endian
// float32 values.
std::vector<std::vector<double>> read_feature_file(
    const std::filesystem::path& path);
std::vector<std::uint8_t> encode_feature_file(
    const std::vector<std::vector<float>>& features);
std::vector<std::vector<double>> decode_feature_file(
    std::span<const std::uint8_t> bytes);

struct FrameScore {
  std::string name;
  double psnr = 0.0;
  double ssim = 0.0;
};

struct MetricReport {
  std::vector<FrameScore> frames;
  double mean_psnr = 0.0;
  double mean_ssim = 0.0;
  std::optional<double> fid;
  MetricConfig<double> config;

  std::string to_json() const;
};

/// Scores same-named PNGs of two directories. FID is computed when both
/// feature files are given.
MetricReport evaluate_sequence(
    const std::filesystem::path& synth_dir,
    const std::filesystem::path& truth_dir,
    const std::optional<std::filesystem::path>& synth_features = std::nullopt,
    const std::optional<std::filesystem::path>& truth_features = std::nullopt,
    const MetricConfig<double>& cfg = {});

}  // namespace mpt
