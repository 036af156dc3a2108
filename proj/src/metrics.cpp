// Copyright (c) the jfactor authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "jfactor/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace jfactor {
namespace {

constexpr int kWindow = 11;
constexpr double kSigma = 1.5;
constexpr double kPeak = 255.0;

void check_pair(const PixelImage& a, const PixelImage& b) {
  if (!a.same_shape(b)) {
    throw ValidationError(
        "image shapes differ: " + std::to_string(a.width()) + "x" +
        std::to_string(a.height()) + "x" + std::to_string(a.channel_count()) +
        " vs " + std::to_string(b.width()) + "x" +
        std::to_string(b.height()) + "x" + std::to_string(b.channel_count()));
  }
}

double to_db(double err) {
  if (err <= 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(kPeak * kPeak / err);
}

const std::array<double, kWindow>& gaussian_taps() {
  static const std::array<double, kWindow> taps = [] {
    std::array<double, kWindow> t{};
    double sum = 0.0;
    for (int i = 0; i < kWindow; ++i) {
      const double x = i - kWindow / 2;
      t[i] = std::exp(-(x * x) / (2.0 * kSigma * kSigma));
      sum += t[i];
    }
    for (double& v : t) v /= sum;
    return t;
  }();
  return taps;
}

// Separable valid-region Gaussian filter of a w x h field.
std::vector<double> filter_valid(const std::vector<double>& src, int w, int h) {
  const auto& g = gaussian_taps();
  const int ow = w - kWindow + 1;
  const int oh = h - kWindow + 1;
  std::vector<double> rows(static_cast<std::size_t>(h) * ow);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < ow; ++c) {
      double s = 0.0;
      for (int k = 0; k < kWindow; ++k) s += g[k] * src[r * w + c + k];
      rows[r * ow + c] = s;
    }
  }
  std::vector<double> out(static_cast<std::size_t>(oh) * ow);
  for (int r = 0; r < oh; ++r) {
    for (int c = 0; c < ow; ++c) {
      double s = 0.0;
      for (int k = 0; k < kWindow; ++k) s += g[k] * rows[(r + k) * ow + c];
      out[r * ow + c] = s;
    }
  }
  return out;
}

double ssim_plane(const PixelImage& a, const PixelImage& b) {
  const int w = a.width();
  const int h = a.height();
  const std::size_t n = static_cast<std::size_t>(w) * h;
  std::vector<double> x(n), y(n), xx(n), yy(n), xy(n);
  const auto sa = a.samples();
  const auto sb = b.samples();
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = sa[i];
    y[i] = sb[i];
    xx[i] = x[i] * x[i];
    yy[i] = y[i] * y[i];
    xy[i] = x[i] * y[i];
  }
  const auto mu_x = filter_valid(x, w, h);
  const auto mu_y = filter_valid(y, w, h);
  const auto e_xx = filter_valid(xx, w, h);
  const auto e_yy = filter_valid(yy, w, h);
  const auto e_xy = filter_valid(xy, w, h);
  const double c1 = (0.01 * kPeak) * (0.01 * kPeak);
  const double c2 = (0.03 * kPeak) * (0.03 * kPeak);
  double total = 0.0;
  for (std::size_t i = 0; i < mu_x.size(); ++i) {
    const double mx = mu_x[i];
    const double my = mu_y[i];
    const double var_x = e_xx[i] - mx * mx;
    const double var_y = e_yy[i] - my * my;
    const double cov = e_xy[i] - mx * my;
    total += ((2.0 * mx * my + c1) * (2.0 * cov + c2)) /
             ((mx * mx + my * my + c1) * (var_x + var_y + c2));
  }
  return total / static_cast<double>(mu_x.size());
}

double bef_plane(const PixelImage& p, int block) {
  const int w = p.width();
  const int h = p.height();
  std::uint64_t boundary_sum = 0;
  std::uint64_t interior_sum = 0;
  std::uint64_t boundary_pairs = 0;
  std::uint64_t interior_pairs = 0;
  auto add = [&](int a, int b, bool on_boundary) {
    const int d = a - b;
    if (on_boundary) {
      boundary_sum += static_cast<std::uint64_t>(d * d);
      ++boundary_pairs;
    } else {
      interior_sum += static_cast<std::uint64_t>(d * d);
      ++interior_pairs;
    }
  };
  // Pair (k, k + 1) straddles a boundary when k + 1 is a multiple of block.
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c + 1 < w; ++c) {
      add(p.at(r, c), p.at(r, c + 1), (c + 1) % block == 0);
    }
  }
  for (int r = 0; r + 1 < h; ++r) {
    const bool on_boundary = (r + 1) % block == 0;
    for (int c = 0; c < w; ++c) add(p.at(r, c), p.at(r + 1, c), on_boundary);
  }
  const double boundary = static_cast<double>(boundary_sum) / boundary_pairs;
  const double interior = static_cast<double>(interior_sum) / interior_pairs;
  if (boundary <= interior) return 0.0;
  const double scale =
      std::log2(static_cast<double>(block)) / std::log2(std::min(w, h));
  return scale * (boundary - interior);
}

}  // namespace

double mse(const PixelImage& a, const PixelImage& b) {
  check_pair(a, b);
  const auto sa = a.samples();
  const auto sb = b.samples();
  std::uint64_t sse = 0;
  for (std::size_t i = 0; i < sa.size(); ++i) {
    const int d = static_cast<int>(sa[i]) - static_cast<int>(sb[i]);
    sse += static_cast<std::uint64_t>(d * d);
  }
  return static_cast<double>(sse) / static_cast<double>(sa.size());
}

double psnr(const PixelImage& a, const PixelImage& b) { return to_db(mse(a, b)); }

double ssim(const PixelImage& a, const PixelImage& b) {
  check_pair(a, b);
  if (a.width() < kWindow || a.height() < kWindow) {
    throw ValidationError("SSIM needs images of at least 11x11");
  }
  if (a.is_gray()) return ssim_plane(a, b);
  double total = 0.0;
  for (int c = 0; c < a.channel_count(); ++c) {
    total += ssim_plane(extract_channel(a, c), extract_channel(b, c));
  }
  return total / a.channel_count();
}

double blocking_effect_factor(const PixelImage& image, int block) {
  if (block < 2) throw ValidationError("block size must be at least 2");
  if (image.width() < 2 * block || image.height() < 2 * block) {
    throw ValidationError("BEF needs at least two blocks per dimension");
  }
  if (image.is_gray()) return bef_plane(image, block);
  double total = 0.0;
  for (int c = 0; c < image.channel_count(); ++c) {
    total += bef_plane(extract_channel(image, c), block);
  }
  return total / image.channel_count();
}

double psnr_b(const PixelImage& a, const PixelImage& b) {
  const double err = mse(a, b);
  return to_db(err + blocking_effect_factor(b));
}

MetricReport evaluate(const PixelImage& reference, const PixelImage& test,
                      Comparison comparison) {
  if (comparison == Comparison::kLuma) {
    return evaluate(to_luma(reference), to_luma(test), Comparison::kNative);
  }
  const double err = mse(reference, test);
  return MetricReport{
      .psnr = to_db(err),
      .ssim = ssim(reference, test),
      .psnr_b = to_db(err + blocking_effect_factor(test)),
      .mse = err,
  };
}

}  // namespace jfactor
