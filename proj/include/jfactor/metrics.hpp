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

#ifndef JFACTOR_METRICS_HPP_
#define JFACTOR_METRICS_HPP_

#include "jfactor/image.hpp"

namespace jfactor {

// Mean squared difference over all samples, on the 0-255 scale.
double mse(const PixelImage& a, const PixelImage& b);

// 10 log10(255^2 / mse); +infinity when the images are identical.
double psnr(const PixelImage& a, const PixelImage& b);

// Mean SSIM with an 11x11 Gaussian window (sigma 1.5), K1 = 0.01,
// K2 = 0.03, L = 255, over the valid region only. Multi-channel images
// average the per-channel scores.
double ssim(const PixelImage& a, const PixelImage& b);

// Blocking effect factor of `image` (Yim and Bovik): the excess mean squared
// difference across block-boundary neighbour pairs over non-boundary pairs,
// pooling horizontal and vertical pairs, scaled by
// log2(block) / log2(min(W, H)) and clamped at zero. Multi-channel images
// average the per-channel values.
double blocking_effect_factor(const PixelImage& image, int block = 8);

// PSNR with the BEF of the degraded image `b` added to the MSE.
double psnr_b(const PixelImage& a, const PixelImage& b);

struct MetricReport {
  double psnr;
  double ssim;
  double psnr_b;
  double mse;
};

enum class Comparison {
  kNative,  // all channels as stored
  kLuma,    // both images reduced to full-range BT.601 luma first
};

MetricReport evaluate(const PixelImage& reference, const PixelImage& test,
                      Comparison comparison = Comparison::kNative);

}  // namespace jfactor

#endif  // JFACTOR_METRICS_HPP_
