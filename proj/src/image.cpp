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

#include "jfactor/image.hpp"

#include <cmath>
#include <cstdio>
#include <utility>

namespace jfactor {
namespace {

void check_shape(int width, int height) {
  if (width < 1 || height < 1) {
    throw ValidationError("image dimensions must be at least 1x1, got " +
                          std::to_string(width) + "x" +
                          std::to_string(height));
  }
}

std::uint8_t clamp_round(double v) {
  const double r = std::round(v);
  if (r <= 0.0) return 0;
  if (r >= 255.0) return 255;
  return static_cast<std::uint8_t>(r);
}

}  // namespace

PixelImage::PixelImage(int width, int height, Channels channels,
                       std::uint8_t fill)
    : width_(width), height_(height), channels_(channels) {
  check_shape(width, height);
  samples_.assign(static_cast<std::size_t>(width) * height * channel_count(),
                  fill);
}

PixelImage::PixelImage(int width, int height, Channels channels,
                       std::vector<std::uint8_t> samples)
    : width_(width),
      height_(height),
      channels_(channels),
      samples_(std::move(samples)) {
  check_shape(width, height);
  const std::size_t expected =
      static_cast<std::size_t>(width) * height * channel_count();
  if (samples_.size() != expected) {
    throw ValidationError("sample buffer holds " +
                          std::to_string(samples_.size()) +
                          " values, expected " + std::to_string(expected));
  }
}

PixelImage to_luma(const PixelImage& image) {
  if (image.is_gray()) return image;
  PixelImage out(image.width(), image.height(), Channels::kGray);
  const auto src = image.samples();
  auto dst = out.samples();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    const double r = src[3 * i];
    const double g = src[3 * i + 1];
    const double b = src[3 * i + 2];
    dst[i] = clamp_round(0.299 * r + 0.587 * g + 0.114 * b);
  }
  return out;
}

PixelImage extract_channel(const PixelImage& image, int channel) {
  if (channel < 0 || channel >= image.channel_count()) {
    throw ValidationError("channel index " + std::to_string(channel) +
                          " out of range");
  }
  PixelImage out(image.width(), image.height(), Channels::kGray);
  const auto src = image.samples();
  auto dst = out.samples();
  const int stride = image.channel_count();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    dst[i] = src[i * stride + channel];
  }
  return out;
}

std::uint64_t content_hash(const PixelImage& image) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::uint8_t byte) {
    h ^= byte;
    h *= 0x100000001b3ULL;
  };
  for (int v : {image.width(), image.height(), image.channel_count()}) {
    for (int shift = 0; shift < 32; shift += 8) {
      mix(static_cast<std::uint8_t>(static_cast<std::uint32_t>(v) >> shift));
    }
  }
  for (std::uint8_t s : image.samples()) mix(s);
  return h;
}

std::string hash_to_hex(std::uint64_t hash) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(hash));
  return buf;
}

}  // namespace jfactor
