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

#ifndef JFACTOR_IMAGE_HPP_
#define JFACTOR_IMAGE_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace jfactor {

// Raised when an argument violates a documented precondition.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised when a file cannot be read, decoded or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Channels : int { kGray = 1, kRgb = 3 };

// 8-bit raster, row-major with interleaved channels.
class PixelImage {
 public:
  PixelImage(int width, int height, Channels channels, std::uint8_t fill = 0);
  PixelImage(int width, int height, Channels channels,
             std::vector<std::uint8_t> samples);

  int width() const { return width_; }
  int height() const { return height_; }
  Channels channels() const { return channels_; }
  int channel_count() const { return static_cast<int>(channels_); }
  bool is_gray() const { return channels_ == Channels::kGray; }
  std::size_t sample_count() const { return samples_.size(); }

  std::uint8_t at(int row, int col, int channel = 0) const {
    return samples_[index(row, col, channel)];
  }
  std::uint8_t& at(int row, int col, int channel = 0) {
    return samples_[index(row, col, channel)];
  }

  std::span<const std::uint8_t> samples() const { return samples_; }
  std::span<std::uint8_t> samples() { return samples_; }

  bool same_shape(const PixelImage& other) const {
    return width_ == other.width_ && height_ == other.height_ &&
           channels_ == other.channels_;
  }

  bool operator==(const PixelImage& other) const = default;

 private:
  std::size_t index(int row, int col, int channel) const {
    return (static_cast<std::size_t>(row) * width_ + col) * channel_count() +
           channel;
  }

  int width_;
  int height_;
  Channels channels_;
  std::vector<std::uint8_t> samples_;
};

// Full-range BT.601 luma. Gray images are returned unchanged.
PixelImage to_luma(const PixelImage& image);

// Extracts one channel as a gray image.
PixelImage extract_channel(const PixelImage& image, int channel);

// FNV-1a over the shape and the samples.
std::uint64_t content_hash(const PixelImage& image);

std::string hash_to_hex(std::uint64_t hash);

}  // namespace jfactor

#endif  // JFACTOR_IMAGE_HPP_
