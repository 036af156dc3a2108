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

#ifndef JFACTOR_CODEC_HPP_
#define JFACTOR_CODEC_HPP_

// Pixel-domain baseline JPEG model: quantization tables, 8x8 DCT and the
// decode(encode(x)) round trip. Entropy coding is lossless and omitted.

#include <array>
#include <compare>
#include <span>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "jfactor/image.hpp"

namespace jfactor {

inline constexpr int kBlockSize = 8;
inline constexpr int kBlockArea = 64;

// JPEG quality factor in [1, 100].
class QualityFactor {
 public:
  static constexpr int kMin = 1;
  static constexpr int kMax = 100;

  explicit QualityFactor(int value);

  int value() const { return value_; }
  auto operator<=>(const QualityFactor&) const = default;

 private:
  int value_;
};

enum class ComponentKind { kLuma, kChroma };

// Row-major 8x8 blocks.
using Block = std::array<double, kBlockArea>;
using QuantizedBlock = std::array<int, kBlockArea>;

class QuantTable {
 public:
  // Throws ValidationError unless every entry lies in [1, 255].
  QuantTable(const std::array<int, kBlockArea>& entries, ComponentKind kind);

  int at(int row, int col) const { return entries_[row * kBlockSize + col]; }
  int operator[](int index) const { return entries_[index]; }
  const std::array<int, kBlockArea>& entries() const { return entries_; }
  ComponentKind kind() const { return kind_; }

  // 8 rows of 8 space-separated integers, each row newline-terminated.
  std::string to_text() const;
  static QuantTable from_text(const std::string& text, ComponentKind kind);

  bool operator==(const QuantTable&) const = default;

 private:
  std::array<int, kBlockArea> entries_;
  ComponentKind kind_;
};

// Annex K example tables.
const std::array<int, kBlockArea>& base_quant_table(ComponentKind kind);

// libjpeg quality scaling: scale = qf < 50 ? 5000 / qf : 200 - 2 qf, entries
// floor((base * scale + 50) / 100) clamped to [1, 255].
QuantTable quant_table_from_qf(QualityFactor qf, ComponentKind kind);

// Orthonormal 2-D DCT-II of a level-shifted block and its inverse.
Block fdct8x8(const Block& block);
Block idct8x8(const Block& coeffs);

// Round half away from zero of coeffs / table.
QuantizedBlock quantize_block(const Block& coeffs, const QuantTable& table);
Block dequantize_block(const QuantizedBlock& quantized,
                       const QuantTable& table);

enum class ChromaSubsampling { k420, k444 };

// Decoder-side chroma reconstruction for 4:2:0. kTriangle is libjpeg's
// "fancy" h2v2 filter (3:1 weights in each direction).
enum class ChromaUpsampling { kNearest, kTriangle };

struct CodecConfig {
  ChromaSubsampling chroma = ChromaSubsampling::k420;
  ChromaUpsampling upsampling = ChromaUpsampling::kNearest;
  // Compress the luma channel only. RGB inputs come back as gray luma.
  bool grayscale_mode = false;

  bool operator==(const CodecConfig&) const = default;
};

// "420"/"444" and "nearest"/"triangle". Parsers throw ValidationError.
std::string_view to_string(ChromaSubsampling chroma);
std::string_view to_string(ChromaUpsampling upsampling);
ChromaSubsampling parse_chroma(std::string_view text);
ChromaUpsampling parse_upsampling(std::string_view text);

// decode(encode(image)) at `qf`. Output has the input's dimensions; channel
// count is preserved except that grayscale_mode turns RGB into gray.
PixelImage jpeg_roundtrip(const PixelImage& image, QualityFactor qf,
                          const CodecConfig& config = {});

// A single 8-bit plane with the forward DCT of every edge-padded block,
// for repeated requantization.
class TransformedPlane {
 public:
  explicit TransformedPlane(const PixelImage& gray);

  int width() const { return width_; }
  int height() const { return height_; }

  // Decoded plane at `table`, cropped to the original size.
  PixelImage decode(const QuantTable& table) const;

  // Sum over the original (unpadded) samples of (decoded - original)^2.
  double squared_error(const QuantTable& table) const;

  // squared_error for each table, sweeping the blocks once. With
  // skip_clipped, blocks holding a 0 or 255 sample are left out.
  std::vector<double> squared_errors(std::span<const QuantTable> tables,
                                     bool skip_clipped = false) const;

  // Samples summed over by squared_errors with the same flag.
  std::size_t counted_samples(bool skip_clipped = false) const;

 private:
  int width_;
  int height_;
  int blocks_x_;
  int blocks_y_;
  std::vector<std::uint8_t> original_;
  std::vector<Block> coeffs_;
  std::vector<char> clipped_;
};

}  // namespace jfactor

#endif  // JFACTOR_CODEC_HPP_
