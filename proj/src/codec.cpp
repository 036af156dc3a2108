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

#include "jfactor/codec.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numbers>
#include <sstream>
#include <vector>

namespace jfactor {
namespace {

constexpr std::array<int, kBlockArea> kLumaBase = {
    16, 11, 10, 16, 24,  40,  51,  61,   //
    12, 12, 14, 19, 26,  58,  60,  55,   //
    14, 13, 16, 24, 40,  57,  69,  56,   //
    14, 17, 22, 29, 51,  87,  80,  62,   //
    18, 22, 37, 56, 68,  109, 103, 77,   //
    24, 35, 55, 64, 81,  104, 113, 92,   //
    49, 64, 78, 87, 103, 121, 120, 101,  //
    72, 92, 95, 98, 112, 100, 103, 99};

constexpr std::array<int, kBlockArea> kChromaBase = {
    17, 18, 24, 47, 99, 99, 99, 99,  //
    18, 21, 26, 66, 99, 99, 99, 99,  //
    24, 26, 56, 99, 99, 99, 99, 99,  //
    47, 66, 99, 99, 99, 99, 99, 99,  //
    99, 99, 99, 99, 99, 99, 99, 99,  //
    99, 99, 99, 99, 99, 99, 99, 99,  //
    99, 99, 99, 99, 99, 99, 99, 99,  //
    99, 99, 99, 99, 99, 99, 99, 99};

// basis[u * 8 + x] = c(u) cos((2x + 1) u pi / 16)
const std::array<double, kBlockArea>& dct_basis() {
  static const std::array<double, kBlockArea> basis = [] {
    std::array<double, kBlockArea> b{};
    for (int u = 0; u < kBlockSize; ++u) {
      const double scale = u == 0 ? std::sqrt(1.0 / 8.0) : std::sqrt(2.0 / 8.0);
      for (int x = 0; x < kBlockSize; ++x) {
        b[u * kBlockSize + x] =
            scale * std::cos((2 * x + 1) * u * std::numbers::pi / 16.0);
      }
    }
    return b;
  }();
  return basis;
}

// Round half away from zero; exact for |v| < 2^53.
inline long long round_half_away(double v) {
  long long i = static_cast<long long>(v);
  const double frac = v - static_cast<double>(i);
  if (frac >= 0.5) {
    ++i;
  } else if (frac <= -0.5) {
    --i;
  }
  return i;
}

// Branch-free round_half_away for |v| < 2^31, vectorizable.
inline double round_half_away_small(double v) {
  const double t = static_cast<double>(static_cast<int>(v));
  const double frac = v - t;
  return t + (frac >= 0.5 ? 1.0 : 0.0) - (frac <= -0.5 ? 1.0 : 0.0);
}

// Decoded sample for a level-shifted spatial value, as an int.
inline int sample_value(double spatial) {
  const double v = std::min(std::max(spatial + 128.0, 0.0), 255.0);
  const int t = static_cast<int>(v);
  return t + (v - t >= 0.5 ? 1 : 0);
}

inline double sample_value_exact(double spatial) {
  double v = spatial + 128.0;
  v = v > 0.0 ? v : 0.0;
  v = v < 255.0 ? v : 255.0;
  const double t = static_cast<double>(static_cast<int>(v));
  return t + (v - t >= 0.5 ? 1.0 : 0.0);
}

inline std::uint8_t to_sample(double v) {
  if (v <= 0.0) return 0;
  if (v >= 255.0) return 255;
  return static_cast<std::uint8_t>(round_half_away(v));
}

PixelImage roundtrip_plane(const PixelImage& plane, QualityFactor qf,
                           ComponentKind kind) {
  return TransformedPlane(plane).decode(quant_table_from_qf(qf, kind));
}

void rgb_to_chroma(const PixelImage& rgb, PixelImage& cb, PixelImage& cr) {
  const auto src = rgb.samples();
  auto cb_out = cb.samples();
  auto cr_out = cr.samples();
  for (std::size_t i = 0; i < cb_out.size(); ++i) {
    const double r = src[3 * i];
    const double g = src[3 * i + 1];
    const double b = src[3 * i + 2];
    cb_out[i] = to_sample(-0.168736 * r - 0.331264 * g + 0.5 * b + 128.0);
    cr_out[i] = to_sample(0.5 * r - 0.418688 * g - 0.081312 * b + 128.0);
  }
}

// 2x2 box average with edge replication for odd sizes.
PixelImage downsample_420(const PixelImage& plane) {
  const int w = plane.width();
  const int h = plane.height();
  PixelImage out((w + 1) / 2, (h + 1) / 2, Channels::kGray);
  for (int r = 0; r < out.height(); ++r) {
    const int r0 = 2 * r;
    const int r1 = std::min(r0 + 1, h - 1);
    for (int c = 0; c < out.width(); ++c) {
      const int c0 = 2 * c;
      const int c1 = std::min(c0 + 1, w - 1);
      const int sum = plane.at(r0, c0) + plane.at(r0, c1) + plane.at(r1, c0) +
                      plane.at(r1, c1);
      out.at(r, c) = static_cast<std::uint8_t>((sum + 2) / 4);
    }
  }
  return out;
}

PixelImage upsample_420(const PixelImage& plane, int width, int height) {
  PixelImage out(width, height, Channels::kGray);
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) out.at(r, c) = plane.at(r / 2, c / 2);
  }
  return out;
}

// libjpeg h2v2_fancy_upsample, edge rows and columns replicated.
PixelImage upsample_triangle(const PixelImage& plane, int width, int height) {
  const int pw = plane.width();
  const int ph = plane.height();
  PixelImage out(width, height, Channels::kGray);
  std::vector<int> colsum(pw);
  for (int r = 0; r < height; ++r) {
    const int center = r / 2;
    const int other =
        std::clamp(r % 2 == 0 ? center - 1 : center + 1, 0, ph - 1);
    for (int c = 0; c < pw; ++c) {
      colsum[c] = 3 * plane.at(center, c) + plane.at(other, c);
    }
    for (int c = 0; c < width; ++c) {
      const int src = c / 2;
      int value;
      if (c % 2 == 0) {
        const int left = colsum[std::max(src - 1, 0)];
        value = (3 * colsum[src] + left + 8) >> 4;
      } else {
        const int right = colsum[std::min(src + 1, pw - 1)];
        value = (3 * colsum[src] + right + 7) >> 4;
      }
      out.at(r, c) = static_cast<std::uint8_t>(value);
    }
  }
  return out;
}

PixelImage ycbcr_to_rgb(const PixelImage& y, const PixelImage& cb,
                        const PixelImage& cr) {
  PixelImage out(y.width(), y.height(), Channels::kRgb);
  auto dst = out.samples();
  const auto ys = y.samples();
  const auto cbs = cb.samples();
  const auto crs = cr.samples();
  for (std::size_t i = 0; i < ys.size(); ++i) {
    const double luma = ys[i];
    const double b_diff = cbs[i] - 128.0;
    const double r_diff = crs[i] - 128.0;
    dst[3 * i] = to_sample(luma + 1.402 * r_diff);
    dst[3 * i + 1] = to_sample(luma - 0.344136 * b_diff - 0.714136 * r_diff);
    dst[3 * i + 2] = to_sample(luma + 1.772 * b_diff);
  }
  return out;
}

}  // namespace

QualityFactor::QualityFactor(int value) : value_(value) {
  if (value < kMin || value > kMax) {
    throw ValidationError("quality factor must be in [1, 100], got " +
                          std::to_string(value));
  }
}

QuantTable::QuantTable(const std::array<int, kBlockArea>& entries,
                       ComponentKind kind)
    : entries_(entries), kind_(kind) {
  for (int e : entries_) {
    if (e < 1 || e > 255) {
      throw ValidationError("quantization entry " + std::to_string(e) +
                            " outside [1, 255]");
    }
  }
}

std::string QuantTable::to_text() const {
  std::ostringstream out;
  for (int r = 0; r < kBlockSize; ++r) {
    for (int c = 0; c < kBlockSize; ++c) {
      if (c) out << ' ';
      out << at(r, c);
    }
    out << '\n';
  }
  return out.str();
}

QuantTable QuantTable::from_text(const std::string& text, ComponentKind kind) {
  std::istringstream in(text);
  std::array<int, kBlockArea> entries{};
  for (int i = 0; i < kBlockArea; ++i) {
    if (!(in >> entries[i])) {
      throw ValidationError("quantization table text needs 64 integers");
    }
  }
  std::string extra;
  if (in >> extra) {
    throw ValidationError("trailing data after quantization table");
  }
  return QuantTable(entries, kind);
}

const std::array<int, kBlockArea>& base_quant_table(ComponentKind kind) {
  return kind == ComponentKind::kLuma ? kLumaBase : kChromaBase;
}

QuantTable quant_table_from_qf(QualityFactor qf, ComponentKind kind) {
  const int q = qf.value();
  const long scale = q < 50 ? 5000 / q : 200 - 2 * q;
  const auto& base = base_quant_table(kind);
  std::array<int, kBlockArea> entries{};
  for (int i = 0; i < kBlockArea; ++i) {
    const long v = (base[i] * scale + 50) / 100;
    entries[i] = static_cast<int>(std::clamp(v, 1L, 255L));
  }
  return QuantTable(entries, kind);
}

Block fdct8x8(const Block& block) {
  const auto& a = dct_basis();
  Block tmp{};
  // tmp[r][v] = sum_c f[r][c] a[v][c]
  for (int r = 0; r < kBlockSize; ++r) {
    for (int v = 0; v < kBlockSize; ++v) {
      double s = 0.0;
      for (int c = 0; c < kBlockSize; ++c) {
        s += block[r * kBlockSize + c] * a[v * kBlockSize + c];
      }
      tmp[r * kBlockSize + v] = s;
    }
  }
  Block out{};
  for (int u = 0; u < kBlockSize; ++u) {
    for (int v = 0; v < kBlockSize; ++v) {
      double s = 0.0;
      for (int r = 0; r < kBlockSize; ++r) {
        s += a[u * kBlockSize + r] * tmp[r * kBlockSize + v];
      }
      out[u * kBlockSize + v] = s;
    }
  }
  return out;
}

Block idct8x8(const Block& coeffs) {
  const auto& a = dct_basis();
  // Skips zero coefficients and empty rows; terms accumulate in ascending
  // index order.
  std::array<int, kBlockSize> live_rows{};
  int live = 0;
  Block tmp{};
  // tmp[u][c] = sum_v F[u][v] a[v][c]
  for (int u = 0; u < kBlockSize; ++u) {
    const double* f = &coeffs[u * kBlockSize];
    double* t = &tmp[u * kBlockSize];
    bool any = false;
    for (int v = 0; v < kBlockSize; ++v) {
      if (f[v] == 0.0) continue;
      any = true;
      const double* basis = &a[v * kBlockSize];
      for (int c = 0; c < kBlockSize; ++c) t[c] += f[v] * basis[c];
    }
    if (any) live_rows[live++] = u;
  }
  Block out{};
  // out[r][c] = sum_u a[u][r] tmp[u][c]
  for (int k = 0; k < live; ++k) {
    const int u = live_rows[k];
    const double* t = &tmp[u * kBlockSize];
    for (int r = 0; r < kBlockSize; ++r) {
      const double w = a[u * kBlockSize + r];
      double* o = &out[r * kBlockSize];
      for (int c = 0; c < kBlockSize; ++c) o[c] += w * t[c];
    }
  }
  return out;
}

QuantizedBlock quantize_block(const Block& coeffs, const QuantTable& table) {
  QuantizedBlock q{};
  for (int i = 0; i < kBlockArea; ++i) {
    q[i] = static_cast<int>(round_half_away(coeffs[i] / table[i]));
  }
  return q;
}

namespace {

// dequantize_block(quantize_block(coeffs, divisors)) with the divisors
// already widened to double.
inline void requantize(const Block& coeffs, const Block& divisors, Block& out) {
  for (int i = 0; i < kBlockArea; ++i) {
    out[i] = round_half_away_small(coeffs[i] / divisors[i]) * divisors[i];
  }
}

Block widen(const QuantTable& table) {
  Block d{};
  for (int i = 0; i < kBlockArea; ++i) d[i] = table[i];
  return d;
}

}  // namespace

Block dequantize_block(const QuantizedBlock& quantized,
                       const QuantTable& table) {
  Block d{};
  for (int i = 0; i < kBlockArea; ++i) {
    d[i] = static_cast<double>(quantized[i]) * table[i];
  }
  return d;
}

TransformedPlane::TransformedPlane(const PixelImage& gray)
    : width_(gray.width()),
      height_(gray.height()),
      blocks_x_((gray.width() + kBlockSize - 1) / kBlockSize),
      blocks_y_((gray.height() + kBlockSize - 1) / kBlockSize),
      original_(gray.samples().begin(), gray.samples().end()) {
  if (!gray.is_gray()) {
    throw ValidationError("TransformedPlane needs a single-channel image");
  }
  coeffs_.reserve(static_cast<std::size_t>(blocks_x_) * blocks_y_);
  clipped_.reserve(coeffs_.capacity());
  for (int by = 0; by < blocks_y_; ++by) {
    for (int bx = 0; bx < blocks_x_; ++bx) {
      Block block{};
      bool clipped = false;
      for (int r = 0; r < kBlockSize; ++r) {
        const int row = std::min(by * kBlockSize + r, height_ - 1);
        for (int c = 0; c < kBlockSize; ++c) {
          const int col = std::min(bx * kBlockSize + c, width_ - 1);
          const std::uint8_t v = original_[row * width_ + col];
          clipped = clipped || v == 0 || v == 255;
          block[r * kBlockSize + c] = static_cast<double>(v) - 128.0;
        }
      }
      coeffs_.push_back(fdct8x8(block));
      clipped_.push_back(clipped ? 1 : 0);
    }
  }
}

PixelImage TransformedPlane::decode(const QuantTable& table) const {
  PixelImage out(width_, height_, Channels::kGray);
  auto dst = out.samples();
  const Block divisors = widen(table);
  Block dequantized;
  for (int by = 0; by < blocks_y_; ++by) {
    const int rows = std::min(kBlockSize, height_ - by * kBlockSize);
    for (int bx = 0; bx < blocks_x_; ++bx) {
      const int cols = std::min(kBlockSize, width_ - bx * kBlockSize);
      requantize(coeffs_[by * blocks_x_ + bx], divisors, dequantized);
      const Block spatial = idct8x8(dequantized);
      for (int r = 0; r < rows; ++r) {
        const std::size_t base =
            static_cast<std::size_t>(by * kBlockSize + r) * width_ +
            bx * kBlockSize;
        for (int c = 0; c < cols; ++c) {
          dst[base + c] =
              static_cast<std::uint8_t>(sample_value(spatial[r * kBlockSize + c]));
        }
      }
    }
  }
  return out;
}

std::size_t TransformedPlane::counted_samples(bool skip_clipped) const {
  std::size_t n = 0;
  for (int by = 0; by < blocks_y_; ++by) {
    const int rows = std::min(kBlockSize, height_ - by * kBlockSize);
    for (int bx = 0; bx < blocks_x_; ++bx) {
      if (skip_clipped && clipped_[by * blocks_x_ + bx]) continue;
      n += static_cast<std::size_t>(rows) *
           std::min(kBlockSize, width_ - bx * kBlockSize);
    }
  }
  return n;
}

std::vector<double> TransformedPlane::squared_errors(
    std::span<const QuantTable> tables, bool skip_clipped) const {
  std::vector<Block> divisors;
  divisors.reserve(tables.size());
  for (const QuantTable& t : tables) divisors.push_back(widen(t));
  std::vector<std::uint64_t> sse(tables.size(), 0);
  Block dequantized;
  Block previous;
  Block original{};
  Block inside{};
  for (int by = 0; by < blocks_y_; ++by) {
    const int rows = std::min(kBlockSize, height_ - by * kBlockSize);
    for (int bx = 0; bx < blocks_x_; ++bx) {
      if (skip_clipped && clipped_[by * blocks_x_ + bx]) continue;
      const int cols = std::min(kBlockSize, width_ - bx * kBlockSize);
      for (int r = 0; r < kBlockSize; ++r) {
        for (int c = 0; c < kBlockSize; ++c) {
          const bool in = r < rows && c < cols;
          original[r * kBlockSize + c] =
              in ? original_[static_cast<std::size_t>(by * kBlockSize + r) *
                                 width_ +
                             bx * kBlockSize + c]
                 : 0.0;
          inside[r * kBlockSize + c] = in ? 1.0 : 0.0;
        }
      }
      const Block& coeffs = coeffs_[by * blocks_x_ + bx];
      std::uint64_t block_sse = 0;
      for (std::size_t t = 0; t < tables.size(); ++t) {
        requantize(coeffs, divisors[t], dequantized);
        if (t == 0 || std::memcmp(dequantized.data(), previous.data(),
                                  sizeof(Block)) != 0) {
          const Block spatial = idct8x8(dequantized);
          int acc = 0;
          for (int i = 0; i < kBlockArea; ++i) {
            const double d = sample_value_exact(spatial[i]) - original[i];
            acc += static_cast<int>(inside[i] * d * d);
          }
          block_sse = static_cast<std::uint64_t>(acc);
          previous = dequantized;
        }
        sse[t] += block_sse;
      }
    }
  }
  return std::vector<double>(sse.begin(), sse.end());
}

double TransformedPlane::squared_error(const QuantTable& table) const {
  return squared_errors(std::span<const QuantTable>(&table, 1)).front();
}

std::string_view to_string(ChromaSubsampling chroma) {
  return chroma == ChromaSubsampling::k420 ? "420" : "444";
}

std::string_view to_string(ChromaUpsampling upsampling) {
  return upsampling == ChromaUpsampling::kNearest ? "nearest" : "triangle";
}

ChromaSubsampling parse_chroma(std::string_view text) {
  if (text == "420") return ChromaSubsampling::k420;
  if (text == "444") return ChromaSubsampling::k444;
  throw ValidationError("chroma subsampling must be 420 or 444, got '" +
                        std::string(text) + "'");
}

ChromaUpsampling parse_upsampling(std::string_view text) {
  if (text == "nearest") return ChromaUpsampling::kNearest;
  if (text == "triangle") return ChromaUpsampling::kTriangle;
  throw ValidationError("chroma upsampling must be nearest or triangle, got '" +
                        std::string(text) + "'");
}

PixelImage jpeg_roundtrip(const PixelImage& image, QualityFactor qf,
                          const CodecConfig& config) {
  if (image.is_gray() || config.grayscale_mode) {
    return roundtrip_plane(to_luma(image), qf, ComponentKind::kLuma);
  }
  const int w = image.width();
  const int h = image.height();
  const PixelImage y = to_luma(image);
  PixelImage cb(w, h, Channels::kGray);
  PixelImage cr(w, h, Channels::kGray);
  rgb_to_chroma(image, cb, cr);

  const PixelImage y_out = roundtrip_plane(y, qf, ComponentKind::kLuma);
  if (config.chroma == ChromaSubsampling::k444) {
    return ycbcr_to_rgb(y_out, roundtrip_plane(cb, qf, ComponentKind::kChroma),
                        roundtrip_plane(cr, qf, ComponentKind::kChroma));
  }
  const PixelImage cb_out =
      roundtrip_plane(downsample_420(cb), qf, ComponentKind::kChroma);
  const PixelImage cr_out =
      roundtrip_plane(downsample_420(cr), qf, ComponentKind::kChroma);
  if (config.upsampling == ChromaUpsampling::kTriangle) {
    return ycbcr_to_rgb(y_out, upsample_triangle(cb_out, w, h),
                        upsample_triangle(cr_out, w, h));
  }
  return ycbcr_to_rgb(y_out, upsample_420(cb_out, w, h),
                      upsample_420(cr_out, w, h));
}

}  // namespace jfactor
