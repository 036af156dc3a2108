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

#include "jfactor/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

namespace jfactor {
namespace fs = std::filesystem;
namespace {

std::vector<std::uint8_t> slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed: " + path.string());
  return bytes;
}

PixelImage decode_png(const std::vector<std::uint8_t>& bytes,
                      const fs::path& path) {
  png_image img;
  std::memset(&img, 0, sizeof(img));
  img.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&img, bytes.data(), bytes.size())) {
    throw IoError("bad PNG " + path.string() + ": " + img.message);
  }
  const bool color = (img.format & PNG_FORMAT_FLAG_COLOR) != 0;
  img.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  const int width = static_cast<int>(img.width);
  const int height = static_cast<int>(img.height);
  const Channels channels = color ? Channels::kRgb : Channels::kGray;
  std::vector<std::uint8_t> samples(PNG_IMAGE_SIZE(img));
  if (!png_image_finish_read(&img, nullptr, samples.data(), 0, nullptr)) {
    const std::string msg = img.message;
    png_image_free(&img);
    throw IoError("bad PNG " + path.string() + ": " + msg);
  }
  return PixelImage(width, height, channels, std::move(samples));
}

std::uint32_t le32(const std::vector<std::uint8_t>& b, std::size_t off) {
  return b[off] | (b[off + 1] << 8) | (b[off + 2] << 16) |
         (static_cast<std::uint32_t>(b[off + 3]) << 24);
}

std::uint16_t le16(const std::vector<std::uint8_t>& b, std::size_t off) {
  return static_cast<std::uint16_t>(b[off] | (b[off + 1] << 8));
}

PixelImage decode_bmp(const std::vector<std::uint8_t>& b,
                      const fs::path& path) {
  auto fail = [&](const std::string& why) {
    return IoError("bad BMP " + path.string() + ": " + why);
  };
  if (b.size() < 54) throw fail("truncated header");
  const std::uint32_t data_offset = le32(b, 10);
  const std::uint32_t dib_size = le32(b, 14);
  if (dib_size < 40) throw fail("unsupported DIB header");
  const auto width = static_cast<std::int32_t>(le32(b, 18));
  const auto raw_height = static_cast<std::int32_t>(le32(b, 22));
  const int bpp = le16(b, 28);
  const std::uint32_t compression = le32(b, 30);
  std::uint32_t palette_size = le32(b, 46);
  if (width <= 0 || raw_height == 0) throw fail("bad dimensions");
  if (compression != 0 && !(compression == 3 && bpp == 32)) {
    throw fail("compressed BMPs are not supported");
  }
  const bool bottom_up = raw_height > 0;
  const int height = bottom_up ? raw_height : -raw_height;

  std::vector<std::array<std::uint8_t, 3>> palette;
  bool gray_palette = true;
  if (bpp == 8) {
    if (palette_size == 0) palette_size = 256;
    const std::size_t pal_off = 14 + dib_size;
    if (pal_off + 4 * palette_size > b.size()) throw fail("truncated palette");
    for (std::uint32_t i = 0; i < palette_size; ++i) {
      const std::uint8_t blue = b[pal_off + 4 * i];
      const std::uint8_t green = b[pal_off + 4 * i + 1];
      const std::uint8_t red = b[pal_off + 4 * i + 2];
      palette.push_back({red, green, blue});
      gray_palette = gray_palette && red == green && green == blue;
    }
  } else if (bpp != 24 && bpp != 32) {
    throw fail("unsupported bit depth " + std::to_string(bpp));
  }

  const std::size_t row_bytes = ((static_cast<std::size_t>(width) * bpp + 31) / 32) * 4;
  if (data_offset + row_bytes * height > b.size()) throw fail("truncated pixels");
  const Channels channels =
      (bpp == 8 && gray_palette) ? Channels::kGray : Channels::kRgb;
  PixelImage out(width, height, channels);
  for (int row = 0; row < height; ++row) {
    const int src_row = bottom_up ? height - 1 - row : row;
    const std::uint8_t* p = b.data() + data_offset + row_bytes * src_row;
    for (int col = 0; col < width; ++col) {
      if (bpp == 8) {
        const std::uint8_t idx = p[col];
        if (idx >= palette.size()) throw fail("palette index out of range");
        if (channels == Channels::kGray) {
          out.at(row, col) = palette[idx][0];
        } else {
          for (int c = 0; c < 3; ++c) out.at(row, col, c) = palette[idx][c];
        }
      } else {
        const int step = bpp / 8;
        out.at(row, col, 0) = p[col * step + 2];
        out.at(row, col, 1) = p[col * step + 1];
        out.at(row, col, 2) = p[col * step];
      }
    }
  }
  return out;
}

class PnmReader {
 public:
  PnmReader(const std::vector<std::uint8_t>& bytes, const fs::path& path)
      : b_(bytes), path_(path) {}

  PixelImage decode() {
    const char kind = static_cast<char>(b_[1]);
    pos_ = 2;
    const int width = next_int();
    const int height = next_int();
    const int maxval = next_int();
    if (width <= 0 || height <= 0) throw fail("bad dimensions");
    if (maxval <= 0 || maxval > 255) throw fail("only 8-bit PNM is supported");
    const bool color = kind == '3' || kind == '6';
    const bool binary = kind == '5' || kind == '6';
    PixelImage out(width, height, color ? Channels::kRgb : Channels::kGray);
    auto samples = out.samples();
    if (binary) {
      ++pos_;  // single whitespace after maxval
      if (pos_ + samples.size() > b_.size()) throw fail("truncated pixels");
      std::copy_n(b_.begin() + static_cast<std::ptrdiff_t>(pos_),
                  samples.size(), samples.begin());
    } else {
      for (auto& s : samples) s = static_cast<std::uint8_t>(next_int());
    }
    if (maxval != 255) {
      for (auto& s : samples) {
        s = static_cast<std::uint8_t>((s * 255 + maxval / 2) / maxval);
      }
    }
    return out;
  }

 private:
  IoError fail(const std::string& why) const {
    return IoError("bad PNM " + path_.string() + ": " + why);
  }

  int next_int() {
    while (pos_ < b_.size()) {
      if (b_[pos_] == '#') {
        while (pos_ < b_.size() && b_[pos_] != '\n') ++pos_;
      } else if (std::isspace(b_[pos_])) {
        ++pos_;
      } else {
        break;
      }
    }
    if (pos_ >= b_.size() || !std::isdigit(b_[pos_])) throw fail("bad header");
    long v = 0;
    while (pos_ < b_.size() && std::isdigit(b_[pos_])) {
      v = v * 10 + (b_[pos_++] - '0');
      if (v > 1'000'000) throw fail("value out of range");
    }
    return static_cast<int>(v);
  }

  const std::vector<std::uint8_t>& b_;
  const fs::path& path_;
  std::size_t pos_ = 0;
};

}  // namespace

PixelImage read_image(const fs::path& path) {
  const auto bytes = slurp(path);
  static constexpr std::uint8_t kPngMagic[] = {0x89, 'P', 'N', 'G'};
  if (bytes.size() >= 8 && std::equal(std::begin(kPngMagic), std::end(kPngMagic),
                                      bytes.begin())) {
    return decode_png(bytes, path);
  }
  if (bytes.size() >= 2 && bytes[0] == 'B' && bytes[1] == 'M') {
    return decode_bmp(bytes, path);
  }
  if (bytes.size() >= 3 && bytes[0] == 'P' && bytes[1] >= '2' &&
      bytes[1] <= '6' && bytes[1] != '4') {
    return PnmReader(bytes, path).decode();
  }
  throw IoError("unrecognized image format: " + path.string());
}

void write_png(const fs::path& path, const PixelImage& image) {
  png_image img;
  std::memset(&img, 0, sizeof(img));
  img.version = PNG_IMAGE_VERSION;
  img.width = static_cast<png_uint_32>(image.width());
  img.height = static_cast<png_uint_32>(image.height());
  img.format = image.is_gray() ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
  png_alloc_size_t size = 0;
  const auto samples = image.samples();
  if (!png_image_write_get_memory_size(img, size, 0, samples.data(), 0,
                                       nullptr)) {
    throw IoError("PNG encode failed for " + path.string() + ": " +
                  img.message);
  }
  std::vector<std::uint8_t> buf(size);
  if (!png_image_write_to_memory(&img, buf.data(), &size, 0, samples.data(),
                                 0, nullptr)) {
    throw IoError("PNG encode failed for " + path.string() + ": " +
                  img.message);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(size));
  if (!out) throw IoError("write failed: " + path.string());
}

bool has_image_extension(const fs::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return ext == ".png" || ext == ".bmp" || ext == ".ppm" || ext == ".pgm" ||
         ext == ".pnm";
}

std::vector<fs::path> list_images(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) {
    throw IoError("not a directory: " + dir.string());
  }
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && has_image_extension(entry.path())) {
      out.push_back(entry.path());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace jfactor
