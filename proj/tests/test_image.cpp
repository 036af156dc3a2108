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

#include <gtest/gtest.h>

#include <fstream>

#include "jfactor/image.hpp"
#include "jfactor/image_io.hpp"
#include "test_support.hpp"

namespace jfactor {
namespace {

namespace fs = std::filesystem;
using testing::random_image;
using testing::TempDir;

void write_bytes(const fs::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

void put_le(std::vector<std::uint8_t>& b, std::size_t at, std::uint32_t v, int n) {
  for (int k = 0; k < n; ++k) b[at + k] = static_cast<std::uint8_t>(v >> (8 * k));
}

// Uncompressed 24-bit bottom-up BMP.
std::vector<std::uint8_t> bmp24(const PixelImage& img) {
  const int stride = (img.width() * 3 + 3) / 4 * 4;
  std::vector<std::uint8_t> b(54 + static_cast<std::size_t>(stride) * img.height(), 0);
  b[0] = 'B';
  b[1] = 'M';
  put_le(b, 2, static_cast<std::uint32_t>(b.size()), 4);
  put_le(b, 10, 54, 4);
  put_le(b, 14, 40, 4);
  put_le(b, 18, static_cast<std::uint32_t>(img.width()), 4);
  put_le(b, 22, static_cast<std::uint32_t>(img.height()), 4);
  put_le(b, 26, 1, 2);
  put_le(b, 28, 24, 2);
  for (int r = 0; r < img.height(); ++r) {
    const std::size_t row = 54 + static_cast<std::size_t>(img.height() - 1 - r) * stride;
    for (int c = 0; c < img.width(); ++c) {
      b[row + 3 * c] = img.at(r, c, 2);
      b[row + 3 * c + 1] = img.at(r, c, 1);
      b[row + 3 * c + 2] = img.at(r, c, 0);
    }
  }
  return b;
}

TEST(PixelImage, ValidatesShape) {
  EXPECT_THROW(PixelImage(0, 4, Channels::kGray), ValidationError);
  EXPECT_THROW(PixelImage(4, -1, Channels::kRgb), ValidationError);
  EXPECT_THROW(PixelImage(2, 2, Channels::kRgb, std::vector<std::uint8_t>(11)),
               ValidationError);
  const PixelImage img(3, 2, Channels::kRgb, 7);
  EXPECT_EQ(img.sample_count(), 18u);
  EXPECT_EQ(img.at(1, 2, 2), 7);
}

TEST(PixelImage, InterleavedLayout) {
  PixelImage img(2, 2, Channels::kRgb);
  img.at(1, 0, 2) = 9;
  EXPECT_EQ(img.samples()[(1 * 2 + 0) * 3 + 2], 9);
}

TEST(Luma, Bt601FullRange) {
  PixelImage img(4, 1, Channels::kRgb);
  const int px[4][3] = {{255, 0, 0}, {0, 255, 0}, {0, 0, 255}, {200, 100, 50}};
  for (int c = 0; c < 4; ++c) {
    for (int k = 0; k < 3; ++k) img.at(0, c, k) = static_cast<std::uint8_t>(px[c][k]);
  }
  const PixelImage y = to_luma(img);
  ASSERT_TRUE(y.is_gray());
  EXPECT_EQ(y.at(0, 0), 76);   // 76.245
  EXPECT_EQ(y.at(0, 1), 150);  // 149.685
  EXPECT_EQ(y.at(0, 2), 29);   // 29.07
  EXPECT_EQ(y.at(0, 3), 124);  // 59.8 + 58.7 + 5.7
}

TEST(Luma, GrayPassesThrough) {
  const PixelImage g = random_image(5, 4, Channels::kGray, 1);
  EXPECT_EQ(to_luma(g), g);
}

TEST(ContentHash, SensitiveToSamplesAndShape) {
  const PixelImage a = random_image(8, 8, Channels::kGray, 2);
  PixelImage b = a;
  EXPECT_EQ(content_hash(a), content_hash(b));
  b.at(3, 3) ^= 1;
  EXPECT_NE(content_hash(a), content_hash(b));
  const PixelImage wide(4, 1, Channels::kGray, 0);
  const PixelImage tall(1, 4, Channels::kGray, 0);
  EXPECT_NE(content_hash(wide), content_hash(tall));
  EXPECT_EQ(hash_to_hex(0x1f).size(), 16u);
}

TEST(ImageIo, PngRoundTripGrayAndColor) {
  TempDir dir("png");
  for (Channels ch : {Channels::kGray, Channels::kRgb}) {
    const PixelImage img = random_image(13, 7, ch, 3);
    const fs::path p = dir.path() / "x.png";
    write_png(p, img);
    EXPECT_EQ(read_image(p), img);
  }
}

TEST(ImageIo, PngBytesAreDeterministic) {
  TempDir dir("pngdet");
  const PixelImage img = random_image(40, 30, Channels::kRgb, 4);
  write_png(dir.path() / "a.png", img);
  write_png(dir.path() / "b.png", img);
  std::ifstream a(dir.path() / "a.png", std::ios::binary);
  std::ifstream b(dir.path() / "b.png", std::ios::binary);
  const std::string sa{std::istreambuf_iterator<char>(a), {}};
  const std::string sb{std::istreambuf_iterator<char>(b), {}};
  EXPECT_EQ(sa, sb);
}

TEST(ImageIo, ReadsBmp24) {
  TempDir dir("bmp");
  const PixelImage img = random_image(5, 3, Channels::kRgb, 5);
  write_bytes(dir.path() / "x.bmp", bmp24(img));
  EXPECT_EQ(read_image(dir.path() / "x.bmp"), img);
}

TEST(ImageIo, ReadsBinaryAndAsciiPnm) {
  TempDir dir("pnm");
  const PixelImage gray = random_image(4, 3, Channels::kGray, 6);
  std::string p5 = "P5\n# comment\n4 3\n255\n";
  for (auto v : gray.samples()) p5.push_back(static_cast<char>(v));
  std::ofstream(dir.path() / "g.pgm", std::ios::binary) << p5;
  EXPECT_EQ(read_image(dir.path() / "g.pgm"), gray);

  std::ofstream(dir.path() / "c.ppm") << "P3\n2 1\n255\n255 0 10  1 2 3\n";
  const PixelImage c = read_image(dir.path() / "c.ppm");
  ASSERT_EQ(c.channel_count(), 3);
  EXPECT_EQ(c.at(0, 0, 2), 10);
  EXPECT_EQ(c.at(0, 1, 1), 2);
}

TEST(ImageIo, ErrorsAreIoErrors) {
  TempDir dir("bad");
  EXPECT_THROW(read_image(dir.path() / "missing.png"), IoError);
  std::ofstream(dir.path() / "junk.png") << "not an image";
  EXPECT_THROW(read_image(dir.path() / "junk.png"), IoError);
  write_bytes(dir.path() / "trunc.bmp", {'B', 'M', 0, 0});
  EXPECT_THROW(read_image(dir.path() / "trunc.bmp"), IoError);
}

TEST(ImageIo, ListImagesSortedByExtension) {
  TempDir dir("list");
  const PixelImage img(2, 2, Channels::kGray);
  write_png(dir.path() / "b.png", img);
  write_png(dir.path() / "a.png", img);
  std::ofstream(dir.path() / "notes.txt") << "x";
  const auto files = list_images(dir.path());
  ASSERT_EQ(files.size(), 2u);
  EXPECT_EQ(files[0].filename(), "a.png");
  EXPECT_EQ(files[1].filename(), "b.png");
}

}  // namespace
}  // namespace jfactor
