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

#include "jfactor/degradation.hpp"

#include <string>

namespace jfactor {

Shift::Shift(int rows, int cols) : rows_(rows), cols_(cols) {
  if (rows < 0 || rows > 7 || cols < 0 || cols > 7) {
    throw ValidationError("shift components must be in [0, 7], got (" +
                          std::to_string(rows) + "," + std::to_string(cols) +
                          ")");
  }
}

PixelImage shift_crop(const PixelImage& image, Shift shift) {
  if (image.height() <= shift.rows() || image.width() <= shift.cols()) {
    throw ValidationError("image " + std::to_string(image.width()) + "x" +
                          std::to_string(image.height()) +
                          " too small for shift (" +
                          std::to_string(shift.rows()) + "," +
                          std::to_string(shift.cols()) + ")");
  }
  if (shift.aligned()) return image;
  const int w = image.width() - shift.cols();
  const int h = image.height() - shift.rows();
  const int ch = image.channel_count();
  PixelImage out(w, h, image.channels());
  const auto src = image.samples();
  auto dst = out.samples();
  for (int r = 0; r < h; ++r) {
    const auto from = src.subspan(
        (static_cast<std::size_t>(r + shift.rows()) * image.width() +
         shift.cols()) * ch,
        static_cast<std::size_t>(w) * ch);
    std::copy(from.begin(), from.end(),
              dst.begin() + static_cast<std::ptrdiff_t>(r) * w * ch);
  }
  return out;
}

PixelImage degrade_single(const PixelImage& image, QualityFactor qf,
                          const CodecConfig& config) {
  return jpeg_roundtrip(image, qf, config);
}

PixelImage degrade_double(const PixelImage& image, QualityFactor qf1,
                          QualityFactor qf2, Shift shift,
                          const CodecConfig& config) {
  if (image.height() <= shift.rows() || image.width() <= shift.cols()) {
    shift_crop(image, shift);
  }
  return jpeg_roundtrip(shift_crop(jpeg_roundtrip(image, qf1, config), shift),
                        qf2, config);
}

DoubleRegime classify_double_regime(bool aligned, QualityFactor qf1,
                                    QualityFactor qf2) {
  if (aligned || qf1 > qf2) return DoubleRegime::kSimple;
  return DoubleRegime::kComplex;
}

std::string_view to_string(DoubleRegime regime) {
  return regime == DoubleRegime::kSimple ? "simple" : "complex";
}

DegradationRecipe DegradationRecipe::single(QualityFactor qf,
                                            const CodecConfig& codec) {
  return DegradationRecipe(RecipeKind::kSingle, qf, std::nullopt,
                           std::nullopt, codec);
}

DegradationRecipe DegradationRecipe::double_jpeg(QualityFactor qf1,
                                                 QualityFactor qf2,
                                                 Shift shift,
                                                 const CodecConfig& codec) {
  return DegradationRecipe(RecipeKind::kDouble, qf1, qf2, shift, codec);
}

PixelImage DegradationRecipe::apply(const PixelImage& clean) const {
  if (kind_ == RecipeKind::kSingle) {
    return degrade_single(clean, qf1_, codec_);
  }
  return degrade_double(clean, qf1_, *qf2_, *shift_, codec_);
}

PixelImage DegradationRecipe::reference(const PixelImage& clean) const {
  PixelImage base = codec_.grayscale_mode ? to_luma(clean) : clean;
  if (kind_ == RecipeKind::kSingle) return base;
  return shift_crop(base, *shift_);
}

}  // namespace jfactor
