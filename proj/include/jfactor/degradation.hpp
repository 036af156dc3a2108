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

#ifndef JFACTOR_DEGRADATION_HPP_
#define JFACTOR_DEGRADATION_HPP_

// Single and non-aligned double JPEG degradation:
//   y = JPEG(shift(JPEG(x, qf1)), qf2)
// where shift removes the first `rows` rows and `cols` columns.

#include <optional>
#include <string_view>

#include "jfactor/codec.hpp"
#include "jfactor/image.hpp"

namespace jfactor {

// Grid offset between two compressions, both components in [0, 7].
class Shift {
 public:
  Shift(int rows, int cols);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool aligned() const { return rows_ == 0 && cols_ == 0; }

  auto operator<=>(const Shift&) const = default;

 private:
  int rows_;
  int cols_;
};

// Drops the first `rows` rows and `cols` columns. Throws ValidationError if
// the image would become empty.
PixelImage shift_crop(const PixelImage& image, Shift shift);

PixelImage degrade_single(const PixelImage& image, QualityFactor qf,
                          const CodecConfig& config = {});

PixelImage degrade_double(const PixelImage& image, QualityFactor qf1,
                          QualityFactor qf2, Shift shift,
                          const CodecConfig& config = {});

enum class DoubleRegime { kSimple, kComplex };

// Aligned double and non-aligned with qf1 > qf2 behave like a single
// compression; non-aligned with qf1 <= qf2 leaves composite artifacts.
DoubleRegime classify_double_regime(bool aligned, QualityFactor qf1,
                                    QualityFactor qf2);

std::string_view to_string(DoubleRegime regime);

enum class RecipeKind { kSingle, kDouble };

// Complete provenance of a degraded image.
class DegradationRecipe {
 public:
  static DegradationRecipe single(QualityFactor qf,
                                  const CodecConfig& codec = {});
  static DegradationRecipe double_jpeg(QualityFactor qf1, QualityFactor qf2,
                                       Shift shift,
                                       const CodecConfig& codec = {});

  RecipeKind kind() const { return kind_; }
  QualityFactor qf1() const { return qf1_; }
  const std::optional<QualityFactor>& qf2() const { return qf2_; }
  const std::optional<Shift>& shift() const { return shift_; }
  const CodecConfig& codec() const { return codec_; }

  PixelImage apply(const PixelImage& clean) const;

  // Ground truth matched to apply(): the shifted original for double
  // recipes, the original itself for single ones.
  PixelImage reference(const PixelImage& clean) const;

  bool operator==(const DegradationRecipe&) const = default;

 private:
  DegradationRecipe(RecipeKind kind, QualityFactor qf1,
                    std::optional<QualityFactor> qf2,
                    std::optional<Shift> shift, const CodecConfig& codec)
      : kind_(kind), qf1_(qf1), qf2_(qf2), shift_(shift), codec_(codec) {}

  RecipeKind kind_;
  QualityFactor qf1_;
  std::optional<QualityFactor> qf2_;
  std::optional<Shift> shift_;
  CodecConfig codec_;
};

}  // namespace jfactor

#endif  // JFACTOR_DEGRADATION_HPP_
