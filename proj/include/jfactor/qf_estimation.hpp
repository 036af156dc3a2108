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

#ifndef JFACTOR_QF_ESTIMATION_HPP_
#define JFACTOR_QF_ESTIMATION_HPP_

// Blind quality-factor estimation from decoded pixels.
//
// The recompression MSE as a function of the candidate QF dips at the QF an
// image was compressed with.
// For non-aligned double JPEG images the curves are computed for every grid
// shift (i, j) in [0, 7]^2. The lowest dip tracks the last compression. The
// first compression shows up as a QF where the curve of one non-aligned
// shift falls well below the other shifts.

#include <array>
#include <optional>
#include <ostream>
#include <span>
#include <string_view>
#include <vector>

#include "jfactor/codec.hpp"
#include "jfactor/degradation.hpp"
#include "jfactor/image.hpp"

namespace jfactor {

inline constexpr int kCandidateCount = 100;

// Blocks whose samples enter a curve. kUnclipped leaves out blocks holding
// a 0 or 255 sample, falling back to every block when all are clipped.
enum class CurveRegion { kAllBlocks, kUnclipped };

// Recompression MSE indexed by candidate QF (entry qf - 1). Candidates that
// were skipped by a stride hold +infinity.
struct MseCurve {
  Shift shift{0, 0};
  CurveRegion region = CurveRegion::kAllBlocks;  // region actually used
  std::array<double, kCandidateCount> mse{};

  double at(int qf) const { return mse[qf - 1]; }
  bool evaluated(int qf) const;
};

enum class MinimumKind { kFirstLocal, kGlobal };

struct CurveMinimum {
  Shift shift;
  QualityFactor qf;
  double mse_value;
  MinimumKind kind;
};

enum class RegimeGuess { kSingleOrSimple, kComplexDouble };

std::string_view to_string(RegimeGuess regime);

struct ShiftDiagnostic {
  Shift shift;
  CurveMinimum global;
  std::optional<CurveMinimum> first;
};

struct QfEstimate {
  std::optional<QualityFactor> qf1_est;
  QualityFactor qf2_est{1};
  RegimeGuess regime = RegimeGuess::kSingleOrSimple;
  double threshold_used = 0.0;
  double qf1_contrast = 0.0;  // best cross-shift contrast seen (0: none)
  std::vector<ShiftDiagnostic> diagnostics;  // one per shift, row-major
  std::vector<MseCurve> curves;              // same order as diagnostics
};

struct EstimationOptions {
  double threshold = 30.0;  // on the squared 0-255 scale
  int stride = 1;           // candidate QFs 1, 1 + stride, ..., plus 100
  int threads = 0;          // 0: thread_budget()
  CurveRegion region = CurveRegion::kUnclipped;
  int qf1_margin = 10;        // qf1 candidates stay at or below qf2 - margin
  double min_contrast = 1.5;  // median over shifts / best shift, at qf1
};

// mse[qf] = MSE(z, jpeg_roundtrip(z, qf)) with z the luma of
// shift_crop(image, shift), over the blocks selected by `region`. The
// forward DCT of z is computed once.
MseCurve recompression_mse_curve(const PixelImage& image, Shift shift,
                                 int stride = 1,
                                 CurveRegion region = CurveRegion::kAllBlocks);

// First interior candidate (ascending) that is strictly below its left
// neighbour and not above its right neighbour.
std::optional<CurveMinimum> find_first_minimum(const MseCurve& curve);

// Smallest value; ties go to the smaller QF.
CurveMinimum find_global_minimum(const MseCurve& curve);

// Runs of equal values strictly below both neighbouring candidates,
// reported at the run's smallest QF. Runs touching either end are left out.
std::vector<CurveMinimum> find_local_minima(const MseCurve& curve);

QualityFactor estimate_single_qf(const PixelImage& image,
                                 const EstimationOptions& options = {});

// All 64 per-shift curves, row-major over (rows, cols).
std::vector<MseCurve> shift_curves(const PixelImage& image,
                                   const EstimationOptions& options = {});

// Dominant-QF decision from precomputed curves (any shift order; ties break
// toward the earlier curve).
//
// qf2 is the lowest local minimum over all curves, or the global minimum
// when no curve has one.
//
// For each candidate q <= qf2 - qf1_margin, let m be the smallest MSE among
// non-aligned shifts and c the median of those shifts over m. q qualifies
// when m < threshold and q is a local minimum of the curve attaining m. qf1
// is the qualifying q of largest c, reported once c >= min_contrast.
QfEstimate select_dominant_qf(std::vector<MseCurve> curves,
                              const EstimationOptions& options = {});

QfEstimate estimate_dominant_qf(const PixelImage& image,
                                const EstimationOptions& options = {});

// One JSON object per line and shift: shift_i, shift_j, global_min_qf,
// first_min_qf (null when absent), mse (100 values, null where skipped).
void write_curve_dump(std::ostream& out, const QfEstimate& estimate);

}  // namespace jfactor

#endif  // JFACTOR_QF_ESTIMATION_HPP_
