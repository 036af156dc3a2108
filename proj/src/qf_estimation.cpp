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

#include "jfactor/qf_estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "json.hpp"

#include "jfactor/parallel.hpp"

namespace jfactor {
namespace {

constexpr double kSkipped = std::numeric_limits<double>::infinity();

std::vector<int> evaluated_qfs(const MseCurve& curve) {
  std::vector<int> qfs;
  for (int qf = 1; qf <= kCandidateCount; ++qf) {
    if (curve.evaluated(qf)) qfs.push_back(qf);
  }
  return qfs;
}

}  // namespace

bool MseCurve::evaluated(int qf) const { return std::isfinite(mse[qf - 1]); }

std::string_view to_string(RegimeGuess regime) {
  return regime == RegimeGuess::kSingleOrSimple ? "single_or_simple"
                                                : "complex_double";
}

MseCurve recompression_mse_curve(const PixelImage& image, Shift shift,
                                 int stride, CurveRegion region) {
  if (stride < 1) throw ValidationError("stride must be positive");
  const PixelImage z = to_luma(shift_crop(image, shift));
  const TransformedPlane plane(z);
  bool skip = region == CurveRegion::kUnclipped;
  if (skip && plane.counted_samples(true) == 0) skip = false;
  const double n = static_cast<double>(plane.counted_samples(skip));
  std::vector<int> qfs;
  std::vector<QuantTable> tables;
  for (int qf = 1; qf <= kCandidateCount; ++qf) {
    if ((qf - 1) % stride != 0 && qf != kCandidateCount) continue;
    qfs.push_back(qf);
    tables.push_back(
        quant_table_from_qf(QualityFactor(qf), ComponentKind::kLuma));
  }
  const std::vector<double> sse = plane.squared_errors(tables, skip);
  MseCurve curve;
  curve.shift = shift;
  curve.region = skip ? CurveRegion::kUnclipped : CurveRegion::kAllBlocks;
  curve.mse.fill(kSkipped);
  for (std::size_t k = 0; k < qfs.size(); ++k) {
    curve.mse[qfs[k] - 1] = sse[k] / n;
  }
  return curve;
}

std::optional<CurveMinimum> find_first_minimum(const MseCurve& curve) {
  const auto qfs = evaluated_qfs(curve);
  for (std::size_t k = 1; k + 1 < qfs.size(); ++k) {
    const double here = curve.at(qfs[k]);
    if (here < curve.at(qfs[k - 1]) && here <= curve.at(qfs[k + 1])) {
      return CurveMinimum{curve.shift, QualityFactor(qfs[k]), here,
                          MinimumKind::kFirstLocal};
    }
  }
  return std::nullopt;
}

CurveMinimum find_global_minimum(const MseCurve& curve) {
  int best = 0;
  for (int qf = 1; qf <= kCandidateCount; ++qf) {
    if (!curve.evaluated(qf)) continue;
    if (best == 0 || curve.at(qf) < curve.at(best)) best = qf;
  }
  if (best == 0) throw ValidationError("curve has no evaluated candidates");
  return CurveMinimum{curve.shift, QualityFactor(best), curve.at(best),
                      MinimumKind::kGlobal};
}

QualityFactor estimate_single_qf(const PixelImage& image,
                                 const EstimationOptions& options) {
  return find_global_minimum(
             recompression_mse_curve(image, Shift(0, 0), options.stride,
                                     options.region))
      .qf;
}

std::vector<MseCurve> shift_curves(const PixelImage& image,
                                   const EstimationOptions& options) {
  if (image.width() < 9 || image.height() < 9) {
    throw ValidationError("dominant-QF estimation needs at least 9x9 pixels");
  }
  std::vector<MseCurve> curves(64);
  parallel_for(
      curves.size(),
      [&](std::size_t k) {
        const Shift shift(static_cast<int>(k / 8), static_cast<int>(k % 8));
        curves[k] = recompression_mse_curve(image, shift, options.stride,
                                            options.region);
      },
      options.threads);
  return curves;
}

std::vector<CurveMinimum> find_local_minima(const MseCurve& curve) {
  const auto qfs = evaluated_qfs(curve);
  std::vector<CurveMinimum> minima;
  std::size_t k = 1;
  while (k + 1 < qfs.size()) {
    const double here = curve.at(qfs[k]);
    std::size_t end = k;
    while (end + 1 < qfs.size() && curve.at(qfs[end + 1]) == here) ++end;
    if (end + 1 < qfs.size() && here < curve.at(qfs[k - 1]) &&
        here < curve.at(qfs[end + 1])) {
      minima.push_back(CurveMinimum{curve.shift, QualityFactor(qfs[k]), here,
                                    MinimumKind::kFirstLocal});
    }
    k = end + 1;
  }
  return minima;
}

QfEstimate select_dominant_qf(std::vector<MseCurve> curves,
                              const EstimationOptions& options) {
  if (curves.empty()) throw ValidationError("no curves to select from");
  if (options.qf1_margin < 0) throw ValidationError("qf1 margin must be >= 0");
  constexpr double kFloor = 1e-3;
  QfEstimate est;
  est.threshold_used = options.threshold;

  std::optional<CurveMinimum> lowest;
  std::optional<CurveMinimum> global;
  std::vector<std::vector<CurveMinimum>> minima;
  for (const MseCurve& curve : curves) {
    ShiftDiagnostic diag{curve.shift, find_global_minimum(curve),
                         find_first_minimum(curve)};
    if (!global || diag.global.mse_value < global->mse_value) {
      global = diag.global;
    }
    minima.push_back(find_local_minima(curve));
    for (const CurveMinimum& m : minima.back()) {
      if (!lowest || m.mse_value < lowest->mse_value) lowest = m;
    }
    est.diagnostics.push_back(diag);
  }
  est.qf2_est = lowest ? lowest->qf : global->qf;

  std::vector<std::size_t> shifted;
  for (std::size_t k = 0; k < curves.size(); ++k) {
    if (!curves[k].shift.aligned()) shifted.push_back(k);
  }
  std::optional<int> best_qf;
  std::vector<double> values(shifted.size());
  for (int qf = 1; qf <= est.qf2_est.value() - options.qf1_margin; ++qf) {
    if (shifted.empty() || !curves[shifted[0]].evaluated(qf)) continue;
    std::size_t arg = shifted[0];
    for (std::size_t k = 0; k < shifted.size(); ++k) {
      values[k] = curves[shifted[k]].at(qf);
      if (values[k] < curves[arg].at(qf)) arg = shifted[k];
    }
    const double m = curves[arg].at(qf);
    if (m >= options.threshold) continue;
    const auto& dips = minima[arg];
    if (std::none_of(dips.begin(), dips.end(), [&](const CurveMinimum& d) {
          return d.qf.value() == qf;
        })) {
      continue;
    }
    const auto mid = values.begin() + static_cast<std::ptrdiff_t>(values.size() / 2);
    std::nth_element(values.begin(), mid, values.end());
    const double contrast = (*mid + kFloor) / (m + kFloor);
    if (contrast > est.qf1_contrast) {
      est.qf1_contrast = contrast;
      best_qf = qf;
    }
  }
  if (best_qf && est.qf1_contrast >= options.min_contrast) {
    est.qf1_est = QualityFactor(*best_qf);
    est.regime = RegimeGuess::kComplexDouble;
  }
  est.curves = std::move(curves);
  return est;
}

QfEstimate estimate_dominant_qf(const PixelImage& image,
                                const EstimationOptions& options) {
  return select_dominant_qf(shift_curves(image, options), options);
}

void write_curve_dump(std::ostream& out, const QfEstimate& estimate) {
  for (std::size_t k = 0; k < estimate.diagnostics.size(); ++k) {
    const ShiftDiagnostic& diag = estimate.diagnostics[k];
    nlohmann::json row;
    row["shift_i"] = diag.shift.rows();
    row["shift_j"] = diag.shift.cols();
    row["global_min_qf"] = diag.global.qf.value();
    row["first_min_qf"] =
        diag.first ? nlohmann::json(diag.first->qf.value()) : nlohmann::json();
    nlohmann::json values = nlohmann::json::array();
    if (k < estimate.curves.size()) {
      for (double v : estimate.curves[k].mse) {
        values.push_back(std::isfinite(v) ? nlohmann::json(v)
                                          : nlohmann::json());
      }
    }
    row["mse"] = std::move(values);
    out << row.dump() << '\n';
  }
}

}  // namespace jfactor
