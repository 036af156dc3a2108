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

#ifndef JFACTOR_DATASET_HPP_
#define JFACTOR_DATASET_HPP_

// Deterministic synthesis of clean/degraded training and evaluation pairs.
//
// Entry k draws everything from its own generator, seeded with
// stable_hash(config.seed, k), so entries can be produced in any order and
// on any number of threads. The generator is std::mt19937_64 with the
// integer mapping in Rng::uniform_int, both fully specified, so manifests
// replay identically across platforms. Per-entry draw order:
//   1. kind (mixed mode only): uniform_int(0, 1), 1 meaning double
//   2. qf1: uniform_int(lo, hi)
//   3. double only: qf2: uniform_int(lo, hi), then shift rows and cols
//      as uniform_int(0, 7) each unless the shift is fixed
//   4. patch corner: row uniform_int(0, H - size), col uniform_int(0, W - size)
// Entry k reads source k mod N (sources sorted by path).

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "jfactor/codec.hpp"
#include "jfactor/degradation.hpp"
#include "jfactor/image.hpp"

namespace jfactor {

inline constexpr int kManifestVersion = 1;
inline constexpr const char* kRngName = "mt19937_64";
inline constexpr const char* kSeedDerivation = "splitmix64(seed + golden * (index + 1))";

// SplitMix64 finalizer over seed + 0x9E3779B97F4A7C15 * (index + 1).
std::uint64_t stable_hash(std::uint64_t seed, std::uint64_t index);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform over [lo, hi] by rejection sampling on raw 64-bit draws.
  int uniform_int(int lo, int hi);

 private:
  std::mt19937_64 engine_;
};

enum class SynthMode { kSingle, kDouble, kMixed };

struct ShiftPolicy {
  std::optional<Shift> fixed;  // empty: uniform over [0, 7]^2

  static ShiftPolicy random_0_7() { return {}; }
  static ShiftPolicy fixed_at(Shift s) { return {s}; }
};

struct SynthConfig {
  std::filesystem::path source_dir;
  int patch_size = 128;  // 0 keeps whole images
  int qf_lo = 10;
  int qf_hi = 95;
  SynthMode mode = SynthMode::kSingle;
  ShiftPolicy shift_policy;
  std::uint64_t seed = 0;
  int count = 0;
  CodecConfig codec;

  // Throws ValidationError on count < 1, bad QF range or negative size.
  void validate() const;
};

struct PatchOrigin {
  int row = 0;
  int col = 0;
  bool operator==(const PatchOrigin&) const = default;
};

struct Patch {
  PatchOrigin origin;
  PixelImage image;
};

// `count` crops of patch_size x patch_size at uniformly drawn corners (each
// draws row then col). Throws ValidationError if the image is too small.
std::vector<Patch> extract_patches(const PixelImage& image, int patch_size,
                                   Rng& rng, int count = 1);

struct EntryPlan {
  std::uint64_t seed = 0;
  DegradationRecipe recipe = DegradationRecipe::single(QualityFactor(100));
  PatchOrigin origin;
  int width = 0;
  int height = 0;
};

// Recipe and patch placement of entry `index` on a source of the given size.
EntryPlan plan_entry(const SynthConfig& config, int index, int source_width,
                     int source_height);

struct ManifestEntry {
  int index = 0;
  std::string clean_path;     // relative to the manifest directory
  std::string degraded_path;  // relative to the manifest directory
  std::string source_path;    // relative to the manifest directory
  PatchOrigin origin;
  int patch_width = 0;
  int patch_height = 0;
  DegradationRecipe recipe = DegradationRecipe::single(QualityFactor(100));
  std::uint64_t seed = 0;
  std::string degraded_hash;  // content_hash of the degraded image, hex
};

struct SkippedSource {
  std::string path;
  std::string reason;
};

struct Manifest {
  int manifest_version = kManifestVersion;
  std::string toolkit_version;
  std::string rng = kRngName;
  SynthConfig config;
  std::vector<SkippedSource> skipped;
  std::vector<ManifestEntry> entries;
};

inline constexpr const char* kManifestFile = "manifest.jsonl";

// Writes clean/NNNNNN.png, degraded/NNNNNN.png and manifest.jsonl under
// out_dir. Unreadable or too-small sources are recorded as skipped; an
// empty (or entirely skipped) source directory is an IoError.
Manifest synthesize_dataset(const SynthConfig& config,
                            const std::filesystem::path& out_dir,
                            int threads = 0);

// Line-delimited JSON: one header object, then one object per entry.
void write_manifest(const Manifest& manifest,
                    const std::filesystem::path& path);
Manifest read_manifest(const std::filesystem::path& path);

// Rebuilds an entry's degraded image from its source and recipe.
PixelImage replay(const ManifestEntry& entry,
                  const std::filesystem::path& manifest_dir);

struct ReplayReport {
  int checked = 0;
  int matched = 0;
  std::vector<int> mismatched;  // entry indices
};

// Replays every entry and compares against both the recorded hash and the
// stored degraded file.
ReplayReport verify_manifest(const std::filesystem::path& manifest_path,
                             int threads = 0);

}  // namespace jfactor

#endif  // JFACTOR_DATASET_HPP_
