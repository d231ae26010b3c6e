// Copyright 2026 The spoofbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Additive (noise/music/speech) and reverberation perturbations of 16 kHz
// corpora. Every random choice derives from a per-file seed so a run is a
// pure function of its inputs and spec.

#ifndef SPOOFBENCH_AUGMENT_H_
#define SPOOFBENCH_AUGMENT_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spoofbench/wav.h"

namespace spoofbench {

enum class AugmentCategory { kNoise, kMusic, kSpeech, kReverb };
enum class ClipPolicy { kPeakNormalize, kHardClip };

const char *ToString(AugmentCategory category);
const char *ToString(ClipPolicy policy);
AugmentCategory ParseAugmentCategory(std::string_view text);
ClipPolicy ParseClipPolicy(std::string_view text);

struct SnrRange {
  double low_db = 0.0;
  double high_db = 0.0;
};

/// noise [0, 15], speech [13, 20], music [5, 15] dB. Reverb has none.
std::optional<SnrRange> DefaultSnrRange(AugmentCategory category);

struct AugmentSpec {
  AugmentCategory category = AugmentCategory::kNoise;
  std::optional<SnrRange> snr_range;  // unset: category default
  std::string source_dir;             // interferer or RIR files (*.wav)
  std::uint64_t seed = 0;
  ClipPolicy clip_policy = ClipPolicy::kPeakNormalize;

  /// Throws ConfigError on an inverted or non-finite range, a range given
  /// for reverb, or a missing source_dir.
  void Validate() const;
  std::optional<SnrRange> EffectiveSnrRange() const;
};

/// Interferer samples for positions offset, offset+1, ... wrapping around,
/// `length` long. A longer interferer is cropped, a shorter one looped.
std::vector<double> FitLength(const std::vector<double> &interferer,
                              std::size_t length, std::size_t offset);

/// Returns true if any sample was changed. Peak-normalize scales the whole
/// buffer so the peak is 1; hard-clip saturates at +-1.
bool ApplyClipPolicy(std::vector<double> &samples, ClipPolicy policy);

struct MixResult {
  AudioBuffer audio;
  double gain = 0.0;            // applied to the fitted interferer
  double realized_snr_db = 0.0; // measured before clipping
  bool clipped = false;
};

/// clean + g * fit(interferer), with g chosen so that
/// rms(clean) / rms(g * fit(interferer)) = 10^(snr_db / 20). Throws
/// DataError if either signal is silent.
MixResult MixAtSnr(const AudioBuffer &clean, const AudioBuffer &interferer,
                   double snr_db, ClipPolicy clip_policy, std::size_t offset = 0);

/// Linear convolution with the RIR, truncated to the clean length and
/// rescaled to the clean RMS. No clipping is applied.
AudioBuffer Reverberate(const AudioBuffer &clean, const AudioBuffer &rir);

/// Stable 64-bit seed for one file of a run.
std::uint64_t PerFileSeed(std::uint64_t run_seed, std::string_view trial_id);

/// One line of the augmentation manifest. File names are relative to the
/// input, output and source directories respectively.
struct AugmentRecord {
  std::string input;
  std::string output;
  AugmentCategory category = AugmentCategory::kNoise;
  std::string source;
  std::optional<double> snr_db;           // sampled target (additive only)
  std::optional<double> realized_snr_db;  // measured, pre-clipping
  std::optional<std::string> rir_id;      // reverb only
  std::size_t offset = 0;
  std::uint64_t seed = 0;
  bool clipped = false;
  std::string error;  // non-empty for a failed file

  bool ok() const { return error.empty(); }
};

struct AugmentSummary {
  std::vector<AugmentRecord> records;  // sorted input order
  std::size_t processed = 0;
  std::size_t failures = 0;
  std::string manifest_path;
};

inline constexpr const char *kAugmentManifestName = "augment_manifest.jsonl";
inline constexpr int kAugmentManifestVersion = 1;

/// Perturbs every *.wav in in_dir into out_dir (same file names) and writes
/// out_dir/augment_manifest.jsonl. Configuration problems (empty source
/// directory, out_dir == in_dir, ...) throw ConfigError before any file is
/// touched; per-file failures are collected in the summary.
AugmentSummary AugmentCorpus(const std::string &in_dir, const std::string &out_dir,
                             const AugmentSpec &spec, unsigned jobs);

std::string AugmentRecordJson(const AugmentRecord &record);

}  // namespace spoofbench

#endif  // SPOOFBENCH_AUGMENT_H_
