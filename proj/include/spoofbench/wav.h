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

// RIFF/WAVE reading and writing for 16 kHz mono audio.

#ifndef SPOOFBENCH_WAV_H_
#define SPOOFBENCH_WAV_H_

#include <string>
#include <string_view>
#include <vector>

namespace spoofbench {

inline constexpr int kSampleRate = 16000;

/// Mono samples nominally in [-1, 1].
struct AudioBuffer {
  std::vector<double> samples;
  int sample_rate = kSampleRate;

  std::size_t size() const { return samples.size(); }
};

/// Accepts PCM 16-bit and IEEE float 32-bit, mono, 16000 Hz. PCM samples
/// are scaled by 1/32768. Throws DataError otherwise; no resampling or
/// downmixing is attempted.
AudioBuffer ReadWav(const std::string &path);
AudioBuffer DecodeWav(std::string_view bytes, const std::string &source_name);

/// PCM 16-bit, no dither. Samples are rounded to nearest and saturated.
std::string EncodeWavPcm16(const AudioBuffer &audio);
void WriteWav(const std::string &path, const AudioBuffer &audio);

/// Root mean square; 0 for an empty buffer.
double Rms(const std::vector<double> &samples);

}  // namespace spoofbench

#endif  // SPOOFBENCH_WAV_H_
