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

#include "spoofbench/augment.h"

#include <fftw3.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <random>

#include "json.hpp"
#include "spoofbench/error.h"
#include "spoofbench/parallel.h"
#include "spoofbench/protocol.h"

namespace spoofbench {

namespace fs = std::filesystem;

namespace {

// Direct convolution below this many taps.
constexpr std::size_t kDirectConvolutionTaps = 256;

std::mutex &FftwPlannerMutex() {
  static std::mutex m;
  return m;
}

template <typename T>
struct FftwDeleter {
  void operator()(T *p) const { fftw_free(p); }
};
template <typename T>
using FftwBuffer = std::unique_ptr<T[], FftwDeleter<T>>;

template <typename T>
FftwBuffer<T> FftwAlloc(std::size_t n) {
  auto *p = static_cast<T *>(fftw_malloc(sizeof(T) * n));
  if (!p) throw std::bad_alloc();
  return FftwBuffer<T>(p);
}

std::vector<double> ConvolveTruncated(const std::vector<double> &x,
                                      const std::vector<double> &h) {
  const std::size_t n = x.size();
  std::vector<double> y(n, 0.0);
  if (h.size() <= kDirectConvolutionTaps) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t kmax = std::min(h.size() - 1, i);
      double acc = 0.0;
      for (std::size_t k = 0; k <= kmax; ++k) acc += h[k] * x[i - k];
      y[i] = acc;
    }
    return y;
  }
  // Only outputs [0, n) are kept, and taps beyond n cannot reach them.
  const std::size_t taps = std::min(h.size(), n);
  std::size_t size = 1;
  while (size < n + taps - 1) size <<= 1;
  const std::size_t bins = size / 2 + 1;
  auto xa = FftwAlloc<double>(size), ha = FftwAlloc<double>(size);
  auto xf = FftwAlloc<fftw_complex>(bins), hf = FftwAlloc<fftw_complex>(bins);
  fftw_plan fx, fh, inv;
  {
    std::lock_guard<std::mutex> lock(FftwPlannerMutex());
    fx = fftw_plan_dft_r2c_1d(static_cast<int>(size), xa.get(), xf.get(), FFTW_ESTIMATE);
    fh = fftw_plan_dft_r2c_1d(static_cast<int>(size), ha.get(), hf.get(), FFTW_ESTIMATE);
    inv = fftw_plan_dft_c2r_1d(static_cast<int>(size), xf.get(), xa.get(), FFTW_ESTIMATE);
  }
  std::fill(xa.get(), xa.get() + size, 0.0);
  std::fill(ha.get(), ha.get() + size, 0.0);
  std::copy(x.begin(), x.end(), xa.get());
  std::copy(h.begin(), h.begin() + static_cast<std::ptrdiff_t>(taps), ha.get());
  fftw_execute(fx);
  fftw_execute(fh);
  for (std::size_t k = 0; k < bins; ++k) {
    const double re = xf[k][0] * hf[k][0] - xf[k][1] * hf[k][1];
    const double im = xf[k][0] * hf[k][1] + xf[k][1] * hf[k][0];
    xf[k][0] = re;
    xf[k][1] = im;
  }
  fftw_execute(inv);
  const double scale = 1.0 / static_cast<double>(size);
  for (std::size_t i = 0; i < n; ++i) y[i] = xa[i] * scale;
  {
    std::lock_guard<std::mutex> lock(FftwPlannerMutex());
    fftw_destroy_plan(fx);
    fftw_destroy_plan(fh);
    fftw_destroy_plan(inv);
  }
  return y;
}

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

double Uniform01(std::mt19937_64 &rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

bool IsWav(const fs::path &p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return ext == ".wav";
}

std::vector<fs::path> ListWavs(const fs::path &dir) {
  std::vector<fs::path> files;
  for (const auto &entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && IsWav(entry.path())) files.push_back(entry.path());
  std::sort(files.begin(), files.end(), [](const fs::path &a, const fs::path &b) {
    return a.filename().string() < b.filename().string();
  });
  return files;
}

// Loads each source file at most once per run.
class SourceCache {
 public:
  explicit SourceCache(std::vector<fs::path> paths) : paths_(std::move(paths)) {}

  std::size_t size() const { return paths_.size(); }
  const fs::path &path(std::size_t i) const { return paths_[i]; }

  std::shared_ptr<const AudioBuffer> Get(std::size_t i) {
    {
      std::lock_guard<std::mutex> lock(mu_);
      auto it = cache_.find(i);
      if (it != cache_.end()) return it->second;
    }
    auto audio = std::make_shared<const AudioBuffer>(ReadWav(paths_[i].string()));
    std::lock_guard<std::mutex> lock(mu_);
    return cache_.emplace(i, std::move(audio)).first->second;
  }

 private:
  std::vector<fs::path> paths_;
  std::mutex mu_;
  std::map<std::size_t, std::shared_ptr<const AudioBuffer>> cache_;
};

}  // namespace

const char *ToString(AugmentCategory category) {
  switch (category) {
    case AugmentCategory::kNoise: return "noise";
    case AugmentCategory::kMusic: return "music";
    case AugmentCategory::kSpeech: return "speech";
    case AugmentCategory::kReverb: return "reverb";
  }
  return "?";
}

const char *ToString(ClipPolicy policy) {
  return policy == ClipPolicy::kPeakNormalize ? "peak-normalize" : "hard-clip";
}

AugmentCategory ParseAugmentCategory(std::string_view text) {
  if (text == "noise") return AugmentCategory::kNoise;
  if (text == "music") return AugmentCategory::kMusic;
  if (text == "speech") return AugmentCategory::kSpeech;
  if (text == "reverb") return AugmentCategory::kReverb;
  throw ConfigError("unknown augmentation category '" + std::string(text) +
                    "' (expected noise, music, speech or reverb)");
}

ClipPolicy ParseClipPolicy(std::string_view text) {
  if (text == "peak-normalize") return ClipPolicy::kPeakNormalize;
  if (text == "hard-clip") return ClipPolicy::kHardClip;
  throw ConfigError("unknown clip policy '" + std::string(text) +
                    "' (expected peak-normalize or hard-clip)");
}

std::optional<SnrRange> DefaultSnrRange(AugmentCategory category) {
  switch (category) {
    case AugmentCategory::kNoise: return SnrRange{0.0, 15.0};
    case AugmentCategory::kSpeech: return SnrRange{13.0, 20.0};
    case AugmentCategory::kMusic: return SnrRange{5.0, 15.0};
    case AugmentCategory::kReverb: return std::nullopt;
  }
  return std::nullopt;
}

void AugmentSpec::Validate() const {
  if (source_dir.empty()) throw ConfigError("augmentation needs a source directory");
  if (category == AugmentCategory::kReverb) {
    if (snr_range) throw ConfigError("an SNR range does not apply to reverb");
    return;
  }
  if (snr_range) {
    if (!std::isfinite(snr_range->low_db) || !std::isfinite(snr_range->high_db))
      throw ConfigError("SNR bounds must be finite");
    if (snr_range->low_db > snr_range->high_db)
      throw ConfigError("SNR range is inverted: low " +
                        std::to_string(snr_range->low_db) + " > high " +
                        std::to_string(snr_range->high_db));
  }
}

std::optional<SnrRange> AugmentSpec::EffectiveSnrRange() const {
  if (category == AugmentCategory::kReverb) return std::nullopt;
  return snr_range ? snr_range : DefaultSnrRange(category);
}

std::vector<double> FitLength(const std::vector<double> &interferer,
                              std::size_t length, std::size_t offset) {
  if (interferer.empty()) throw DataError("interferer has no samples");
  std::vector<double> out(length);
  const std::size_t n = interferer.size();
  std::size_t pos = offset % n;
  for (std::size_t i = 0; i < length; ++i) {
    out[i] = interferer[pos];
    if (++pos == n) pos = 0;
  }
  return out;
}

bool ApplyClipPolicy(std::vector<double> &samples, ClipPolicy policy) {
  double peak = 0.0;
  for (double s : samples) peak = std::max(peak, std::abs(s));
  if (peak <= 1.0) return false;
  if (policy == ClipPolicy::kPeakNormalize) {
    for (double &s : samples) s /= peak;
  } else {
    for (double &s : samples) s = std::clamp(s, -1.0, 1.0);
  }
  return true;
}

MixResult MixAtSnr(const AudioBuffer &clean, const AudioBuffer &interferer,
                   double snr_db, ClipPolicy clip_policy, std::size_t offset) {
  if (clean.sample_rate != kSampleRate || interferer.sample_rate != kSampleRate)
    throw DataError("mixing requires 16000 Hz audio");
  if (!std::isfinite(snr_db)) throw DataError("SNR must be finite");
  const double clean_rms = Rms(clean.samples);
  if (!(clean_rms > 0)) throw DataError("clean signal is silent");
  std::vector<double> noise = FitLength(interferer.samples, clean.size(), offset);
  const double noise_rms = Rms(noise);
  if (!(noise_rms > 0)) throw DataError("interferer segment is silent");

  MixResult r;
  r.gain = clean_rms / (noise_rms * std::pow(10.0, snr_db / 20.0));
  for (double &s : noise) s *= r.gain;
  r.realized_snr_db = 20.0 * std::log10(clean_rms / Rms(noise));
  r.audio.samples.resize(clean.size());
  for (std::size_t i = 0; i < clean.size(); ++i)
    r.audio.samples[i] = clean.samples[i] + noise[i];
  r.clipped = ApplyClipPolicy(r.audio.samples, clip_policy);
  return r;
}

AudioBuffer Reverberate(const AudioBuffer &clean, const AudioBuffer &rir) {
  if (clean.sample_rate != kSampleRate || rir.sample_rate != kSampleRate)
    throw DataError("reverberation requires 16000 Hz audio");
  const double clean_rms = Rms(clean.samples);
  if (!(Rms(rir.samples) > 0)) throw DataError("room impulse response is silent");
  AudioBuffer out;
  out.samples = ConvolveTruncated(clean.samples, rir.samples);
  const double wet_rms = Rms(out.samples);
  if (clean_rms > 0) {
    if (!(wet_rms > 0))
      throw DataError("reverberated signal is silent within the clean length");
    const double scale = clean_rms / wet_rms;
    for (double &s : out.samples) s *= scale;
  }
  return out;
}

std::uint64_t PerFileSeed(std::uint64_t run_seed, std::string_view trial_id) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char c : trial_id) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return SplitMix64(SplitMix64(run_seed) ^ h);
}

std::string AugmentRecordJson(const AugmentRecord &r) {
  nlohmann::ordered_json j;
  j["manifest_version"] = kAugmentManifestVersion;
  j["input"] = r.input;
  j["output"] = r.output;
  j["category"] = ToString(r.category);
  j["status"] = r.ok() ? "ok" : "error";
  j["source"] = r.source;
  j["snr_db"] = r.snr_db ? nlohmann::ordered_json(*r.snr_db) : nullptr;
  j["realized_snr_db"] =
      r.realized_snr_db ? nlohmann::ordered_json(*r.realized_snr_db) : nullptr;
  j["rir_id"] = r.rir_id ? nlohmann::ordered_json(*r.rir_id) : nullptr;
  j["offset"] = r.offset;
  j["seed"] = r.seed;
  j["clipped"] = r.clipped;
  if (!r.ok()) j["error"] = r.error;
  return j.dump();
}

AugmentSummary AugmentCorpus(const std::string &in_dir, const std::string &out_dir,
                             const AugmentSpec &spec, unsigned jobs) {
  spec.Validate();
  std::error_code ec;
  if (!fs::is_directory(in_dir, ec))
    throw ConfigError("input directory does not exist: " + in_dir);
  if (!fs::is_directory(spec.source_dir, ec))
    throw ConfigError("source directory does not exist: " + spec.source_dir);
  if (fs::exists(out_dir, ec) && fs::equivalent(in_dir, out_dir, ec))
    throw ConfigError("output directory must differ from the input directory");
  auto inputs = ListWavs(in_dir);
  if (inputs.empty()) throw ConfigError("no .wav files in " + in_dir);
  SourceCache sources(ListWavs(spec.source_dir));
  if (sources.size() == 0)
    throw ConfigError("source directory has no .wav files: " + spec.source_dir);
  fs::create_directories(out_dir, ec);
  if (ec) throw ConfigError("cannot create " + out_dir + ": " + ec.message());

  const auto range = spec.EffectiveSnrRange();
  AugmentSummary summary;
  summary.records.resize(inputs.size());
  ParallelFor(inputs.size(), jobs, [&](std::size_t i) {
    AugmentRecord &rec = summary.records[i];
    const fs::path &in_path = inputs[i];
    rec.input = in_path.filename().string();
    rec.output = rec.input;
    rec.category = spec.category;
    rec.seed = PerFileSeed(spec.seed, TrialIdFromPath(rec.input));
    try {
      std::mt19937_64 rng(rec.seed);
      const std::size_t src_index = static_cast<std::size_t>(rng() % sources.size());
      rec.source = sources.path(src_index).filename().string();
      AudioBuffer clean = ReadWav(in_path.string());
      auto source = sources.Get(src_index);
      AudioBuffer out;
      if (range) {
        const std::size_t n_src = source->size();
        const std::size_t n = clean.size();
        const std::size_t span = n_src > n ? n_src - n + 1 : n_src;
        rec.offset = static_cast<std::size_t>(rng() % span);
        rec.snr_db = range->low_db + (range->high_db - range->low_db) * Uniform01(rng);
        MixResult mix = MixAtSnr(clean, *source, *rec.snr_db, spec.clip_policy,
                                 rec.offset);
        rec.realized_snr_db = mix.realized_snr_db;
        rec.clipped = mix.clipped;
        out = std::move(mix.audio);
      } else {
        rec.rir_id = TrialIdFromPath(rec.source);
        out = Reverberate(clean, *source);
        rec.clipped = ApplyClipPolicy(out.samples, spec.clip_policy);
      }
      WriteWav((fs::path(out_dir) / rec.output).string(), out);
    } catch (const std::exception &e) {
      rec.error = e.what();
    }
  });

  summary.manifest_path = (fs::path(out_dir) / kAugmentManifestName).string();
  std::string manifest;
  for (const auto &rec : summary.records) {
    manifest += AugmentRecordJson(rec);
    manifest += '\n';
    ++(rec.ok() ? summary.processed : summary.failures);
  }
  std::ofstream out(summary.manifest_path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + summary.manifest_path);
  out << manifest;
  return summary;
}

}  // namespace spoofbench
