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

#include "spoofbench/wav.h"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "spoofbench/error.h"

namespace spoofbench {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t U16(std::string_view b, std::size_t at) {
  return static_cast<std::uint16_t>(static_cast<unsigned char>(b[at]) |
                                    (static_cast<unsigned char>(b[at + 1]) << 8));
}

std::uint32_t U32(std::string_view b, std::size_t at) {
  return static_cast<std::uint32_t>(U16(b, at)) |
         (static_cast<std::uint32_t>(U16(b, at + 2)) << 16);
}

void PutU16(std::string &out, std::uint16_t v) {
  out += static_cast<char>(v & 0xFF);
  out += static_cast<char>(v >> 8);
}

void PutU32(std::string &out, std::uint32_t v) {
  PutU16(out, static_cast<std::uint16_t>(v & 0xFFFF));
  PutU16(out, static_cast<std::uint16_t>(v >> 16));
}

}  // namespace

double Rms(const std::vector<double> &samples) {
  if (samples.empty()) return 0.0;
  double sum = 0.0;
  for (double s : samples) sum += s * s;
  return std::sqrt(sum / static_cast<double>(samples.size()));
}

AudioBuffer DecodeWav(std::string_view b, const std::string &name) {
  auto fail = [&name](const std::string &msg) -> DataError {
    return DataError(name + ": " + msg, name);
  };
  if (b.size() < 12 || b.substr(0, 4) != "RIFF" || b.substr(8, 4) != "WAVE")
    throw fail(b.size() < 12 ? "truncated header" : "not a RIFF/WAVE file");

  bool have_fmt = false;
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  std::string_view data;
  bool have_data = false;
  std::size_t pos = 12;
  while (pos + 8 <= b.size()) {
    std::string_view id = b.substr(pos, 4);
    std::uint32_t size = U32(b, pos + 4);
    std::size_t body = pos + 8;
    if (size > b.size() - body) throw fail("truncated '" + std::string(id) + "' chunk");
    if (id == "fmt ") {
      if (size < 16) throw fail("truncated fmt chunk");
      format = U16(b, body);
      channels = U16(b, body + 2);
      rate = U32(b, body + 4);
      bits = U16(b, body + 14);
      if (format == kFormatExtensible) {
        if (size < 40) throw fail("truncated extensible fmt chunk");
        format = U16(b, body + 24);  // first two bytes of the subformat GUID
      }
      have_fmt = true;
    } else if (id == "data") {
      data = b.substr(body, size);
      have_data = true;
      break;
    }
    pos = body + size + (size & 1);
  }
  if (!have_fmt) throw fail("missing fmt chunk (truncated header?)");
  if (!have_data) throw fail("missing data chunk (truncated file?)");

  if (!(format == kFormatPcm && bits == 16) && !(format == kFormatFloat && bits == 32))
    throw fail("unsupported encoding (format tag " + std::to_string(format) +
               ", " + std::to_string(bits) +
               " bits); only PCM 16-bit and IEEE float 32-bit are accepted");
  if (channels != 1)
    throw fail("expected mono audio, found " + std::to_string(channels) +
               " channels");
  if (rate != static_cast<std::uint32_t>(kSampleRate))
    throw fail("unsupported sample rate " + std::to_string(rate) + " Hz (" +
               std::to_string(kSampleRate) + " Hz required)");

  const std::size_t width = bits / 8;
  if (data.size() % width != 0) throw fail("truncated sample data");
  AudioBuffer audio;
  audio.samples.resize(data.size() / width);
  if (audio.samples.empty()) throw fail("no samples");
  for (std::size_t i = 0; i < audio.samples.size(); ++i) {
    if (format == kFormatPcm) {
      auto v = static_cast<std::int16_t>(U16(data, i * 2));
      audio.samples[i] = static_cast<double>(v) / 32768.0;
    } else {
      std::uint32_t raw = U32(data, i * 4);
      float f;
      std::memcpy(&f, &raw, sizeof(f));
      if (!std::isfinite(f) || std::abs(f) > 1.0f)
        throw fail("float sample " + std::to_string(i) + " outside [-1, 1]");
      audio.samples[i] = f;
    }
  }
  return audio;
}

AudioBuffer ReadWav(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path, path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return DecodeWav(buf.str(), path);
}

std::string EncodeWavPcm16(const AudioBuffer &audio) {
  const std::uint32_t data_bytes =
      static_cast<std::uint32_t>(audio.samples.size() * 2);
  std::string out;
  out.reserve(44 + data_bytes);
  out += "RIFF";
  PutU32(out, 36 + data_bytes);
  out += "WAVEfmt ";
  PutU32(out, 16);
  PutU16(out, kFormatPcm);
  PutU16(out, 1);
  PutU32(out, static_cast<std::uint32_t>(audio.sample_rate));
  PutU32(out, static_cast<std::uint32_t>(audio.sample_rate) * 2);
  PutU16(out, 2);
  PutU16(out, 16);
  out += "data";
  PutU32(out, data_bytes);
  for (double s : audio.samples) {
    double v = std::nearbyint(s * 32768.0);
    if (!(v >= -32768.0)) v = -32768.0;  // also catches NaN
    if (v > 32767.0) v = 32767.0;
    PutU16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(v)));
  }
  return out;
}

void WriteWav(const std::string &path, const AudioBuffer &audio) {
  const std::string bytes = EncodeWavPcm16(audio);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path, path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("short write to " + path, path);
}

}  // namespace spoofbench
