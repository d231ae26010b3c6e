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

#include "spoofbench/manifest.h"

#include <openssl/sha.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "spoofbench/error.h"

namespace spoofbench {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string Resolve(const std::string &base_dir, const std::string &path) {
  fs::path p(path);
  if (p.is_absolute() || base_dir.empty()) return p.lexically_normal().string();
  return (fs::path(base_dir) / p).lexically_normal().string();
}

const json &Require(const json &obj, const char *key, const std::string &ctx) {
  auto it = obj.find(key);
  if (it == obj.end())
    throw ConfigError("manifest: " + ctx + " is missing '" + key + "'");
  return *it;
}

std::string RequireString(const json &obj, const char *key,
                          const std::string &ctx) {
  const json &v = Require(obj, key, ctx);
  if (!v.is_string() || v.get<std::string>().empty())
    throw ConfigError("manifest: " + ctx + "." + key +
                      " must be a non-empty string");
  return v.get<std::string>();
}

}  // namespace

const DatasetEntry *ArenaManifest::FindDataset(const std::string &id) const {
  for (const auto &d : datasets)
    if (d.id == id) return &d;
  return nullptr;
}

std::string Sha256Hex(const std::string &bytes) {
  unsigned char digest[SHA256_DIGEST_LENGTH];
  SHA256(reinterpret_cast<const unsigned char *>(bytes.data()), bytes.size(),
         digest);
  static const char *kHex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * SHA256_DIGEST_LENGTH);
  for (unsigned char b : digest) {
    out += kHex[b >> 4];
    out += kHex[b & 15];
  }
  return out;
}

ArenaManifest ParseManifest(const std::string &text,
                            const std::string &base_dir) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error &e) {
    throw ConfigError(std::string("manifest: invalid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("manifest: top level must be an object");

  const json &version = Require(root, "manifest_version", "manifest");
  if (!version.is_number_integer() || version.get<int>() != kManifestVersion)
    throw ConfigError("manifest: unsupported manifest_version " +
                      version.dump() + " (this tool reads version " +
                      std::to_string(kManifestVersion) + ")");

  ArenaManifest m;
  m.digest = Sha256Hex(text);

  if (auto it = root.find("options"); it != root.end()) {
    if (!it->is_object()) throw ConfigError("manifest: options must be an object");
    const json &o = *it;
    if (o.contains("default_polarity"))
      m.options.default_polarity =
          ParsePolarity(RequireString(o, "default_polarity", "options"));
    if (o.contains("output_dir"))
      m.options.output_dir =
          Resolve(base_dir, RequireString(o, "output_dir", "options"));
    if (o.contains("join_mode"))
      m.options.join_mode = ParseJoinMode(RequireString(o, "join_mode", "options"));
    if (o.contains("allow_gaps")) {
      if (!o["allow_gaps"].is_boolean())
        throw ConfigError("manifest: options.allow_gaps must be a boolean");
      m.options.allow_gaps = o["allow_gaps"].get<bool>();
    }
  }

  const json &datasets = Require(root, "datasets", "manifest");
  if (!datasets.is_array() || datasets.empty())
    throw ConfigError("manifest: datasets must be a non-empty array");
  std::set<std::string> dataset_ids;
  for (std::size_t i = 0; i < datasets.size(); ++i) {
    std::string ctx = "datasets[" + std::to_string(i) + "]";
    const json &d = datasets[i];
    if (!d.is_object()) throw ConfigError("manifest: " + ctx + " must be an object");
    DatasetEntry entry;
    entry.id = RequireString(d, "id", ctx);
    entry.protocol_path = Resolve(base_dir, RequireString(d, "protocol", ctx));
    if (d.contains("format"))
      entry.format = ParseProtocolFormat(RequireString(d, "format", ctx));
    if (!dataset_ids.insert(entry.id).second)
      throw ConfigError("manifest: duplicate dataset id '" + entry.id + "'");
    m.datasets.push_back(std::move(entry));
  }

  const json &systems = Require(root, "systems", "manifest");
  if (!systems.is_array() || systems.empty())
    throw ConfigError("manifest: systems must be a non-empty array");
  std::set<std::string> system_ids;
  for (std::size_t i = 0; i < systems.size(); ++i) {
    std::string ctx = "systems[" + std::to_string(i) + "]";
    const json &s = systems[i];
    if (!s.is_object()) throw ConfigError("manifest: " + ctx + " must be an object");
    SystemEntry entry;
    entry.id = RequireString(s, "id", ctx);
    if (!system_ids.insert(entry.id).second)
      throw ConfigError("manifest: duplicate system id '" + entry.id + "'");
    if (auto p = s.find("params_m"); p != s.end() && !p->is_null()) {
      if (!p->is_number() || p->get<double>() < 0)
        throw ConfigError("manifest: " + ctx + ".params_m must be a non-negative number");
      entry.param_count_millions = p->get<double>();
    }
    if (s.contains("category")) entry.category = RequireString(s, "category", ctx);
    if (s.contains("polarity")) {
      entry.polarity = ParsePolarity(RequireString(s, "polarity", ctx));
    } else if (m.options.default_polarity) {
      entry.polarity = *m.options.default_polarity;
    } else {
      throw ConfigError("manifest: system '" + entry.id +
                        "' has no polarity and options.default_polarity is unset");
    }
    const json &scores = Require(s, "scores", ctx);
    if (!scores.is_object())
      throw ConfigError("manifest: " + ctx + ".scores must be an object");
    for (auto it = scores.begin(); it != scores.end(); ++it) {
      if (!dataset_ids.count(it.key()))
        throw ConfigError("manifest: system '" + entry.id +
                          "' references undeclared dataset '" + it.key() + "'");
      if (!it->is_string() || it->get<std::string>().empty())
        throw ConfigError("manifest: " + ctx + ".scores." + it.key() +
                          " must be a non-empty string");
      entry.score_paths[it.key()] = Resolve(base_dir, it->get<std::string>());
    }
    m.systems.push_back(std::move(entry));
  }
  return m;
}

ArenaManifest LoadManifest(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open manifest " + path, path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return ParseManifest(buf.str(), fs::path(path).parent_path().string());
}

}  // namespace spoofbench
