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

#include "spoofbench/store.h"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "spoofbench/error.h"

namespace spoofbench {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class FileLock {
 public:
  explicit FileLock(const std::string &path) {
    fd_ = ::open(path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
    if (fd_ < 0)
      throw DataError("cannot open lock file " + path + ": " + std::strerror(errno),
                      path);
    while (::flock(fd_, LOCK_EX) != 0) {
      if (errno != EINTR) {
        ::close(fd_);
        throw DataError("cannot lock " + path + ": " + std::strerror(errno), path);
      }
    }
  }
  ~FileLock() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
  FileLock(const FileLock &) = delete;
  FileLock &operator=(const FileLock &) = delete;

 private:
  int fd_ = -1;
};

std::string ReadAll(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return {};
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

StoreListing ParseStore(const std::string &text) {
  StoreListing listing;
  std::size_t pos = 0, line_no = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    ++line_no;
    std::string_view line(text.data() + pos, end - pos);
    if (!line.empty() && line.find_first_not_of(" \t\r") != std::string_view::npos) {
      try {
        listing.records.push_back(json::parse(line).get<RunRecord>());
      } catch (const std::exception &e) {
        listing.corrupt.push_back({pos, line_no, e.what()});
      }
    }
    pos = end + 1;
  }
  return listing;
}

}  // namespace

void StoreAppend(const std::string &store_path, const RunRecord &record) {
  if (record.run_id.empty()) throw DataError("run record has no run_id");
  FileLock lock(store_path + ".lock");

  std::string existing = ReadAll(store_path);
  for (const auto &r : ParseStore(existing).records)
    if (r.run_id == record.run_id)
      throw DataError("run_id " + record.run_id + " already in " + store_path,
                      store_path);
  if (!existing.empty() && existing.back() != '\n') existing += '\n';
  existing += json(record).dump();
  existing += '\n';

  const std::string tmp = store_path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + tmp, tmp);
    out << existing;
    out.flush();
    if (!out) throw DataError("short write to " + tmp, tmp);
  }
  int fd = ::open(tmp.c_str(), O_RDONLY | O_CLOEXEC);
  if (fd >= 0) {
    ::fsync(fd);
    ::close(fd);
  }
  std::error_code ec;
  fs::rename(tmp, store_path, ec);
  if (ec) throw DataError("cannot replace " + store_path + ": " + ec.message(),
                          store_path);
}

StoreListing StoreList(const std::string &store_path) {
  std::error_code ec;
  if (!fs::exists(store_path, ec)) return {};
  std::ifstream probe(store_path, std::ios::binary);
  if (!probe) throw DataError("cannot read " + store_path, store_path);
  return ParseStore(ReadAll(store_path));
}

}  // namespace spoofbench
