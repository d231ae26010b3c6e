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

#include "spoofbench/scorer.h"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <unordered_map>
#include <unordered_set>

#include "spoofbench/error.h"

namespace spoofbench {

namespace {

struct ProcessOutput {
  int exit_status = 0;  // waitpid status
  std::string out;
  std::string err;
};

class Pipe {
 public:
  Pipe() {
    if (pipe2(fds_, O_CLOEXEC) != 0)
      throw DataError(std::string("pipe: ") + std::strerror(errno));
  }
  ~Pipe() {
    CloseRead();
    CloseWrite();
  }
  Pipe(const Pipe &) = delete;
  Pipe &operator=(const Pipe &) = delete;

  int read_end() const { return fds_[0]; }
  int write_end() const { return fds_[1]; }
  void CloseRead() { Close(fds_[0]); }
  void CloseWrite() { Close(fds_[1]); }

 private:
  static void Close(int &fd) {
    if (fd >= 0) ::close(fd);
    fd = -1;
  }
  int fds_[2] = {-1, -1};
};

std::string Tail(const std::string &s, std::size_t n = 2000) {
  return s.size() <= n ? s : "..." + s.substr(s.size() - n);
}

ProcessOutput RunShell(const std::string &command, const std::string &input,
                       double timeout_seconds) {
  // The child may exit before draining its stdin.
  static const bool sigpipe_ignored = [] {
    ::signal(SIGPIPE, SIG_IGN);
    return true;
  }();
  (void)sigpipe_ignored;

  Pipe in, out, err;
  pid_t pid = ::fork();
  if (pid < 0) throw DataError(std::string("fork: ") + std::strerror(errno));
  if (pid == 0) {
    ::setpgid(0, 0);
    ::dup2(in.read_end(), STDIN_FILENO);
    ::dup2(out.write_end(), STDOUT_FILENO);
    ::dup2(err.write_end(), STDERR_FILENO);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char *>(nullptr));
    _exit(127);
  }
  ::setpgid(pid, pid);
  in.CloseRead();
  out.CloseWrite();
  err.CloseWrite();
  ::fcntl(in.write_end(), F_SETFL, O_NONBLOCK);

  ProcessOutput result;
  std::size_t written = 0;
  if (input.empty()) in.CloseWrite();
  const auto deadline = std::chrono::steady_clock::now() +
                        std::chrono::duration<double>(timeout_seconds);
  bool out_open = true, err_open = true;
  char buf[65536];
  while (out_open || err_open) {
    auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (remaining.count() <= 0) {
      ::kill(-pid, SIGKILL);
      ::waitpid(pid, nullptr, 0);
      throw DataError("scorer timed out after " +
                      std::to_string(timeout_seconds) + " s: " + command);
    }
    pollfd fds[3];
    nfds_t n = 0;
    int out_idx = -1, err_idx = -1, in_idx = -1;
    if (out_open) { out_idx = n; fds[n++] = {out.read_end(), POLLIN, 0}; }
    if (err_open) { err_idx = n; fds[n++] = {err.read_end(), POLLIN, 0}; }
    if (in.write_end() >= 0) { in_idx = n; fds[n++] = {in.write_end(), POLLOUT, 0}; }
    int ready = ::poll(fds, n, static_cast<int>(std::min<long long>(
                                   remaining.count(), 1000)));
    if (ready < 0) {
      if (errno == EINTR) continue;
      throw DataError(std::string("poll: ") + std::strerror(errno));
    }
    if (in_idx >= 0 && fds[in_idx].revents) {
      ssize_t w = ::write(in.write_end(), input.data() + written,
                          input.size() - written);
      if (w > 0) written += static_cast<std::size_t>(w);
      if (w < 0 && errno != EAGAIN && errno != EINTR) written = input.size();
      if (written >= input.size()) in.CloseWrite();
    }
    auto drain = [&](int idx, int fd, std::string &sink, bool &open) {
      if (idx < 0 || !fds[idx].revents) return;
      ssize_t r = ::read(fd, buf, sizeof(buf));
      if (r > 0) sink.append(buf, static_cast<std::size_t>(r));
      else if (r == 0 || (errno != EAGAIN && errno != EINTR)) open = false;
    };
    drain(out_idx, out.read_end(), result.out, out_open);
    drain(err_idx, err.read_end(), result.err, err_open);
  }
  in.CloseWrite();
  // Output streams are closed; the process should be exiting.
  while (true) {
    pid_t r = ::waitpid(pid, &result.exit_status, WNOHANG);
    if (r == pid) break;
    if (r < 0 && errno != EINTR)
      throw DataError(std::string("waitpid: ") + std::strerror(errno));
    if (std::chrono::steady_clock::now() >= deadline) {
      ::kill(-pid, SIGKILL);
      ::waitpid(pid, nullptr, 0);
      throw DataError("scorer timed out after " +
                      std::to_string(timeout_seconds) + " s: " + command);
    }
    ::usleep(1000);
  }
  return result;
}

}  // namespace

std::vector<std::string> ReadAudioList(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open audio list " + path, path);
  std::vector<std::string> paths;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    auto last = line.find_last_not_of(" \t");
    paths.push_back(line.substr(first, last - first + 1));
  }
  return paths;
}

ScoreSet RunExternalScorer(const ScorerRequest &request) {
  if (request.command.empty()) throw ConfigError("scorer command is empty");
  if (!(request.timeout_seconds > 0))
    throw ConfigError("scorer timeout must be positive");

  std::unordered_map<std::string, std::string> id_of_path;
  std::unordered_set<std::string> ids;
  std::string input;
  for (const auto &p : request.audio_paths) {
    std::string id = TrialIdFromPath(p);
    if (!ids.insert(id).second)
      throw DataError("audio list contains two files with trial id '" + id + "'");
    id_of_path.emplace(p, std::move(id));
    input += p;
    input += '\n';
  }

  ProcessOutput proc =
      RunShell(request.command, input, request.timeout_seconds);
  if (!WIFEXITED(proc.exit_status) || WEXITSTATUS(proc.exit_status) != 0) {
    std::string how = WIFEXITED(proc.exit_status)
                          ? "exited with status " +
                                std::to_string(WEXITSTATUS(proc.exit_status))
                          : "killed by signal " +
                                std::to_string(WTERMSIG(proc.exit_status));
    throw DataError("scorer " + how + ": " + request.command +
                    "\nscorer stderr:\n" + Tail(proc.err));
  }

  std::unordered_map<std::string, double> by_path;
  std::size_t line_no = 0, pos = 0;
  const std::string &text = proc.out;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto tab = line.rfind('\t');
    if (tab == std::string::npos)
      throw DataError(AtLine("scorer output", line_no,
                             "expected 'path<TAB>score': " + line));
    std::string path = line.substr(0, tab);
    std::string_view token(line.data() + tab + 1, line.size() - tab - 1);
    double value = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size() ||
        !std::isfinite(value))
      throw DataError(AtLine("scorer output", line_no,
                             "invalid score '" + std::string(token) + "'"));
    if (!id_of_path.count(path))
      throw DataError(AtLine("scorer output", line_no,
                             "path not in the audio list: " + path));
    if (!by_path.emplace(path, value).second)
      throw DataError(AtLine("scorer output", line_no,
                             "duplicate output for " + path));
  }

  std::vector<ScoreSet::Entry> entries;
  std::vector<std::string> missing;
  for (const auto &p : request.audio_paths) {
    auto it = by_path.find(p);
    if (it == by_path.end()) {
      missing.push_back(p);
      continue;
    }
    entries.push_back({id_of_path.at(p), it->second});
  }
  if (!missing.empty()) {
    std::string msg = "scorer output is incomplete: " +
                      std::to_string(missing.size()) + " of " +
                      std::to_string(request.audio_paths.size()) +
                      " paths missing:";
    for (std::size_t i = 0; i < missing.size() && i < 10; ++i)
      msg += " " + missing[i];
    throw DataError(msg);
  }
  return ScoreSet(request.system_id, request.dataset_id, request.polarity,
                  std::move(entries));
}

}  // namespace spoofbench
