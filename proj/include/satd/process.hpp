#pragma once

// Minimal subprocess plumbing for driving the git executable.

#include <cerrno>
#include <cstring>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <fcntl.h>
#include <poll.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include "satd/common.hpp"

extern char** environ;

namespace satd::proc {

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

namespace detail {

struct Pipe {
  int fd[2] = {-1, -1};
  Pipe() {
    if (::pipe2(fd, O_CLOEXEC) != 0) throw Error(ErrorKind::Repository, std::string("pipe: ") + std::strerror(errno));
  }
  ~Pipe() { close_all(); }
  Pipe(const Pipe&) = delete;
  Pipe& operator=(const Pipe&) = delete;
  void close_read() { if (fd[0] >= 0) { ::close(fd[0]); fd[0] = -1; } }
  void close_write() { if (fd[1] >= 0) { ::close(fd[1]); fd[1] = -1; } }
  void close_all() { close_read(); close_write(); }
};

inline std::vector<char*> argv_of(std::vector<std::string>& args) {
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  argv.push_back(nullptr);
  return argv;
}

} // namespace detail

/// Spawned child with pipes on stdin and stdout; stderr is captured separately.
class Child {
public:
  Child(std::vector<std::string> args, const std::filesystem::path& cwd, bool want_stdin) {
    posix_spawn_file_actions_t fa;
    posix_spawn_file_actions_init(&fa);
    if (want_stdin) {
      posix_spawn_file_actions_adddup2(&fa, in_.fd[0], 0);
    } else {
      posix_spawn_file_actions_addopen(&fa, 0, "/dev/null", O_RDONLY, 0);
    }
    posix_spawn_file_actions_adddup2(&fa, out_.fd[1], 1);
    posix_spawn_file_actions_adddup2(&fa, err_.fd[1], 2);
    // git -C handles the working directory; cwd only seeds the first argument
    if (!cwd.empty()) {
      args.insert(args.begin() + 1, {"-C", cwd.string()});
    }
    auto argv = detail::argv_of(args);
    const int rc = posix_spawnp(&pid_, argv[0], &fa, nullptr, argv.data(), environ);
    posix_spawn_file_actions_destroy(&fa);
    if (rc != 0) throw Error(ErrorKind::Repository, "cannot spawn " + args[0] + ": " + std::strerror(rc));
    in_.close_read();
    out_.close_write();
    err_.close_write();
    if (!want_stdin) in_.close_write();
  }

  ~Child() {
    in_.close_write();
    out_.close_read();
    err_.close_read();
    if (pid_ > 0) {
      int status = 0;
      ::waitpid(pid_, &status, 0);
    }
  }

  Child(const Child&) = delete;
  Child& operator=(const Child&) = delete;

  int stdin_fd() const { return in_.fd[1]; }
  int stdout_fd() const { return out_.fd[0]; }
  int stderr_fd() const { return err_.fd[0]; }
  void close_stdin() { in_.close_write(); }

  /// Drain stdout and stderr until EOF, then reap.
  RunResult finish() {
    RunResult r;
    pollfd fds[2] = {{out_.fd[0], POLLIN, 0}, {err_.fd[0], POLLIN, 0}};
    std::string* sinks[2] = {&r.out, &r.err};
    int open = 2;
    char buf[65536];
    while (open > 0) {
      if (::poll(fds, 2, -1) < 0) {
        if (errno == EINTR) continue;
        break;
      }
      for (int k = 0; k < 2; ++k) {
        if (fds[k].fd < 0 || !(fds[k].revents & (POLLIN | POLLHUP | POLLERR))) continue;
        const ssize_t n = ::read(fds[k].fd, buf, sizeof buf);
        if (n > 0) {
          sinks[k]->append(buf, static_cast<std::size_t>(n));
        } else if (n == 0 || errno != EINTR) {
          fds[k].fd = -1;
          --open;
        }
      }
    }
    int status = 0;
    ::waitpid(pid_, &status, 0);
    pid_ = -1;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
  }

private:
  detail::Pipe in_, out_, err_;
  pid_t pid_ = -1;
};

/// Run `git -C repo args...` to completion.
inline RunResult git(const std::filesystem::path& repo, std::vector<std::string> args) {
  args.insert(args.begin(), "git");
  Child child(std::move(args), repo, false);
  return child.finish();
}

/// Long-lived `git cat-file --batch` reader. Output is flushed per object
/// without --buffer, so request/response alternation does not deadlock.
class BlobReader {
public:
  explicit BlobReader(const std::filesystem::path& repo)
      : child_({"git", "cat-file", "--batch"}, repo, true) {}

  /// Returns false when the object is missing.
  bool read(const std::string& object_id, std::string& content) {
    const std::string req = object_id + "\n";
    if (!write_all(req)) return false;
    std::string header;
    if (!read_line(header)) return false;
    if (header.ends_with(" missing") || header.ends_with(" ambiguous")) return false;
    const auto sp = header.rfind(' ');
    if (sp == std::string::npos) return false;
    const std::size_t size = std::stoull(header.substr(sp + 1));
    content.clear();
    if (!read_exact(size + 1, content)) return false; // body + LF
    content.pop_back();
    return true;
  }

private:
  bool write_all(std::string_view data) {
    while (!data.empty()) {
      const ssize_t n = ::write(child_.stdin_fd(), data.data(), data.size());
      if (n < 0) {
        if (errno == EINTR) continue;
        return false;
      }
      data.remove_prefix(static_cast<std::size_t>(n));
    }
    return true;
  }

  bool fill() {
    char tmp[65536];
    for (;;) {
      const ssize_t n = ::read(child_.stdout_fd(), tmp, sizeof tmp);
      if (n > 0) {
        buf_.append(tmp, static_cast<std::size_t>(n));
        return true;
      }
      if (n < 0 && errno == EINTR) continue;
      return false;
    }
  }

  bool read_line(std::string& line) {
    for (;;) {
      const auto nl = buf_.find('\n', pos_);
      if (nl != std::string::npos) {
        line.assign(buf_, pos_, nl - pos_);
        pos_ = nl + 1;
        compact();
        return true;
      }
      if (!fill()) return false;
    }
  }

  bool read_exact(std::size_t n, std::string& out) {
    while (buf_.size() - pos_ < n)
      if (!fill()) return false;
    out.assign(buf_, pos_, n);
    pos_ += n;
    compact();
    return true;
  }

  void compact() {
    if (pos_ > (1u << 20) || pos_ == buf_.size()) {
      buf_.erase(0, pos_);
      pos_ = 0;
    }
  }

  Child child_;
  std::string buf_;
  std::size_t pos_ = 0;
};

} // namespace satd::proc
