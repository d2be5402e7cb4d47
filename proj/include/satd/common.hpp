#pragma once

#include <cstdint>
#include <cstdio>
#include <mutex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace satd {

/// Failure categories. Each maps onto one CLI exit code.
enum class ErrorKind {
  Config,     // 2
  Repository, // 3
  Corpus,     // 4
  Bundle,     // 5
  Data,       // precondition violations inside library calls
};

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

inline int exit_code_for(ErrorKind kind) {
  switch (kind) {
  case ErrorKind::Config: return 2;
  case ErrorKind::Repository: return 3;
  case ErrorKind::Corpus: return 4;
  case ErrorKind::Bundle: return 5;
  case ErrorKind::Data: return 1;
  }
  return 1;
}

struct Diagnostic {
  std::string stage;
  std::string code;
  std::string message;
};

/// Collects non-fatal findings. Thread-safe append; read after the stage ends.
class Diagnostics {
public:
  void add(std::string stage, std::string code, std::string message) {
    std::lock_guard lock(mu_);
    items_.push_back({std::move(stage), std::move(code), std::move(message)});
  }

  const std::vector<Diagnostic>& items() const { return items_; }

  std::size_t count(std::string_view code) const {
    std::size_t n = 0;
    for (const auto& d : items_)
      if (d.code == code) ++n;
    return n;
  }

  void clear() { items_.clear(); }

private:
  std::mutex mu_;
  std::vector<Diagnostic> items_;
};

/// 64-bit FNV-1a. Used for content fingerprints and text keys, not security.
inline std::uint64_t fnv1a64(std::string_view data,
                             std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

inline std::string text_hash(std::string_view text) { return hex64(fnv1a64(text)); }

/// Replace invalid UTF-8 sequences with U+FFFD.
inline std::string sanitize_utf8(std::string_view in) {
  std::string out;
  out.reserve(in.size());
  const auto* s = reinterpret_cast<const unsigned char*>(in.data());
  const std::size_t n = in.size();
  std::size_t i = 0;
  while (i < n) {
    unsigned char c = s[i];
    if (c < 0x80) {
      out.push_back(static_cast<char>(c));
      ++i;
      continue;
    }
    std::size_t len = 0;
    std::uint32_t cp = 0;
    if ((c & 0xE0) == 0xC0) { len = 2; cp = c & 0x1F; }
    else if ((c & 0xF0) == 0xE0) { len = 3; cp = c & 0x0F; }
    else if ((c & 0xF8) == 0xF0) { len = 4; cp = c & 0x07; }
    bool ok = len > 0 && i + len <= n;
    for (std::size_t k = 1; ok && k < len; ++k) {
      if ((s[i + k] & 0xC0) != 0x80) ok = false;
      else cp = (cp << 6) | (s[i + k] & 0x3F);
    }
    if (ok) {
      // reject overlongs, surrogates, out-of-range
      if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) ||
          (len == 4 && (cp < 0x10000 || cp > 0x10FFFF)) ||
          (cp >= 0xD800 && cp <= 0xDFFF))
        ok = false;
    }
    if (ok) {
      out.append(in.substr(i, len));
      i += len;
    } else {
      out.append("\xEF\xBF\xBD");
      ++i;
    }
  }
  return out;
}

/// Fixed-format rendering for CSV/text output so files are byte-stable.
inline std::string fmt_real(double v, int digits = 6) {
  if (v != v) return "nan";
  if (v == 1.0 / 0.0) return "inf";
  if (v == -1.0 / 0.0) return "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  std::string s = buf;
  if (s.find('.') != std::string::npos) {
    while (!s.empty() && s.back() == '0') s.pop_back();
    if (!s.empty() && s.back() == '.') s.pop_back();
  }
  if (s == "-0") s = "0";
  return s;
}

inline constexpr double kSecondsPerDay = 86400.0;

} // namespace satd
