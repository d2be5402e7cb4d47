#pragma once

// Comment lexing for C, C++, Java and Python sources.
//
// The scanner partitions a file into contiguous code / string / comment
// segments. Comments are then grouped into records: consecutive line-style
// comments separated only by whitespace containing a single newline merge
// into one record; block comments always stand alone.

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "satd/common.hpp"

namespace satd::comments {

enum class Language { C, Cpp, Java, Python, Other };

inline const char* to_string(Language l) {
  switch (l) {
  case Language::C: return "C";
  case Language::Cpp: return "Cpp";
  case Language::Java: return "Java";
  case Language::Python: return "Python";
  case Language::Other: return "Other";
  }
  return "Other";
}

inline std::optional<Language> parse_language(std::string_view s) {
  if (s == "C") return Language::C;
  if (s == "Cpp") return Language::Cpp;
  if (s == "Java") return Language::Java;
  if (s == "Python") return Language::Python;
  if (s == "Other") return Language::Other;
  return std::nullopt;
}

enum class CommentStyle { Line, Block, Hash };

inline const char* to_string(CommentStyle s) {
  switch (s) {
  case CommentStyle::Line: return "Line";
  case CommentStyle::Block: return "Block";
  case CommentStyle::Hash: return "Hash";
  }
  return "Line";
}

inline std::optional<CommentStyle> parse_style(std::string_view s) {
  if (s == "Line") return CommentStyle::Line;
  if (s == "Block") return CommentStyle::Block;
  if (s == "Hash") return CommentStyle::Hash;
  return std::nullopt;
}

struct Segment {
  enum class Kind { Code, String, Comment };
  Kind kind = Kind::Code;
  std::size_t begin = 0;
  std::size_t end = 0; // exclusive
  CommentStyle style = CommentStyle::Line;
};

/// One extracted comment block.
struct Comment {
  int start_line = 0; // 1-based inclusive
  int end_line = 0;
  CommentStyle style = CommentStyle::Line;
  std::string raw_text;
  std::string normalized_text;
  std::optional<std::string> enclosing_hint;
};

namespace detail {

inline bool is_ident(char c) {
  const auto u = static_cast<unsigned char>(c);
  return std::isalnum(u) || c == '_' || u >= 0x80;
}

inline bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v'; }

class SegmentBuilder {
public:
  explicit SegmentBuilder(std::size_t size) : size_(size) {}

  void emit(Segment::Kind kind, std::size_t begin, std::size_t end, CommentStyle style = CommentStyle::Line) {
    if (begin > cursor_) push({Segment::Kind::Code, cursor_, begin});
    push({kind, begin, end, style});
    cursor_ = end;
  }

  std::vector<Segment> finish() {
    if (cursor_ < size_) push({Segment::Kind::Code, cursor_, size_});
    return std::move(out_);
  }

private:
  void push(Segment s) {
    if (s.begin == s.end) return;
    if (s.kind != Segment::Kind::Comment && !out_.empty() && out_.back().kind == s.kind && out_.back().end == s.begin) {
      out_.back().end = s.end;
      return;
    }
    out_.push_back(s);
  }

  std::size_t size_;
  std::size_t cursor_ = 0;
  std::vector<Segment> out_;
};

// ---- C family -------------------------------------------------------------

/// End of a quoted literal starting at `open` (the quote), honoring backslash
/// escapes. Stops after the closing quote, or at an unescaped newline.
inline std::size_t scan_quoted(std::string_view s, std::size_t open, char quote) {
  std::size_t i = open + 1;
  while (i < s.size()) {
    const char c = s[i];
    if (c == '\\') { i += 2; continue; }
    if (c == quote) return i + 1;
    if (c == '\n') return i;
    ++i;
  }
  return s.size();
}

inline bool raw_string_prefix(std::string_view s, std::size_t quote, std::size_t& prefix_begin) {
  // R, LR, uR, UR, u8R immediately before the quote, at a token start
  if (quote == 0 || s[quote - 1] != 'R') return false;
  std::size_t b = quote - 1;
  if (b >= 2 && s[b - 2] == 'u' && s[b - 1] == '8') b -= 2;
  else if (b >= 1 && (s[b - 1] == 'L' || s[b - 1] == 'u' || s[b - 1] == 'U')) b -= 1;
  if (b > 0 && is_ident(s[b - 1])) return false;
  prefix_begin = b;
  return true;
}

inline std::vector<Segment> scan_c_family(std::string_view s, Language lang, Diagnostics* diag) {
  SegmentBuilder out(s.size());
  const bool cpp = lang == Language::Cpp;
  const bool java = lang == Language::Java;
  const bool has_preprocessor = lang == Language::C || lang == Language::Cpp;
  bool line_start = true; // only whitespace seen since the last newline
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    const char n = i + 1 < s.size() ? s[i + 1] : '\0';
    if (c == '/' && n == '/') {
      std::size_t j = i + 2;
      while (j < s.size()) {
        if (s[j] == '\n') {
          std::size_t k = j;
          if (k > 0 && s[k - 1] == '\r') --k;
          if (has_preprocessor && k > 0 && s[k - 1] == '\\') { ++j; continue; }
          break;
        }
        ++j;
      }
      std::size_t e = j;
      if (e > i && e <= s.size() && e > 0 && s[e - 1] == '\r') --e;
      out.emit(Segment::Kind::Comment, i, e, CommentStyle::Line);
      i = j;
      line_start = false;
      continue;
    }
    if (c == '/' && n == '*') {
      const std::size_t close = s.find("*/", i + 2);
      std::size_t e;
      if (close == std::string_view::npos) {
        e = s.size();
        if (diag) diag->add("extract", "unterminated_block_comment", "block comment runs to end of file");
      } else {
        e = close + 2;
      }
      out.emit(Segment::Kind::Comment, i, e, CommentStyle::Block);
      i = e;
      line_start = false;
      continue;
    }
    if (c == '"') {
      std::size_t prefix_begin = i;
      if (cpp && raw_string_prefix(s, i, prefix_begin)) {
        const std::size_t paren = s.find('(', i + 1);
        const std::size_t nl = s.find('\n', i + 1);
        if (paren != std::string_view::npos && paren - i - 1 <= 16 && (nl == std::string_view::npos || paren < nl)) {
          const std::string term = ")" + std::string(s.substr(i + 1, paren - i - 1)) + "\"";
          const std::size_t close = s.find(term, paren + 1);
          const std::size_t e = close == std::string_view::npos ? s.size() : close + term.size();
          out.emit(Segment::Kind::String, i, e);
          i = e;
          line_start = false;
          continue;
        }
      }
      if (java && n == '"' && i + 2 < s.size() && s[i + 2] == '"') {
        std::size_t j = i + 3;
        std::size_t e = s.size();
        while (j < s.size()) {
          if (s[j] == '\\') { j += 2; continue; }
          if (s.compare(j, 3, "\"\"\"") == 0) { e = j + 3; break; }
          ++j;
        }
        out.emit(Segment::Kind::String, i, e);
        i = e;
        line_start = false;
        continue;
      }
      const std::size_t e = scan_quoted(s, i, '"');
      out.emit(Segment::Kind::String, i, e);
      i = e;
      line_start = false;
      continue;
    }
    if (c == '\'') {
      const std::size_t e = scan_quoted(s, i, '\'');
      out.emit(Segment::Kind::String, i, e);
      i = e;
      line_start = false;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && std::isdigit(static_cast<unsigned char>(n)))) {
      if (i == 0 || !is_ident(s[i - 1])) {
        // pp-number; C++14 digit separators keep apostrophes inside the number
        std::size_t j = i + 1;
        while (j < s.size()) {
          const char d = s[j];
          if (is_ident(d) || d == '.') { ++j; continue; }
          if (cpp && d == '\'' && j + 1 < s.size() && is_ident(s[j + 1])) { j += 2; continue; }
          if ((d == '+' || d == '-') && (s[j - 1] == 'e' || s[j - 1] == 'E' || s[j - 1] == 'p' || s[j - 1] == 'P')) { ++j; continue; }
          break;
        }
        i = j;
        line_start = false;
        continue;
      }
    }
    if (is_ident(c)) {
      while (i < s.size() && is_ident(s[i])) ++i;
      line_start = false;
      continue;
    }
    if (has_preprocessor && c == '#' && line_start) {
      // #include <path> : the header name may contain // or /*
      std::size_t j = i + 1;
      while (j < s.size() && is_space(s[j])) ++j;
      if (s.compare(j, 7, "include") == 0) {
        j += 7;
        while (j < s.size() && is_space(s[j])) ++j;
        if (j < s.size() && s[j] == '<') {
          const std::size_t close = s.find_first_of(">\n", j);
          i = (close == std::string_view::npos) ? s.size() : (s[close] == '>' ? close + 1 : close);
          line_start = false;
          continue;
        }
      }
      ++i;
      line_start = false;
      continue;
    }
    if (c == '\n') line_start = true;
    else if (!is_space(c)) line_start = false;
    ++i;
  }
  return out.finish();
}

// ---- Python ---------------------------------------------------------------

inline bool python_string_prefix(std::string_view ident, bool& raw, bool& fmt) {
  if (ident.size() > 2) return false;
  raw = fmt = false;
  bool bytes = false, unicode = false;
  for (char ch : ident) {
    switch (std::tolower(static_cast<unsigned char>(ch))) {
    case 'r': if (raw) return false; raw = true; break;
    case 'f': if (fmt) return false; fmt = true; break;
    case 'b': if (bytes) return false; bytes = true; break;
    case 'u': if (unicode) return false; unicode = true; break;
    default: return false;
    }
  }
  if (unicode && ident.size() != 1) return false;
  if (bytes && fmt) return false;
  return true;
}

inline std::size_t scan_python_string(std::string_view s, std::size_t open, bool fmt);

/// Python expression inside an f-string replacement field. Returns the index of the
/// closing '}' (or s.size()).
inline std::size_t scan_fstring_field(std::string_view s, std::size_t i, std::size_t stop) {
  int depth = 0;
  bool spec = false;
  while (i < stop) {
    const char c = s[i];
    if (spec) {
      if (c == '{') { i = scan_fstring_field(s, i + 1, stop); if (i < stop) ++i; continue; }
      if (c == '}') return i;
      ++i;
      continue;
    }
    if (c == '\'' || c == '"') { i = scan_python_string(s, i, false); continue; }
    if (is_ident(c)) {
      std::size_t j = i;
      while (j < stop && is_ident(s[j])) ++j;
      bool raw = false, fmt = false;
      if (j < stop && (s[j] == '\'' || s[j] == '"') && python_string_prefix(s.substr(i, j - i), raw, fmt)) {
        i = scan_python_string(s, j, fmt);
        continue;
      }
      i = j;
      continue;
    }
    if (c == '(' || c == '[' || c == '{') ++depth;
    else if (c == ')' || c == ']') --depth;
    else if (c == '}') {
      if (depth == 0) return i;
      --depth;
    } else if (c == ':' && depth == 0) {
      spec = true;
    }
    ++i;
  }
  return stop;
}

/// Scan a Python string whose opening quote sits at `open`. Returns end (exclusive).
inline std::size_t scan_python_string(std::string_view s, std::size_t open, bool fmt) {
  const char q = s[open];
  const bool triple = open + 2 < s.size() && s[open + 1] == q && s[open + 2] == q;
  std::size_t i = open + (triple ? 3 : 1);
  while (i < s.size()) {
    const char c = s[i];
    if (c == '\\') { i += 2; continue; }
    if (fmt && c == '{') {
      if (i + 1 < s.size() && s[i + 1] == '{') { i += 2; continue; }
      i = scan_fstring_field(s, i + 1, s.size());
      if (i < s.size()) ++i;
      continue;
    }
    if (c == q) {
      if (!triple) return i + 1;
      if (i + 2 < s.size() && s[i + 1] == q && s[i + 2] == q) return i + 3;
    }
    if (c == '\n' && !triple) return i;
    ++i;
  }
  return s.size();
}

inline std::vector<Segment> scan_python(std::string_view s) {
  SegmentBuilder out(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (c == '#') {
      std::size_t e = s.find('\n', i);
      if (e == std::string_view::npos) e = s.size();
      if (e > i && s[e - 1] == '\r') --e;
      out.emit(Segment::Kind::Comment, i, e, CommentStyle::Hash);
      i = e;
      continue;
    }
    if (c == '\'' || c == '"') {
      const std::size_t e = scan_python_string(s, i, false);
      out.emit(Segment::Kind::String, i, e);
      i = e;
      continue;
    }
    if (is_ident(c)) {
      std::size_t j = i;
      while (j < s.size() && is_ident(s[j])) ++j;
      bool raw = false, fmt = false;
      if (j < s.size() && (s[j] == '\'' || s[j] == '"') && python_string_prefix(s.substr(i, j - i), raw, fmt)) {
        const std::size_t e = scan_python_string(s, j, fmt);
        out.emit(Segment::Kind::String, i, e);
        i = e;
        continue;
      }
      i = j;
      continue;
    }
    ++i;
  }
  return out.finish();
}

inline std::vector<std::size_t> line_starts(std::string_view s) {
  std::vector<std::size_t> starts{0};
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s[i] == '\n') starts.push_back(i + 1);
  return starts;
}

inline int line_of(const std::vector<std::size_t>& starts, std::size_t offset) {
  return static_cast<int>(std::upper_bound(starts.begin(), starts.end(), offset) - starts.begin());
}

} // namespace detail

/// Partition content into contiguous segments covering every byte.
inline std::vector<Segment> scan(std::string_view content, Language language, Diagnostics* diag = nullptr) {
  switch (language) {
  case Language::C:
  case Language::Cpp:
  case Language::Java: return detail::scan_c_family(content, language, diag);
  case Language::Python: return detail::scan_python(content);
  case Language::Other: break;
  }
  detail::SegmentBuilder b(content.size());
  return b.finish();
}

/// (is_comment, text) spans whose concatenation is the original content.
inline std::vector<std::pair<bool, std::string_view>> split_spans(std::string_view content, Language language) {
  std::vector<std::pair<bool, std::string_view>> out;
  for (const auto& seg : scan(content, language)) {
    const bool is_comment = seg.kind == Segment::Kind::Comment;
    auto text = content.substr(seg.begin, seg.end - seg.begin);
    if (!out.empty() && !out.back().first && !is_comment) {
      out.back().second = content.substr(out.back().second.data() - content.data(),
                                         out.back().second.size() + text.size());
    } else {
      out.emplace_back(is_comment, text);
    }
  }
  return out;
}

/// Strip comment markers and gutters, collapse whitespace, trim. Case is preserved.
inline std::string normalize_comment(std::string_view raw, CommentStyle style) {
  std::string body(raw);
  if (style == CommentStyle::Block) {
    std::string_view v = body;
    std::size_t b = 0;
    while (b < v.size() && detail::is_space(v[b])) ++b;
    std::size_t e = v.size();
    while (e > b && (detail::is_space(v[e - 1]) || v[e - 1] == '\n')) --e;
    const bool opened = v.compare(b, 2, "/*") == 0;
    if (opened) b += 2;
    // "/*/" must not count as closed
    if (e >= b + 2 && v.compare(e - 2, 2, "*/") == 0) e -= 2;
    if (opened)
      while (b < e && (v[b] == '*' || v[b] == '!')) ++b;
    while (e > b && v[e - 1] == '*') --e;
    body = std::string(v.substr(b, e - b));
  }
  std::string joined;
  std::size_t pos = 0;
  while (pos <= body.size()) {
    std::size_t nl = body.find('\n', pos);
    if (nl == std::string::npos) nl = body.size();
    std::string_view line(body.data() + pos, nl - pos);
    std::size_t k = 0;
    while (k < line.size() && detail::is_space(line[k])) ++k;
    switch (style) {
    case CommentStyle::Line:
      while (k < line.size() && line[k] == '/') ++k;
      break;
    case CommentStyle::Hash:
      while (k < line.size() && line[k] == '#') ++k;
      break;
    case CommentStyle::Block:
      while (k < line.size() && line[k] == '*') ++k;
      break;
    }
    joined.append(line.substr(k));
    joined.push_back(' ');
    pos = nl + 1;
  }
  std::string out;
  bool pending_space = false;
  for (char c : joined) {
    if (detail::is_space(c) || c == '\n') {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return sanitize_utf8(out);
}

// ---- enclosing scope ------------------------------------------------------

namespace detail {

inline bool is_control_keyword(std::string_view w) {
  static constexpr std::string_view kw[] = {"if", "for", "while", "switch", "catch", "synchronized", "do",
                                            "else", "try", "return", "sizeof", "alignof", "decltype", "new",
                                            "foreach", "static_assert", "defined", "__attribute__", "using"};
  return std::find(std::begin(kw), std::end(kw), w) != std::end(kw);
}

inline bool is_type_keyword(std::string_view w) {
  return w == "class" || w == "struct" || w == "union" || w == "interface" || w == "enum" || w == "record";
}

struct Tok {
  std::string text;
  bool ident = false;
};

inline std::vector<Tok> tokenize_tail(std::string_view tail) {
  std::vector<Tok> toks;
  std::size_t i = 0;
  while (i < tail.size()) {
    const char c = tail[i];
    if (is_ident(c)) {
      std::size_t j = i;
      while (j < tail.size() && is_ident(tail[j])) ++j;
      toks.push_back({std::string(tail.substr(i, j - i)), !std::isdigit(static_cast<unsigned char>(c))});
      i = j;
    } else if (is_space(c) || c == '\n') {
      ++i;
    } else {
      toks.push_back({std::string(1, c), false});
      ++i;
    }
  }
  return toks;
}

/// Name the scope opened by '{' given the code since the previous ; { or }.
inline std::string scope_name(std::string_view tail) {
  auto toks = tokenize_tail(tail);
  for (std::size_t i = 0; i < toks.size(); ++i) {
    if (!toks[i].ident || !is_type_keyword(toks[i].text)) continue;
    std::size_t j = i + 1;
    while (j < toks.size() && toks[j].ident && (is_type_keyword(toks[j].text) || toks[j].text == "final")) ++j;
    if (j < toks.size() && toks[j].ident) {
      const std::string& name = toks[j].text;
      const std::string next = j + 1 < toks.size() ? toks[j + 1].text : "";
      if (next.empty() || next == ":" || next == "<" || next == "final" || next == "extends" ||
          next == "implements" || next == "permits" || next == "(" /* record */)
        return name;
    }
  }
  for (std::size_t i = 0; i < toks.size(); ++i) {
    if (toks[i].text == "=") return {};
    if (toks[i].text != "(") continue;
    if (i == 0 || !toks[i - 1].ident) return {};
    const std::string& name = toks[i - 1].text;
    if (is_control_keyword(name)) return {};
    if (i >= 2 && toks[i - 2].text == "new") return {};
    if (name == "namespace" || name == "extern") return {};
    return name;
  }
  return {};
}

inline std::vector<std::optional<std::string>> c_family_scopes(std::string_view s, const std::vector<Segment>& segs,
                                                               const std::vector<std::size_t>& queries) {
  std::vector<std::optional<std::string>> out(queries.size());
  std::vector<std::string> stack;
  std::string tail;
  std::size_t q = 0;
  auto answer = [&] {
    for (auto it = stack.rbegin(); it != stack.rend(); ++it)
      if (!it->empty()) return std::optional<std::string>(*it);
    return std::optional<std::string>();
  };
  for (const auto& seg : segs) {
    while (q < queries.size() && queries[q] < seg.begin) out[q++] = answer();
    if (seg.kind == Segment::Kind::String) {
      tail += " \"\" ";
      continue;
    }
    if (seg.kind == Segment::Kind::Comment) {
      tail.push_back(' ');
      continue;
    }
    for (std::size_t i = seg.begin; i < seg.end; ++i) {
      while (q < queries.size() && queries[q] <= i) out[q++] = answer();
      const char c = s[i];
      if (c == '{') {
        stack.push_back(scope_name(tail));
        tail.clear();
      } else if (c == '}') {
        if (!stack.empty()) stack.pop_back();
        tail.clear();
      } else if (c == ';') {
        tail.clear();
      } else {
        tail.push_back(c);
      }
    }
  }
  while (q < queries.size()) out[q++] = answer();
  return out;
}

inline std::size_t indent_width(std::string_view line) {
  std::size_t w = 0;
  for (char c : line) {
    if (c == ' ') ++w;
    else if (c == '\t') w = (w / 8 + 1) * 8;
    else if (c == '\f') w = 0;
    else break;
  }
  return w;
}

inline std::vector<std::optional<std::string>> python_scopes(std::string_view s, const std::vector<Segment>& segs,
                                                             const std::vector<std::size_t>& queries) {
  // Per physical line: does it start inside a string, the bracket depth, and
  // whether the previous line ended in a backslash continuation.
  auto starts = line_starts(s);
  std::vector<Segment::Kind> line_head(starts.size(), Segment::Kind::Code);
  std::vector<int> depth_at_line(starts.size(), 0);
  std::vector<bool> continued(starts.size(), false);
  {
    std::size_t si = 0;
    int depth = 0;
    std::size_t li = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
      while (si < segs.size() && segs[si].end <= i) ++si;
      if (li < starts.size() && starts[li] == i) {
        depth_at_line[li] = depth;
        const bool inside = si < segs.size() && segs[si].begin < i;
        line_head[li] = inside ? segs[si].kind : Segment::Kind::Code;
        if (li > 0) {
          std::size_t k = i >= 1 ? i - 1 : 0; // the '\n'
          while (k > 0 && (s[k - 1] == '\r')) --k;
          continued[li] = k > 0 && s[k - 1] == '\\' && line_head[li - 1] != Segment::Kind::String;
        }
        ++li;
      }
      if (i == s.size()) break;
      if (si < segs.size() && segs[si].kind == Segment::Kind::Code) {
        const char c = s[i];
        if (c == '(' || c == '[' || c == '{') ++depth;
        else if ((c == ')' || c == ']' || c == '}') && depth > 0) --depth;
      }
    }
  }
  struct Frame { std::size_t indent; std::string name; };
  std::vector<Frame> stack;
  std::vector<std::optional<std::string>> out(queries.size());
  std::size_t q = 0;
  auto answer_for = [&](std::size_t col, bool own_line) {
    for (auto it = stack.rbegin(); it != stack.rend(); ++it)
      if (!own_line || it->indent < col) return std::optional<std::string>(it->name);
    return std::optional<std::string>();
  };
  for (std::size_t li = 0; li < starts.size(); ++li) {
    const std::size_t b = starts[li];
    const std::size_t e = li + 1 < starts.size() ? starts[li + 1] : s.size();
    std::string_view line = s.substr(b, e - b);
    std::size_t first = 0;
    while (first < line.size() && (line[first] == ' ' || line[first] == '\t' || line[first] == '\f')) ++first;
    const bool blank = first >= line.size() || line[first] == '\n' || line[first] == '\r';
    const bool logical_start = line_head[li] != Segment::Kind::String && depth_at_line[li] == 0 && !continued[li];
    const bool comment_only = !blank && line[first] == '#';
    if (logical_start && !blank && !comment_only) {
      const std::size_t ind = indent_width(line);
      while (!stack.empty() && stack.back().indent >= ind) stack.pop_back();
      std::string_view rest = line.substr(first);
      if (rest.starts_with("async ")) {
        rest.remove_prefix(6);
        while (!rest.empty() && rest.front() == ' ') rest.remove_prefix(1);
      }
      for (std::string_view kw : {std::string_view("def "), std::string_view("class ")}) {
        if (!rest.starts_with(kw)) continue;
        rest.remove_prefix(kw.size());
        while (!rest.empty() && rest.front() == ' ') rest.remove_prefix(1);
        std::size_t n = 0;
        while (n < rest.size() && is_ident(rest[n])) ++n;
        if (n > 0) stack.push_back({ind, std::string(rest.substr(0, n))});
      }
    }
    while (q < queries.size() && queries[q] < e) {
      const std::size_t col = indent_width(s.substr(b, queries[q] - b));
      const bool own_line = queries[q] - b == first;
      out[q++] = answer_for(col, own_line);
    }
  }
  while (q < queries.size()) out[q++] = std::nullopt;
  return out;
}

inline std::vector<std::optional<std::string>> scopes_at(std::string_view content, Language language,
                                                         const std::vector<Segment>& segs,
                                                         const std::vector<std::size_t>& offsets) {
  if (language == Language::Python) return python_scopes(content, segs, offsets);
  if (language == Language::Other) return std::vector<std::optional<std::string>>(offsets.size());
  return c_family_scopes(content, segs, offsets);
}

} // namespace detail

/// Best-effort innermost class or function around a 1-based line.
inline std::optional<std::string> enclosing_scope(std::string_view content, Language language, int line) {
  auto starts = detail::line_starts(content);
  if (line < 1 || static_cast<std::size_t>(line) > starts.size()) return std::nullopt;
  std::size_t off = starts[static_cast<std::size_t>(line - 1)];
  while (off < content.size() && detail::is_space(content[off])) ++off;
  auto segs = scan(content, language);
  return detail::scopes_at(content, language, segs, {off}).front();
}

/// Every comment in the content, merged into blocks, sorted by start line.
/// Records whose normalized text is empty are dropped.
inline std::vector<Comment> extract_comments(std::string_view content, Language language, Diagnostics* diag = nullptr) {
  auto segs = scan(content, language, diag);
  auto starts = detail::line_starts(content);

  struct Group { std::size_t begin, end; CommentStyle style; };
  std::vector<Group> groups;
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const auto& seg = segs[i];
    if (seg.kind != Segment::Kind::Comment) continue;
    if (!groups.empty() && seg.style != CommentStyle::Block && groups.back().style == seg.style) {
      std::string_view gap = content.substr(groups.back().end, seg.begin - groups.back().end);
      const bool only_space = std::all_of(gap.begin(), gap.end(), [](char c) { return detail::is_space(c) || c == '\n'; });
      if (only_space && std::count(gap.begin(), gap.end(), '\n') == 1) {
        groups.back().end = seg.end;
        continue;
      }
    }
    groups.push_back({seg.begin, seg.end, seg.style});
  }

  std::vector<std::size_t> offsets;
  for (const auto& g : groups) offsets.push_back(g.begin);
  auto hints = detail::scopes_at(content, language, segs, offsets);

  std::vector<Comment> out;
  for (std::size_t k = 0; k < groups.size(); ++k) {
    const auto& g = groups[k];
    Comment c;
    c.style = g.style;
    c.start_line = detail::line_of(starts, g.begin);
    c.end_line = detail::line_of(starts, g.end > g.begin ? g.end - 1 : g.begin);
    c.raw_text = sanitize_utf8(content.substr(g.begin, g.end - g.begin));
    c.normalized_text = normalize_comment(content.substr(g.begin, g.end - g.begin), g.style);
    c.enclosing_hint = hints[k];
    if (c.normalized_text.empty()) continue;
    out.push_back(std::move(c));
  }
  return out;
}

} // namespace satd::comments
