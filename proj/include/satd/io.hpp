#pragma once

// CSV (RFC 4180 quoting) and NDJSON helpers. All output uses LF line endings.

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "satd/common.hpp"

namespace satd::io {

using json = nlohmann::json;
using CsvRow = std::vector<std::string>;

/// Parse CSV text. Quoted fields may contain commas, doubled quotes and newlines.
/// A trailing CR before LF is dropped. Empty lines are skipped.
inline std::vector<CsvRow> parse_csv(std::string_view text) {
  std::vector<CsvRow> rows;
  CsvRow row;
  std::string field;
  bool quoted = false, field_started = false;
  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_row = [&] {
    if (!(row.empty() && !field_started && field.empty())) {
      end_field();
      rows.push_back(std::move(row));
    }
    row.clear();
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
    case '"': quoted = true; field_started = true; break;
    case ',': end_field(); field_started = true; break;
    case '\r':
      if (i + 1 < text.size() && text[i + 1] == '\n') break;
      field.push_back(c);
      break;
    case '\n': end_row(); break;
    default: field.push_back(c); field_started = true; break;
    }
  }
  if (quoted) throw Error(ErrorKind::Data, "csv: unterminated quoted field");
  end_row();
  return rows;
}

inline std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += '"';
  return out;
}

inline std::string csv_line(const CsvRow& row) {
  std::string out;
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) out.push_back(',');
    out += csv_escape(row[i]);
  }
  out.push_back('\n');
  return out;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Data, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Data, "cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

/// Compact single-line JSON; invalid UTF-8 is replaced rather than thrown.
inline std::string dump_line(const json& j) {
  return j.dump(-1, ' ', false, json::error_handler_t::replace) + "\n";
}

inline std::string dump_pretty(const json& j) {
  return j.dump(2, ' ', false, json::error_handler_t::replace) + "\n";
}

inline std::vector<json> parse_ndjson(std::string_view text) {
  std::vector<json> out;
  std::size_t pos = 0, line = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    ++line;
    auto chunk = text.substr(pos, nl - pos);
    if (!chunk.empty()) {
      try {
        out.push_back(json::parse(chunk));
      } catch (const json::exception& e) {
        throw Error(ErrorKind::Data, "ndjson line " + std::to_string(line) + ": " + e.what());
      }
    }
    pos = nl + 1;
  }
  return out;
}

} // namespace satd::io
