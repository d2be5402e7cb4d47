#pragma once

// Stage orchestration: config, extract / train / classify / track / analyze /
// report, the comment cache, and the run manifest.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "satd/classifier.hpp"
#include "satd/comment_extract.hpp"
#include "satd/common.hpp"
#include "satd/io.hpp"
#include "satd/lifecycle.hpp"
#include "satd/phase_analytics.hpp"
#include "satd/process.hpp"
#include "satd/repo_history.hpp"
#include "satd/stats_tests.hpp"
#include "satd/survival.hpp"

namespace satd::pipeline {

namespace fs = std::filesystem;
using io::json;

inline constexpr const char* kToolName = "satd-miner";
inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr double kAlpha = 0.05;

// ---------------------------------------------------------------------------
// Config

struct RunConfig {
  std::string repo;
  std::string branch = "master";
  std::string release; // empty = branch tip
  double window_days = 365.0;
  std::size_t phases = 10;
  std::string model;
  std::string corpus;
  std::string holdout;
  std::string labels;
  std::string mailmap;
  std::string out;
  std::string cache; // empty = <out>/cache
  std::string extensions; // ".ext=Lang,..." overrides
  double rename_threshold = history::kDefaultRenameThreshold;
  std::size_t features = classify::kDefaultFeatureCount;
  std::uint64_t seed = classify::kDefaultSeed;
  std::string evolution_range = "full"; // full | window

  fs::path out_dir() const { return fs::path(out); }
  fs::path cache_dir() const { return cache.empty() ? out_dir() / "cache" : fs::path(cache); }
};

namespace detail {

inline std::string trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

inline double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw Error(ErrorKind::Config, "config: " + key + " expects a number, got '" + v + "'");
  }
}

inline std::uint64_t parse_uint(const std::string& key, const std::string& v) {
  if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos)
    throw Error(ErrorKind::Config, "config: " + key + " expects a non-negative integer, got '" + v + "'");
  try {
    return std::stoull(v);
  } catch (const std::exception&) {
    throw Error(ErrorKind::Config, "config: " + key + " out of range");
  }
}

inline std::string resolve_path(const fs::path& base, const std::string& v) {
  if (v.empty()) return v;
  fs::path p(v);
  if (p.is_relative() && !base.empty()) p = base / p;
  return p.lexically_normal().string();
}

} // namespace detail

inline void set_config_value(RunConfig& c, const std::string& key, const std::string& value, const fs::path& base) {
  if (key == "repo") c.repo = detail::resolve_path(base, value);
  else if (key == "branch") c.branch = value;
  else if (key == "release") c.release = value;
  else if (key == "window_days") c.window_days = detail::parse_double(key, value);
  else if (key == "phases") c.phases = detail::parse_uint(key, value);
  else if (key == "model") c.model = detail::resolve_path(base, value);
  else if (key == "corpus") c.corpus = detail::resolve_path(base, value);
  else if (key == "holdout") c.holdout = detail::resolve_path(base, value);
  else if (key == "labels") c.labels = detail::resolve_path(base, value);
  else if (key == "mailmap") c.mailmap = detail::resolve_path(base, value);
  else if (key == "out") c.out = detail::resolve_path(base, value);
  else if (key == "cache") c.cache = detail::resolve_path(base, value);
  else if (key == "extensions") c.extensions = value;
  else if (key == "rename_threshold") c.rename_threshold = detail::parse_double(key, value);
  else if (key == "features") c.features = detail::parse_uint(key, value);
  else if (key == "seed") c.seed = detail::parse_uint(key, value);
  else if (key == "evolution_range") c.evolution_range = value;
  else throw Error(ErrorKind::Config, "config: unknown key '" + key + "'");
}

/// key = value lines; '#' starts a comment line. Relative paths resolve against `base`.
inline RunConfig parse_config(std::string_view text, const fs::path& base = {}) {
  RunConfig c;
  std::size_t pos = 0;
  int line_no = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string line = detail::trim(text.substr(pos, nl - pos));
    pos = nl + 1;
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::Config, "config line " + std::to_string(line_no) + ": expected key = value");
    set_config_value(c, detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)), base);
  }
  return c;
}

inline RunConfig load_config(const fs::path& path) {
  std::string text;
  try {
    text = io::read_file(path);
  } catch (const Error&) {
    throw Error(ErrorKind::Config, "cannot read config " + path.string());
  }
  return parse_config(text, fs::absolute(path).parent_path());
}

inline void validate_config(const RunConfig& c) {
  if (c.repo.empty()) throw Error(ErrorKind::Config, "config: repo is required");
  if (c.out.empty()) throw Error(ErrorKind::Config, "config: out is required");
  if (!(c.window_days > 0)) throw Error(ErrorKind::Config, "config: window_days must be > 0");
  if (c.phases < 2) throw Error(ErrorKind::Config, "config: phases must be >= 2");
  if (!(c.rename_threshold > 0 && c.rename_threshold <= 1)) throw Error(ErrorKind::Config, "config: rename_threshold must lie in (0,1]");
  if (c.features == 0) throw Error(ErrorKind::Config, "config: features must be positive");
  if (c.evolution_range != "full" && c.evolution_range != "window")
    throw Error(ErrorKind::Config, "config: evolution_range must be full or window");
}

inline history::ExtensionMap extension_map(const RunConfig& c) {
  auto map = history::default_extension_map();
  std::stringstream ss(c.extensions);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = detail::trim(item);
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos || item[0] != '.') throw Error(ErrorKind::Config, "config: bad extension override '" + item + "'");
    std::string ext = history::lowercase(detail::trim(item.substr(0, eq)));
    const std::string lang = detail::trim(item.substr(eq + 1));
    if (lang == "none" || lang == "None") {
      map.erase(ext);
      continue;
    }
    auto l = comments::parse_language(lang);
    if (!l) throw Error(ErrorKind::Config, "config: unknown language '" + lang + "'");
    map[ext] = *l;
  }
  return map;
}

inline json config_json(const RunConfig& c) {
  return {{"repo", c.repo},
          {"branch", c.branch},
          {"release", c.release},
          {"window_days", c.window_days},
          {"phases", c.phases},
          {"model", c.model},
          {"corpus", c.corpus},
          {"holdout", c.holdout},
          {"labels", c.labels},
          {"mailmap", c.mailmap},
          {"out", c.out},
          {"extensions", c.extensions},
          {"rename_threshold", c.rename_threshold},
          {"features", c.features},
          {"seed", c.seed},
          {"evolution_range", c.evolution_range}};
}

// ---------------------------------------------------------------------------
// Files, manifest, diagnostics

namespace files {
inline constexpr const char* commits = "commits.ndjson";
inline constexpr const char* versions = "versions.ndjson";
inline constexpr const char* comments = "comments.ndjson";
inline constexpr const char* extract_summary = "extract_summary.json";
inline constexpr const char* model = "model.json";
inline constexpr const char* evaluation = "evaluation.json";
inline constexpr const char* labels = "labels.ndjson";
inline constexpr const char* instances = "instances.ndjson";
inline constexpr const char* baseline = "baseline.ndjson";
inline constexpr const char* instances_full = "instances_full.ndjson";
inline constexpr const char* track_summary = "track_summary.json";
inline constexpr const char* bundle = "bundle.json";
inline constexpr const char* summary = "summary.md";
inline constexpr const char* manifest = "manifest.json";
} // namespace files

inline std::string file_hash(const fs::path& p) {
  if (!fs::exists(p)) return "missing";
  return hex64(fnv1a64(io::read_file(p)));
}

class Stage {
public:
  Stage(std::string name, const RunConfig& config) : name_(std::move(name)), config_(config) {}

  Diagnostics& diag() { return diag_; }
  const std::string& name() const { return name_; }
  fs::path path(const std::string& f) const { return config_.out_dir() / f; }

  void input(const std::string& label, const std::string& hash) { inputs_[label] = hash; }
  void input_file(const std::string& f) { inputs_[f] = file_hash(path(f)); }

  void write(const std::string& f, std::string_view content) {
    io::write_file(path(f), content);
    outputs_[f] = hex64(fnv1a64(content));
  }

  /// Diagnostics file plus manifest entry; called on success and failure alike.
  void close(bool ok) {
    std::string diag_text;
    for (const auto& d : diag_.items()) diag_text += io::dump_line({{"stage", d.stage}, {"code", d.code}, {"message", d.message}});
    io::write_file(config_.out_dir() / "diagnostics" / (name_ + ".ndjson"), diag_text);

    const fs::path mpath = config_.out_dir() / files::manifest;
    json m;
    if (fs::exists(mpath)) {
      try {
        m = json::parse(io::read_file(mpath));
      } catch (const json::exception&) {
        m = json::object();
      }
    }
    m["tool"] = kToolName;
    m["version"] = kToolVersion;
    m["config"] = config_json(config_);
    json s;
    s["status"] = ok ? "ok" : "failed";
    s["inputs"] = inputs_;
    s["outputs"] = outputs_;
    s["diagnostics"] = diag_.items().size();
    m["stages"][name_] = std::move(s);
    io::write_file(mpath, io::dump_pretty(m));
  }

private:
  std::string name_;
  const RunConfig& config_;
  Diagnostics diag_;
  std::map<std::string, std::string> inputs_;
  std::map<std::string, std::string> outputs_;
};

/// Run `body` as a named stage, recording diagnostics and the manifest entry.
template <class F>
auto run_stage(const std::string& name, const RunConfig& config, F&& body) {
  validate_config(config);
  Stage st(name, config);
  try {
    if constexpr (std::is_void_v<decltype(body(st))>) {
      body(st);
      st.close(true);
    } else {
      auto r = body(st);
      st.close(true);
      return r;
    }
  } catch (...) {
    try {
      st.close(false);
    } catch (...) {
    }
    throw;
  }
}

inline std::vector<json> read_ndjson_file(const fs::path& p, const char* stage_hint) {
  if (!fs::exists(p))
    throw Error(ErrorKind::Data, "missing " + p.filename().string() + "; run the " + std::string(stage_hint) + " stage first");
  return io::parse_ndjson(io::read_file(p));
}

inline json read_json_file(const fs::path& p, const char* stage_hint) {
  if (!fs::exists(p))
    throw Error(ErrorKind::Data, "missing " + p.filename().string() + "; run the " + std::string(stage_hint) + " stage first");
  try {
    return json::parse(io::read_file(p));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Data, p.filename().string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Record (de)serialization

inline json commit_json(const history::CommitRecord& c) {
  return {{"commit_id", c.commit_id}, {"ordinal", c.ordinal}, {"timestamp", c.timestamp},
          {"author_name", c.author.name}, {"author_email", c.author.email}};
}

inline history::CommitRecord commit_from_json(const json& j) {
  history::CommitRecord c;
  c.commit_id = j.at("commit_id").get<std::string>();
  c.ordinal = j.at("ordinal").get<std::size_t>();
  c.timestamp = j.at("timestamp").get<std::int64_t>();
  c.author = {j.at("author_name").get<std::string>(), j.at("author_email").get<std::string>()};
  return c;
}

inline std::vector<history::CommitRecord> load_commits(const RunConfig& c) {
  std::vector<history::CommitRecord> out;
  for (const auto& j : read_ndjson_file(c.out_dir() / files::commits, "extract")) out.push_back(commit_from_json(j));
  for (std::size_t i = 0; i < out.size(); ++i)
    if (out[i].ordinal != i) throw Error(ErrorKind::Data, "commits.ndjson: ordinals not consecutive");
  return out;
}

inline json version_json(const history::FileVersion& v) {
  json j = {{"lineage_id", v.lineage_id},
            {"path", v.path},
            {"commit_id", v.commit.commit_id},
            {"ordinal", v.commit.ordinal},
            {"timestamp", v.commit.timestamp},
            {"author_name", v.commit.author.name},
            {"author_email", v.commit.author.email},
            {"change_kind", history::to_string(v.change_kind)},
            {"language", comments::to_string(v.language)},
            {"blob_id", v.blob_id}};
  if (!v.previous_path.empty()) j["previous_path"] = v.previous_path;
  return j;
}

inline json comment_json(const comments::Comment& c) {
  json j = {{"start_line", c.start_line},
            {"end_line", c.end_line},
            {"style", comments::to_string(c.style)},
            {"raw_text", sanitize_utf8(c.raw_text)},
            {"normalized_text", c.normalized_text}};
  j["enclosing_hint"] = c.enclosing_hint ? json(*c.enclosing_hint) : json(nullptr);
  return j;
}

// ---------------------------------------------------------------------------
// Comment cache: append-only NDJSON shards keyed by (commit_id, path)

inline constexpr std::size_t kShardSpan = 1000; // ordinals per shard

class CommentCache {
public:
  explicit CommentCache(fs::path dir, Diagnostics* diag) : dir_(std::move(dir)), diag_(diag) {
    if (!fs::exists(dir_)) return;
    std::vector<fs::path> shards;
    for (const auto& e : fs::directory_iterator(dir_))
      if (e.path().extension() == ".ndjson") shards.push_back(e.path());
    std::sort(shards.begin(), shards.end());
    for (const auto& s : shards) {
      const std::string text = io::read_file(s);
      std::size_t pos = 0;
      while (pos < text.size()) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string::npos) {
          if (diag_) diag_->add("extract", "cache_truncated_line", s.filename().string() + ": ignoring unterminated final line");
          break;
        }
        try {
          json j = json::parse(std::string_view(text).substr(pos, nl - pos));
          std::pair<std::string, std::string> key{j.at("commit_id").get<std::string>(), j.at("path").get<std::string>()};
          entries_[std::move(key)] = std::move(j);
        } catch (const json::exception&) {
          if (diag_) diag_->add("extract", "cache_bad_line", s.filename().string() + ": ignoring unparsable line");
        }
        pos = nl + 1;
      }
    }
  }

  const json* find(const std::string& commit_id, const std::string& path, const std::string& language,
                   const std::string& blob_id) const {
    auto it = entries_.find({commit_id, path});
    if (it == entries_.end()) return nullptr;
    const json& j = it->second;
    if (j.value("language", "") != language || j.value("blob_id", "") != blob_id) return nullptr;
    return &j;
  }

  void append(std::size_t ordinal, json entry) {
    char name[32];
    std::snprintf(name, sizeof name, "shard-%06zu.ndjson", ordinal / kShardSpan);
    fs::create_directories(dir_);
    std::ofstream out(dir_ / name, std::ios::binary | std::ios::app);
    out << io::dump_line(entry);
    if (!out) throw Error(ErrorKind::Data, "cannot append to comment cache");
    std::pair<std::string, std::string> key{entry.at("commit_id").get<std::string>(), entry.at("path").get<std::string>()};
    entries_[std::move(key)] = std::move(entry);
  }

private:
  fs::path dir_;
  Diagnostics* diag_;
  std::map<std::pair<std::string, std::string>, json> entries_;
};

// ---------------------------------------------------------------------------
// extract

struct ExtractCounters {
  std::size_t versions = 0;
  std::size_t lexed = 0;
  std::size_t reused = 0;
};

struct ExtractResult {
  std::size_t first_parent_commits = 0;
  std::size_t all_ancestor_commits = 0;
  std::size_t versions = 0;
  std::size_t raw_comments = 0;
  std::size_t distinct_comments = 0;
  std::string release_commit;
  ExtractCounters counters;
};

inline std::string resolve_release(const RunConfig& c, const std::vector<history::CommitRecord>& commits) {
  if (c.release.empty()) return commits.back().commit_id;
  auto id = history::resolve_revision(c.repo, c.release);
  if (!id) throw Error(ErrorKind::Config, "release commit not resolvable: " + c.release);
  for (const auto& cm : commits)
    if (cm.commit_id == *id) return *id;
  throw Error(ErrorKind::Config, "release commit " + c.release + " is not on the first-parent chain of " + c.branch);
}

inline ExtractResult cmd_extract(const RunConfig& config) {
  return run_stage("extract", config, [&](Stage& st) {
    ExtractResult res;
    auto commits = history::linearize_history(config.repo, config.branch);
    res.release_commit = resolve_release(config, commits);
    res.first_parent_commits = commits.size();
    res.all_ancestor_commits = history::count_all_ancestors(config.repo, commits.back().commit_id);
    st.diag().add("extract", "commit_counts",
                  "first_parent=" + std::to_string(res.first_parent_commits) + " all_ancestors=" + std::to_string(res.all_ancestor_commits));
    st.input("branch_tip", commits.back().commit_id);
    st.input("release", res.release_commit);
    st.input("extensions", config.extensions);

    history::EnumerateOptions opts;
    opts.extensions = extension_map(config);
    opts.rename_threshold = config.rename_threshold;
    opts.load_content = false;

    CommentCache cache(config.cache_dir(), &st.diag());
    proc::BlobReader blobs(config.repo);
    std::string commits_text, versions_text, comments_text;
    for (const auto& c : commits) commits_text += io::dump_line(commit_json(c));
    std::set<std::tuple<std::string, std::string, std::size_t>> distinct;

    history::enumerate_file_versions(
        config.repo, commits, opts,
        [&](history::FileVersion&& v) {
          ++res.versions;
          versions_text += io::dump_line(version_json(v));
          if (v.change_kind == history::ChangeKind::Deleted) return;
          const std::string lang = comments::to_string(v.language);
          json entry;
          if (const json* hit = cache.find(v.commit.commit_id, v.path, lang, v.blob_id)) {
            entry = *hit;
            ++res.counters.reused;
          } else {
            std::string content;
            if (!blobs.read(v.blob_id, content)) {
              st.diag().add("extract", "unreadable_blob", "cannot read blob " + v.blob_id + " for " + v.path);
              return;
            }
            Diagnostics local;
            auto found = comments::extract_comments(content, v.language, &local);
            entry = {{"commit_id", v.commit.commit_id}, {"path", v.path}, {"language", lang}, {"blob_id", v.blob_id}};
            json arr = json::array();
            for (const auto& cm : found) arr.push_back(comment_json(cm));
            entry["comments"] = std::move(arr);
            json dj = json::array();
            for (const auto& d : local.items()) dj.push_back({{"code", d.code}, {"message", d.message}});
            entry["diagnostics"] = std::move(dj);
            cache.append(v.commit.ordinal, entry);
            ++res.counters.lexed;
          }
          for (const auto& d : entry.at("diagnostics"))
            st.diag().add("extract", d.at("code").get<std::string>(), v.path + "@" + v.commit.commit_id + ": " + d.at("message").get<std::string>());
          std::vector<std::string> texts;
          for (const auto& cm : entry.at("comments")) texts.push_back(cm.at("normalized_text").get<std::string>());
          auto keys = lifecycle::keys_for(v.lineage_id, texts);
          std::size_t idx = 0;
          for (const auto& cm : entry.at("comments")) {
            json rec = {{"lineage_id", v.lineage_id},
                        {"path", v.path},
                        {"commit_id", v.commit.commit_id},
                        {"ordinal", v.commit.ordinal},
                        {"start_line", cm.at("start_line")},
                        {"end_line", cm.at("end_line")},
                        {"style", cm.at("style")},
                        {"text_hash", text_hash(cm.at("normalized_text").get<std::string>())},
                        {"occurrence_index", keys[idx].occurrence_index},
                        {"normalized_text", cm.at("normalized_text")},
                        {"raw_text", cm.at("raw_text")},
                        {"enclosing_hint", cm.at("enclosing_hint")}};
            comments_text += io::dump_line(rec);
            distinct.insert({keys[idx].lineage_id, keys[idx].normalized_text, keys[idx].occurrence_index});
            ++res.raw_comments;
            ++idx;
          }
        },
        &st.diag());

    res.distinct_comments = distinct.size();
    res.counters.versions = res.versions;
    st.write(files::commits, commits_text);
    st.write(files::versions, versions_text);
    st.write(files::comments, comments_text);
    json summary = {{"branch", config.branch},
                    {"branch_tip", commits.back().commit_id},
                    {"release_commit", res.release_commit},
                    {"first_parent_commits", res.first_parent_commits},
                    {"all_ancestor_commits", res.all_ancestor_commits},
                    {"file_versions", res.versions},
                    {"raw_comments", res.raw_comments},
                    {"distinct_comments", res.distinct_comments}};
    st.write(files::extract_summary, io::dump_pretty(summary));
    // Counters vary between cold and warm runs, so they live outside the hashed outputs.
    io::write_file(config.out_dir() / "stats" / "extract_counters.json",
                   io::dump_pretty({{"versions", res.counters.versions}, {"lexed", res.counters.lexed}, {"reused", res.counters.reused}}));
    return res;
  });
}

// ---------------------------------------------------------------------------
// train / classify

struct ModelBundle {
  classify::ClassifierModel detector;
  std::optional<classify::ClassifierModel> typer;
};

inline json bundle_to_json(const ModelBundle& m) {
  return {{"format", "satd-model-bundle"},
          {"version", 1},
          {"detector", classify::model_to_json(m.detector)},
          {"typer", m.typer ? classify::model_to_json(*m.typer) : json(nullptr)}};
}

inline ModelBundle bundle_from_json(const json& j) {
  ModelBundle m;
  if (j.is_object() && j.value("format", "") == "satd-model-bundle") {
    if (!j.contains("detector")) throw Error(ErrorKind::Corpus, "model: bundle lacks a detector");
    m.detector = classify::model_from_json(j.at("detector"));
    if (j.contains("typer") && !j.at("typer").is_null()) m.typer = classify::model_from_json(j.at("typer"));
  } else {
    m.detector = classify::model_from_json(j);
  }
  if (m.detector.mode != classify::Mode::Binary) throw Error(ErrorKind::Corpus, "model: detector must be binary");
  return m;
}

inline ModelBundle train_bundle(const std::string& corpus_text, std::size_t features, Diagnostics* diag) {
  ModelBundle m;
  auto binary = classify::read_corpus_csv(corpus_text, classify::Mode::Binary);
  classify::TrainReport rep;
  m.detector = classify::train(binary, features, classify::Mode::Binary, &rep, diag);
  if (classify::corpus_has_types(corpus_text)) {
    auto typed = classify::read_corpus_csv(corpus_text, classify::Mode::Typed);
    classify::TrainingCorpus debt_only;
    for (auto& e : typed.entries)
      if (e.label != classify::to_string(classify::DebtType::NotSatd)) debt_only.entries.push_back(std::move(e));
    try {
      if (!debt_only.entries.empty()) m.typer = classify::train(debt_only, features, classify::Mode::Typed, nullptr, diag);
    } catch (const Error& e) {
      if (diag) diag->add("train", "typer_unavailable", e.what());
    }
  }
  return m;
}

inline std::string read_input(const std::string& path, ErrorKind kind, const std::string& what) {
  try {
    return io::read_file(path);
  } catch (const Error&) {
    throw Error(kind, "cannot read " + what + " " + path);
  }
}

inline ModelBundle cmd_train(const RunConfig& config) {
  return run_stage("train", config, [&](Stage& st) {
    if (config.corpus.empty()) throw Error(ErrorKind::Corpus, "train: missing corpus");
    const std::string text = read_input(config.corpus, ErrorKind::Corpus, "corpus");
    st.input("corpus", hex64(fnv1a64(text)));
    auto m = train_bundle(text, config.features, &st.diag());
    st.write(files::model, io::dump_line(bundle_to_json(m)));
    if (!config.holdout.empty()) {
      const std::string ht = read_input(config.holdout, ErrorKind::Corpus, "holdout corpus");
      auto held = classify::read_corpus_csv(ht, classify::Mode::Binary);
      auto rep = classify::evaluate(m.detector, held);
      rep.overlap_with_training = classify::count_overlap(classify::read_corpus_csv(text, classify::Mode::Binary), held);
      if (rep.overlap_with_training > 0)
        st.diag().add("train", "train_test_overlap", std::to_string(rep.overlap_with_training) + " holdout texts also appear in the corpus");
      auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
      json per = json::object();
      for (const auto& [p, c] : rep.per_project)
        per[p] = {{"tp", c.tp}, {"fp", c.fp}, {"fn", c.fn}, {"tn", c.tn}, {"precision", opt(c.precision())}, {"recall", opt(c.recall())}};
      json ev = {{"precision", opt(rep.precision())},
                 {"recall", opt(rep.recall())},
                 {"tp", rep.overall.tp},
                 {"fp", rep.overall.fp},
                 {"fn", rep.overall.fn},
                 {"tn", rep.overall.tn},
                 {"overlap_with_training", rep.overlap_with_training},
                 {"per_project", per}};
      st.write(files::evaluation, io::dump_pretty(ev));
    }
    return m;
  });
}

/// Configured model, else a model trained from the configured corpus, else
/// the model left by a previous train stage.
inline ModelBundle load_model(const RunConfig& config, Stage& st) {
  fs::path p;
  if (!config.model.empty()) p = config.model;
  else if (config.corpus.empty() && fs::exists(config.out_dir() / files::model)) p = config.out_dir() / files::model;
  if (!p.empty()) {
    const std::string text = read_input(p.string(), ErrorKind::Corpus, "model");
    st.input("model", hex64(fnv1a64(text)));
    try {
      return bundle_from_json(json::parse(text));
    } catch (const json::exception& e) {
      throw Error(ErrorKind::Corpus, std::string("model: malformed JSON: ") + e.what());
    }
  }
  if (config.corpus.empty()) throw Error(ErrorKind::Corpus, "classify: missing corpus and model");
  const std::string text = read_input(config.corpus, ErrorKind::Corpus, "corpus");
  st.input("corpus", hex64(fnv1a64(text)));
  auto m = train_bundle(text, config.features, &st.diag());
  st.write(files::model, io::dump_line(bundle_to_json(m)));
  return m;
}

struct Label {
  bool satd = false;
  std::optional<classify::DebtType> type; // nullopt for untyped SATD
  lifecycle::LabelSource source = lifecycle::LabelSource::Classifier;
};

inline std::size_t cmd_classify(const RunConfig& config) {
  return run_stage("classify", config, [&](Stage& st) {
    auto model = load_model(config, st);
    std::map<std::string, classify::DebtType> imported;
    if (!config.labels.empty()) {
      const std::string lt = read_input(config.labels, ErrorKind::Corpus, "label import");
      st.input("labels", hex64(fnv1a64(lt)));
      imported = lifecycle::read_label_import(lt);
    }
    st.input_file(files::comments);
    const auto comment_rows = read_ndjson_file(config.out_dir() / files::comments, "extract");
    std::map<std::string, Label> by_text;
    std::set<std::string> emitted;
    std::string out;
    std::size_t untyped = 0, n = 0;
    for (const auto& r : comment_rows) {
      lifecycle::CommentKey key{r.at("lineage_id").get<std::string>(), r.at("normalized_text").get<std::string>(),
                                r.at("occurrence_index").get<std::size_t>()};
      const std::string ks = lifecycle::comment_key_string(key);
      if (!emitted.insert(ks).second) continue;
      Label lab;
      if (auto it = imported.find(ks); it != imported.end()) {
        lab.satd = it->second != classify::DebtType::NotSatd;
        lab.type = it->second;
        lab.source = lifecycle::LabelSource::Import;
      } else {
        auto cached = by_text.find(key.normalized_text);
        if (cached == by_text.end()) {
          Label l;
          l.satd = classify::is_positive(classify::predict(model.detector, key.normalized_text).label);
          if (!l.satd) l.type = classify::DebtType::NotSatd;
          else if (model.typer) l.type = classify::parse_debt_type(classify::predict(*model.typer, key.normalized_text).label);
          cached = by_text.emplace(key.normalized_text, l).first;
        }
        lab = cached->second;
      }
      if (lab.satd && !lab.type) {
        ++untyped;
        st.diag().add("classify", "untyped_satd", ks + " flagged SATD but no debt type is available");
      }
      out += io::dump_line({{"comment_key", ks},
                            {"lineage_id", key.lineage_id},
                            {"text_hash", text_hash(key.normalized_text)},
                            {"occurrence_index", key.occurrence_index},
                            {"satd", lab.satd},
                            {"debt_type", lab.type ? json(classify::to_string(*lab.type)) : json(nullptr)},
                            {"label_source", lifecycle::to_string(lab.source)}});
      ++n;
    }
    for (const auto& [k, t] : imported)
      if (!emitted.count(k)) st.diag().add("classify", "unmatched_import_label", k);
    st.write(files::labels, out);
    return n;
  });
}

// ---------------------------------------------------------------------------
// track

struct TrackResult {
  std::vector<lifecycle::SatdInstance> instances; // typed SATD, window-censored
  std::vector<lifecycle::SatdInstance> baseline;  // NotSatd, window-censored
  std::vector<lifecycle::SatdInstance> full;      // typed SATD, censored at release only
};

inline history::IdentityTable identity_table(const RunConfig& config, const std::vector<history::CommitRecord>& commits,
                                             Stage& st) {
  if (config.mailmap.empty()) return history::merge_identities(commits, nullptr);
  const std::string text = read_input(config.mailmap, ErrorKind::Config, "mailmap");
  st.input("mailmap", hex64(fnv1a64(text)));
  auto entries = history::parse_mailmap(text);
  return history::merge_identities(commits, &entries);
}

inline TrackResult cmd_track(const RunConfig& config) {
  return run_stage("track", config, [&](Stage& st) {
    for (const char* f : {files::commits, files::versions, files::comments, files::labels}) st.input_file(f);
    auto commits = load_commits(config);
    if (commits.empty()) throw Error(ErrorKind::Data, "commits.ndjson is empty");
    std::string release;
    if (config.release.empty()) {
      release = read_json_file(config.out_dir() / files::extract_summary, "extract").at("release_commit").get<std::string>();
    } else {
      release = resolve_release(config, commits);
    }
    const auto window = lifecycle::make_window(commits, release, config.window_days);
    st.input("release", release);

    std::map<std::string, Label> labels;
    for (const auto& r : read_ndjson_file(config.out_dir() / files::labels, "classify")) {
      Label l;
      l.satd = r.at("satd").get<bool>();
      if (!r.at("debt_type").is_null()) l.type = classify::parse_debt_type(r.at("debt_type").get<std::string>());
      l.source = r.at("label_source").get<std::string>() == "import" ? lifecycle::LabelSource::Import : lifecycle::LabelSource::Classifier;
      labels[r.at("comment_key").get<std::string>()] = l;
    }

    // Group comment rows by (commit_id, path).
    std::map<std::pair<std::string, std::string>, std::vector<const json*>> by_version;
    const auto comment_rows = read_ndjson_file(config.out_dir() / files::comments, "extract");
    for (const auto& r : comment_rows)
      by_version[{r.at("commit_id").get<std::string>(), r.at("path").get<std::string>()}].push_back(&r);

    lifecycle::Tracker tracker(&st.diag());
    for (const auto& v : read_ndjson_file(config.out_dir() / files::versions, "extract")) {
      lifecycle::VersionComments vc;
      vc.lineage_id = v.at("lineage_id").get<std::string>();
      vc.path = v.at("path").get<std::string>();
      const auto ord = v.at("ordinal").get<std::size_t>();
      if (ord >= commits.size()) throw Error(ErrorKind::Data, "versions.ndjson: ordinal out of range");
      vc.commit = commits[ord];
      vc.deleted = v.at("change_kind").get<std::string>() == "Deleted";
      if (auto it = by_version.find({vc.commit.commit_id, vc.path}); it != by_version.end()) {
        for (const json* r : it->second) {
          vc.texts.push_back(r->at("normalized_text").get<std::string>());
          const auto& h = r->at("enclosing_hint");
          vc.hints.push_back(h.is_null() ? std::nullopt : std::optional<std::string>(h.get<std::string>()));
        }
      }
      tracker.feed(vc);
    }
    auto tracked = tracker.finish();

    std::vector<lifecycle::SatdInstance> satd, notsatd;
    std::size_t unlabeled = 0, untyped = 0;
    for (auto& t : tracked) {
      const std::string ks = lifecycle::comment_key_string(t.key);
      auto it = labels.find(ks);
      if (it == labels.end()) {
        ++unlabeled;
        st.diag().add("track", "unlabeled_comment", ks);
        continue;
      }
      if (it->second.satd && !it->second.type) {
        ++untyped;
        continue;
      }
      lifecycle::SatdInstance inst;
      inst.key = t.key;
      inst.debt_type = *it->second.type;
      inst.label_source = it->second.source;
      inst.intro = t.intro;
      inst.removal = t.removal;
      (inst.debt_type == classify::DebtType::NotSatd ? notsatd : satd).push_back(std::move(inst));
    }
    if (untyped) st.diag().add("track", "untyped_satd_skipped", std::to_string(untyped) + " SATD comments without a debt type were left out");

    const auto table = identity_table(config, commits, st);
    const history::ActivityIndex activity(commits, table);
    auto attribute = [&](std::vector<lifecycle::SatdInstance>& v) {
      for (auto& i : v)
        if (!i.censored && i.removal) i.remover_class = lifecycle::classify_remover(i, table, activity);
    };

    TrackResult res;
    res.full = lifecycle::censor_at_release(satd, window, nullptr);
    res.instances = lifecycle::apply_censoring(std::move(satd), window, &st.diag());
    res.baseline = lifecycle::apply_censoring(std::move(notsatd), window, &st.diag());
    attribute(res.full);
    attribute(res.instances);
    attribute(res.baseline);

    auto dump = [](const std::vector<lifecycle::SatdInstance>& v) {
      std::string s;
      for (const auto& i : v) s += io::dump_line(lifecycle::instance_json(i));
      return s;
    };
    st.write(files::instances, dump(res.instances));
    st.write(files::baseline, dump(res.baseline));
    st.write(files::instances_full, dump(res.full));

    json per = json::object();
    for (classify::DebtType t : classify::kDebtTypes) {
      std::size_t in = 0, rm = 0, ce = 0;
      for (const auto& i : res.instances)
        if (i.debt_type == t) {
          ++in;
          (i.censored ? ce : rm)++;
        }
      per[classify::to_string(t)] = {{"introduced", in}, {"removed", rm}, {"censored", ce}};
    }
    json summary = {{"release_commit", window.release_commit},
                    {"release_ordinal", window.release_ordinal},
                    {"release_time", window.release_time},
                    {"window_days", config.window_days},
                    {"tracked_comments", tracked.size()},
                    {"satd_instances", res.instances.size()},
                    {"baseline_instances", res.baseline.size()},
                    {"unlabeled", unlabeled},
                    {"untyped_skipped", untyped},
                    {"per_type", per}};
    st.write(files::track_summary, io::dump_pretty(summary));
    return res;
  });
}

// ---------------------------------------------------------------------------
// analyze

inline std::string fmt_stat(double v) {
  if (v != v) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  std::string s = buf;
  if (s == "-0") s = "0";
  return s;
}

inline json num(double v) { return std::isfinite(v) ? json(std::stod(fmt_stat(v))) : json(fmt_stat(v)); }

struct TestRow {
  std::string analysis;
  std::string test;
  std::string groups;
  std::optional<double> statistic, df, p_value, effect_value;
  std::string effect_magnitude;
  std::string correction = "none";
  std::string status = "ok";
  std::string note;

  bool significant() const { return status == "ok" && p_value && *p_value < kAlpha; }
};

inline std::string tests_csv(const std::vector<TestRow>& rows) {
  std::string out = io::csv_line({"analysis", "test", "groups", "statistic", "df", "p_value", "effect_value", "effect_magnitude",
                                  "correction", "significant", "status"});
  auto o = [](const std::optional<double>& v) { return v ? fmt_stat(*v) : std::string(); };
  for (const auto& r : rows)
    out += io::csv_line({r.analysis, r.test, r.groups, o(r.statistic), o(r.df), o(r.p_value), o(r.effect_value),
                         r.effect_magnitude, r.correction, r.significant() ? "true" : "false", r.status});
  return out;
}

inline json tests_json(const std::vector<TestRow>& rows) {
  json a = json::array();
  auto o = [](const std::optional<double>& v) { return v ? num(*v) : json(nullptr); };
  for (const auto& r : rows) {
    json j = {{"analysis", r.analysis}, {"test", r.test}, {"groups", r.groups}, {"statistic", o(r.statistic)},
              {"df", o(r.df)}, {"p", o(r.p_value)}, {"effect_value", o(r.effect_value)},
              {"effect_magnitude", r.effect_magnitude.empty() ? json(nullptr) : json(r.effect_magnitude)},
              {"correction", r.correction}, {"significant", r.significant()}, {"status", r.status}};
    if (!r.note.empty()) j["note"] = r.note;
    a.push_back(std::move(j));
  }
  return a;
}

/// Kruskal-Wallis, Dunn (Bonferroni) and pairwise Cliff's delta over named groups.
inline void rank_battery(const std::string& analysis, const std::vector<std::pair<std::string, std::vector<double>>>& named,
                         std::vector<TestRow>& rows) {
  std::vector<std::vector<double>> groups;
  std::vector<std::string> names;
  std::size_t n = 0;
  for (const auto& [name, vals] : named) {
    if (vals.empty()) continue;
    names.push_back(name);
    groups.push_back(vals);
    n += vals.size();
  }
  std::string all;
  for (const auto& nm : names) all += (all.empty() ? "" : "|") + nm;
  if (groups.size() < 2 || n < 3) {
    rows.push_back({analysis, "kruskal_wallis", all, {}, {}, {}, {}, "", "none", "insufficient-data", "need >= 2 nonempty groups and n >= 3"});
    return;
  }
  auto kw = stats::kruskal_wallis(groups);
  rows.push_back({analysis, "kruskal_wallis", all, kw.statistic, kw.df, kw.p_value, {}, "", "none", "ok", ""});
  std::vector<stats::TestResult> dunn;
  try {
    dunn = stats::dunn_posthoc(groups, names, stats::Correction::Bonferroni);
  } catch (const Error& e) {
    rows.push_back({analysis, "dunn", all, {}, {}, {}, {}, "", "bonferroni", "insufficient-data", e.what()});
  }
  for (const auto& d : dunn) rows.push_back({analysis, "dunn", d.groups, d.statistic, {}, d.p_value, {}, "", "bonferroni", "ok", ""});
  for (std::size_t i = 0; i < groups.size(); ++i)
    for (std::size_t j = i + 1; j < groups.size(); ++j) {
      auto e = stats::cliffs_delta(groups[i], groups[j]);
      rows.push_back({analysis, "cliffs_delta", names[i] + "|" + names[j], e.value, {}, {}, e.value, stats::to_string(e.magnitude), "none", "ok", ""});
    }
}

struct AnalyzeResult {
  json bundle;
  std::vector<std::string> violations;
};

inline std::vector<lifecycle::SatdInstance> load_instances(const fs::path& p) {
  std::vector<lifecycle::SatdInstance> out;
  for (const auto& j : read_ndjson_file(p, "track")) out.push_back(lifecycle::instance_from_json(j));
  return out;
}

inline std::string half_life_text(const std::optional<double>& m) { return m ? fmt_real(*m) : std::string("INF"); }

inline AnalyzeResult cmd_analyze(const RunConfig& config) {
  return run_stage("analyze", config, [&](Stage& st) {
    for (const char* f : {files::commits, files::instances, files::baseline, files::instances_full, files::track_summary}) st.input_file(f);
    st.input("phases", std::to_string(config.phases));
    st.input("evolution_range", config.evolution_range);
    auto commits = load_commits(config);
    auto instances = load_instances(config.out_dir() / files::instances);
    auto baseline = load_instances(config.out_dir() / files::baseline);
    auto full = load_instances(config.out_dir() / files::instances_full);
    const json track_summary = read_json_file(config.out_dir() / files::track_summary, "track");
    const std::string release = track_summary.at("release_commit").get<std::string>();
    const double window_days = track_summary.at("window_days").get<double>();
    const auto window = lifecycle::make_window(commits, release, window_days);
    const auto wend = lifecycle::window_end_ordinal(commits, window);
    if (!wend) throw Error(ErrorKind::Config, "no commits precede the censor window; nothing to analyze");

    const auto window_phases = phases::split_phases(commits, config.phases, 0, *wend + 1);
    const std::size_t evo_count = config.evolution_range == "full" ? window.release_ordinal + 1 : *wend + 1;
    const auto evo_phases = phases::split_phases(commits, config.phases, 0, evo_count);

    const auto intro = phases::intro_distribution(instances, window_phases);
    const auto removal = phases::removal_distribution(instances, window_phases);
    const auto rate_cum = phases::removal_rate_cumulative(instances, window_phases);
    const auto rate_inc = phases::removal_rate_incremental(instances, window_phases);
    const auto evolution = phases::frequency_evolution(full, evo_phases);
    const auto totals = phases::removal_totals(instances);
    const auto removers = phases::remover_breakdown(instances);

    AnalyzeResult res;
    res.violations = phases::conservation_violations(instances, {&intro, &removal});
    auto base_violations = phases::conservation_violations(baseline, {});
    res.violations.insert(res.violations.end(), base_violations.begin(), base_violations.end());
    for (const auto& v : res.violations) st.diag().add("analyze", "conservation_violation", v);
    if (!res.violations.empty())
      throw Error(ErrorKind::Data, "conservation check failed: " + res.violations.front() +
                                       (res.violations.size() > 1 ? " (+" + std::to_string(res.violations.size() - 1) + " more)" : ""));

    st.write("intro_distribution.csv", phases::to_csv(intro));
    st.write("removal_distribution.csv", phases::to_csv(removal));
    st.write("removal_rate_cumulative.csv", phases::to_csv(rate_cum));
    st.write("removal_rate_incremental.csv", phases::to_csv(rate_inc));
    st.write("frequency_evolution.csv", phases::to_csv(evolution));

    std::string totals_csv = io::csv_line({"debt_type", "introduced", "removed", "censored", "removal_rate"});
    json totals_json = json::array();
    for (const auto& t : totals) {
      totals_csv += io::csv_line({classify::to_string(t.type), std::to_string(t.introduced), std::to_string(t.removed),
                                  std::to_string(t.censored), phases::cell_text(t.rate)});
      totals_json.push_back({{"debt_type", classify::to_string(t.type)}, {"introduced", t.introduced}, {"removed", t.removed},
                             {"censored", t.censored}, {"removal_rate", t.rate ? num(*t.rate) : json(nullptr)}});
    }
    st.write("removal_rate_total.csv", totals_csv);

    std::string rem_csv = io::csv_line({"debt_type", "removed", "self", "more_active", "fewer_active"});
    json rem_json = json::array();
    for (const auto& r : removers) {
      rem_csv += io::csv_line({classify::to_string(r.type), std::to_string(r.total()), phases::cell_text(r.share(r.self)),
                               phases::cell_text(r.share(r.more)), phases::cell_text(r.share(r.fewer))});
      auto o = [](const std::optional<double>& v) { return v ? num(*v) : json(nullptr); };
      rem_json.push_back({{"debt_type", classify::to_string(r.type)}, {"removed", r.total()}, {"self", o(r.share(r.self))},
                          {"more_active", o(r.share(r.more))}, {"fewer_active", o(r.share(r.fewer))}});
    }
    st.write("remover_breakdown.csv", rem_csv);

    // Survival per type.
    std::vector<classify::DebtType> present;
    for (classify::DebtType t : classify::kDebtTypes)
      for (const auto& i : instances)
        if (i.debt_type == t) {
          present.push_back(t);
          break;
        }
    std::string hl_csv = io::csv_line({"debt_type", "instances", "events", "half_life_days"});
    std::string km_csv = io::csv_line({"debt_type", "time_days", "survival", "at_risk", "deaths"});
    json hl_json = json::array(), km_json = json::object();
    std::vector<std::vector<survival::SurvivalSample>> groups;
    std::vector<std::string> group_names;
    std::string fits_csv = io::csv_line({"debt_type", "family", "parameters", "log_likelihood", "aic", "converged", "best", "status"});
    json fits_json = json::array();
    for (classify::DebtType t : present) {
      auto s = lifecycle::samples_of_type(instances, t);
      std::size_t events = 0;
      for (const auto& x : s) events += x.event ? 1 : 0;
      auto curve = survival::km_estimate(s);
      hl_csv += io::csv_line({classify::to_string(t), std::to_string(s.size()), std::to_string(events), half_life_text(curve.median)});
      hl_json.push_back({{"debt_type", classify::to_string(t)}, {"instances", s.size()}, {"events", events},
                         {"half_life_days", curve.median ? num(*curve.median) : json("INF")}});
      json series = json::array();
      for (const auto& step : curve.steps) {
        km_csv += io::csv_line({classify::to_string(t), fmt_real(step.time), fmt_real(step.survival), std::to_string(step.at_risk),
                                std::to_string(step.deaths)});
        series.push_back({num(step.time), num(step.survival), step.at_risk, step.deaths});
      }
      km_json[classify::to_string(t)] = std::move(series);
      groups.push_back(s);
      group_names.push_back(classify::to_string(t));

      std::vector<std::pair<survival::ParametricFit, std::string>> fits;
      for (auto fam : {survival::Family::Exponential, survival::Family::Weibull, survival::Family::LogNormal, survival::Family::Gamma}) {
        try {
          fits.emplace_back(survival::parametric_fit(s, fam), "ok");
        } catch (const Error& e) {
          survival::ParametricFit f;
          f.family = fam;
          fits.emplace_back(f, "insufficient-data");
        }
      }
      std::optional<std::size_t> best;
      for (std::size_t k = 0; k < fits.size(); ++k)
        if (fits[k].second == "ok" && fits[k].first.converged && (!best || fits[k].first.aic < fits[*best].first.aic)) best = k;
      for (std::size_t k = 0; k < fits.size(); ++k) {
        const auto& [f, status] = fits[k];
        std::string params;
        json pj = json::object();
        for (std::size_t q = 0; q < f.parameters.size(); ++q) {
          params += (q ? ";" : "") + f.parameter_names[q] + "=" + fmt_stat(f.parameters[q]);
          pj[f.parameter_names[q]] = num(f.parameters[q]);
        }
        const bool ok = status == "ok";
        fits_csv += io::csv_line({classify::to_string(t), survival::to_string(f.family), params, ok ? fmt_stat(f.log_likelihood) : "",
                                  ok ? fmt_stat(f.aic) : "", ok ? (f.converged ? "true" : "false") : "",
                                  best && *best == k ? "true" : "false", status});
        fits_json.push_back({{"debt_type", classify::to_string(t)}, {"family", survival::to_string(f.family)}, {"parameters", pj},
                             {"log_likelihood", ok ? num(f.log_likelihood) : json(nullptr)}, {"aic", ok ? num(f.aic) : json(nullptr)},
                             {"converged", ok && f.converged}, {"best", best && *best == k}, {"status", status}});
      }
    }
    st.write("half_life.csv", hl_csv);
    st.write("km_curves.csv", km_csv);
    st.write("parametric_fits.csv", fits_csv);

    std::vector<TestRow> rows;
    // per-phase introduction proportions by type
    {
      std::vector<std::pair<std::string, std::vector<double>>> named;
      for (classify::DebtType t : present) {
        std::vector<double> v;
        for (std::size_t p = 0; p < intro.cells.size(); ++p)
          if (!intro.empty_phase[p]) v.push_back(intro.at(p, t).value_or(0.0));
        named.emplace_back(classify::to_string(t), v);
      }
      rank_battery("intro_distribution", named, rows);
    }
    // per-phase removal rates by type
    {
      std::vector<std::pair<std::string, std::vector<double>>> named;
      for (classify::DebtType t : present) {
        std::vector<double> v;
        for (std::size_t p = 0; p < rate_inc.cells.size(); ++p)
          if (auto x = rate_inc.at(p, t)) v.push_back(*x);
        named.emplace_back(classify::to_string(t), v);
      }
      rank_battery("removal_rate", named, rows);
    }
    // omnibus and pairwise log-rank
    {
      std::string all;
      for (const auto& nm : group_names) all += (all.empty() ? "" : "|") + nm;
      if (groups.size() >= 2) {
        try {
          auto om = survival::omnibus_survival_test(groups);
          rows.push_back({"survival", "k_sample_logrank", all, om.statistic, om.df, om.p_value, {}, "", "none", "ok", om.method});
        } catch (const Error& e) {
          rows.push_back({"survival", "k_sample_logrank", all, {}, {}, {}, {}, "", "none", "insufficient-data", e.what()});
        }
        const std::size_t pairs = groups.size() * (groups.size() - 1) / 2;
        for (std::size_t i = 0; i < groups.size(); ++i)
          for (std::size_t j = i + 1; j < groups.size(); ++j) {
            const std::string g = group_names[i] + "|" + group_names[j];
            try {
              auto lr = survival::logrank_test(groups[i], groups[j]);
              rows.push_back({"survival", "logrank", g, lr.statistic, lr.df, stats::bonferroni(lr.p_value, pairs), {}, "", "bonferroni", "ok", ""});
            } catch (const Error& e) {
              rows.push_back({"survival", "logrank", g, {}, {}, {}, {}, "", "bonferroni", "insufficient-data", e.what()});
            }
          }
      } else {
        rows.push_back({"survival", "k_sample_logrank", all, {}, {}, {}, {}, "", "none", "insufficient-data", "need >= 2 debt types"});
      }
    }
    st.write("tests.csv", tests_csv(rows));

    // Cox against non-SATD comments when present, else against the first debt type.
    std::vector<lifecycle::SatdInstance> cox_set = instances;
    cox_set.insert(cox_set.end(), baseline.begin(), baseline.end());
    classify::DebtType cox_base = baseline.empty() && !present.empty() ? present.front() : classify::DebtType::NotSatd;
    std::string cox_csv = io::csv_line({"covariate", "coef", "hazard_ratio", "std_error", "z", "p_value", "significant"});
    std::string ph_csv = io::csv_line({"term", "correlation", "chi_square", "p_value"});
    json cox_json = {{"baseline", classify::to_string(cox_base)}, {"ties", "breslow"}};
    json ph_json = json::object();
    try {
      auto scheme = lifecycle::one_hot_scheme(cox_set, cox_base);
      if (scheme.indicators.empty()) throw Error(ErrorKind::Data, "no covariates beyond the baseline");
      auto data = lifecycle::to_survival_samples(cox_set, scheme);
      auto fit = survival::cox_fit(data);
      json terms = json::array();
      for (std::size_t k = 0; k < fit.names.size(); ++k) {
        cox_csv += io::csv_line({fit.names[k], fmt_stat(fit.coefficients[k]), fmt_stat(fit.hazard_ratios[k]), fmt_stat(fit.std_errors[k]),
                                 fmt_stat(fit.z[k]), fmt_stat(fit.p_values[k]), fit.p_values[k] < kAlpha ? "true" : "false"});
        terms.push_back({{"covariate", fit.names[k]}, {"coef", num(fit.coefficients[k])}, {"hazard_ratio", num(fit.hazard_ratios[k])},
                         {"std_error", num(fit.std_errors[k])}, {"z", num(fit.z[k])}, {"p_value", num(fit.p_values[k])},
                         {"significant", fit.p_values[k] < kAlpha}});
      }
      cox_json["status"] = "ok";
      cox_json["terms"] = terms;
      cox_json["converged"] = fit.converged;
      cox_json["iterations"] = fit.iterations;
      cox_json["message"] = fit.message;
      cox_json["log_partial_likelihood"] = num(fit.log_partial_likelihood);
      cox_json["events"] = fit.events;
      if (!fit.converged) st.diag().add("analyze", "cox_not_converged", fit.message);
      try {
        auto ph = survival::ph_check(fit, data);
        for (const auto& t : ph.terms) {
          ph_csv += io::csv_line({t.name, fmt_stat(t.correlation), fmt_stat(t.chi_square), fmt_stat(t.p_value)});
          ph_json[t.name] = {{"correlation", num(t.correlation)}, {"chi_square", num(t.chi_square)}, {"p_value", num(t.p_value)}};
        }
        ph_csv += io::csv_line({"GLOBAL", "", fmt_stat(ph.global_chi_square), fmt_stat(ph.global_p)});
        ph_json["GLOBAL"] = {{"chi_square", num(ph.global_chi_square)}, {"df", num(ph.global_df)}, {"p_value", num(ph.global_p)}};
      } catch (const Error& e) {
        ph_json["status"] = "insufficient-data";
        ph_json["message"] = e.what();
      }
    } catch (const Error& e) {
      cox_json["status"] = "insufficient-data";
      cox_json["message"] = e.what();
    }
    st.write("cox.csv", cox_csv);
    st.write("ph_check.csv", ph_csv);

    json counts = json::object();
    for (const auto& t : totals) counts[classify::to_string(t.type)] = t.introduced;
    json meta = {{"release_commit", release},
                 {"window_days", window_days},
                 {"phase_count", config.phases},
                 {"window_range", {{"start", 0}, {"end", *wend + 1}}},
                 {"evolution_range", {{"kind", config.evolution_range}, {"start", 0}, {"end", evo_count}}},
                 {"omnibus_method", "k_sample_logrank (omnibus)"},
                 {"alpha", kAlpha}};
    res.bundle = {{"format", "satd-analysis-bundle"},
                  {"version", 1},
                  {"metadata", meta},
                  {"totals", {{"instances", instances.size()}, {"baseline", baseline.size()}, {"per_type", counts}}},
                  {"phases", {{"window", phases::phases_json(window_phases)}, {"evolution", phases::phases_json(evo_phases)}}},
                  {"tables",
                   {{"intro_distribution", phases::to_json(intro)},
                    {"removal_distribution", phases::to_json(removal)},
                    {"removal_rate_cumulative", phases::to_json(rate_cum)},
                    {"removal_rate_incremental", phases::to_json(rate_inc)},
                    {"frequency_evolution", phases::to_json(evolution)}}},
                  {"removal_totals", totals_json},
                  {"remover_breakdown", rem_json},
                  {"half_lives", hl_json},
                  {"km_curves", km_json},
                  {"parametric_fits", fits_json},
                  {"cox", cox_json},
                  {"ph_check", ph_json},
                  {"tests", tests_json(rows)}};
    st.write(files::bundle, io::dump_pretty(res.bundle));
    return res;
  });
}

// ---------------------------------------------------------------------------
// report

inline std::string render_report(const json& b) {
  std::ostringstream o;
  o << "# SATD lifecycle summary\n\n";
  const auto& meta = b.at("metadata");
  o << "- release commit: " << meta.at("release_commit").get<std::string>() << "\n";
  o << "- censor window: " << fmt_real(meta.at("window_days").get<double>()) << " days\n";
  o << "- phases: " << meta.at("phase_count").get<std::size_t>() << "\n";
  const std::size_t total = b.at("totals").at("instances").get<std::size_t>();
  o << "- SATD instances: " << total << "\n";
  o << "- non-SATD comments tracked: " << b.at("totals").at("baseline").get<std::size_t>() << "\n\n";
  if (total == 0) {
    o << "no SATD instances\n";
    return o.str();
  }
  auto cell = [](const json& v) {
    if (v.is_null()) return std::string("-");
    if (v.is_string()) return v.get<std::string>();
    return fmt_real(v.get<double>());
  };
  auto pct = [](const json& v) {
    if (v.is_null()) return std::string("-");
    return fmt_real(100.0 * v.get<double>(), 1) + "%";
  };
  o << "## Removal by type\n\n| type | introduced | removed | censored | removal rate |\n|---|---|---|---|---|\n";
  for (const auto& r : b.at("removal_totals")) {
    if (r.at("introduced").get<std::size_t>() == 0) continue;
    o << "| " << r.at("debt_type").get<std::string>() << " | " << r.at("introduced").get<std::size_t>() << " | "
      << r.at("removed").get<std::size_t>() << " | " << r.at("censored").get<std::size_t>() << " | " << pct(r.at("removal_rate")) << " |\n";
  }
  o << "\n## Half-life (days)\n\n| type | instances | events | half-life |\n|---|---|---|---|\n";
  for (const auto& r : b.at("half_lives"))
    o << "| " << r.at("debt_type").get<std::string>() << " | " << r.at("instances").get<std::size_t>() << " | "
      << r.at("events").get<std::size_t>() << " | " << cell(r.at("half_life_days")) << " |\n";
  const auto& cox = b.at("cox");
  o << "\n## Cox hazard ratios (baseline " << cox.at("baseline").get<std::string>() << ")\n\n";
  if (cox.at("status") == "ok") {
    o << "| covariate | HR | p |\n|---|---|---|\n";
    for (const auto& t : cox.at("terms"))
      o << "| " << t.at("covariate").get<std::string>() << " | " << cell(t.at("hazard_ratio")) << " | " << cell(t.at("p_value"))
        << (t.at("significant").get<bool>() ? " *" : "") << " |\n";
  } else {
    o << "insufficient-data: " << cox.value("message", "") << "\n";
  }
  o << "\n## Removers\n\n| type | removed | self | more active | fewer active |\n|---|---|---|---|---|\n";
  for (const auto& r : b.at("remover_breakdown")) {
    if (r.at("removed").get<std::size_t>() == 0) continue;
    o << "| " << r.at("debt_type").get<std::string>() << " | " << r.at("removed").get<std::size_t>() << " | " << pct(r.at("self"))
      << " | " << pct(r.at("more_active")) << " | " << pct(r.at("fewer_active")) << " |\n";
  }
  o << "\n## Tests\n\n| analysis | test | groups | statistic | p | status |\n|---|---|---|---|---|---|\n";
  for (const auto& t : b.at("tests")) {
    if (t.at("test") == "cliffs_delta") continue;
    o << "| " << t.at("analysis").get<std::string>() << " | " << t.at("test").get<std::string>() << " | " << t.at("groups").get<std::string>()
      << " | " << cell(t.at("statistic")) << " | " << cell(t.at("p")) << (t.at("significant").get<bool>() ? " *" : "") << " | "
      << t.at("status").get<std::string>() << " |\n";
  }
  o << "\n" << "omnibus test: " << meta.at("omnibus_method").get<std::string>() << "\n";
  return o.str();
}

inline std::string cmd_report(const RunConfig& config) {
  return run_stage("report", config, [&](Stage& st) {
    const fs::path p = config.out_dir() / files::bundle;
    if (!fs::exists(p)) throw Error(ErrorKind::Bundle, "missing analysis bundle " + p.string());
    std::string text;
    json b;
    try {
      text = io::read_file(p);
      b = json::parse(text);
      if (b.value("format", "") != "satd-analysis-bundle") throw Error(ErrorKind::Bundle, "not an analysis bundle");
      st.input(files::bundle, hex64(fnv1a64(text)));
      std::string md = render_report(b);
      json manifest = fs::exists(config.out_dir() / files::manifest) ? json::parse(io::read_file(config.out_dir() / files::manifest)) : json::object();
      md += "\n## Run manifest\n\n";
      md += "- tool: " + std::string(kToolName) + " " + kToolVersion + "\n";
      if (manifest.contains("stages"))
        for (const auto& [stage, info] : manifest.at("stages").items())
          if (stage != "report") md += "- " + stage + ": " + info.value("status", "?") + ", " + std::to_string(info.value("diagnostics", 0)) + " diagnostics\n";
      st.write(files::summary, md);
      return md;
    } catch (const Error& e) {
      throw Error(ErrorKind::Bundle, std::string("corrupted bundle: ") + e.what());
    } catch (const json::exception& e) {
      throw Error(ErrorKind::Bundle, std::string("corrupted bundle: ") + e.what());
    }
  });
}

/// extract -> classify -> track -> analyze -> report.
inline std::string cmd_run(const RunConfig& config) {
  cmd_extract(config);
  cmd_classify(config);
  cmd_track(config);
  cmd_analyze(config);
  return cmd_report(config);
}

} // namespace satd::pipeline
