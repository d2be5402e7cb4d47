#pragma once

// Mainline history of a git repository: first-parent linearization, per-file
// version stream with rename tracking, and author identity resolution.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "satd/comment_extract.hpp"
#include "satd/common.hpp"
#include "satd/process.hpp"

namespace satd::history {

using comments::Language;

struct Person {
  std::string name;
  std::string email;
  auto operator<=>(const Person&) const = default;
};

struct CommitRecord {
  std::string commit_id;
  std::int64_t timestamp = 0; // author time, UTC seconds
  Person author;
  std::size_t ordinal = 0;
};

enum class ChangeKind { Added, Modified, Renamed, Deleted };

inline const char* to_string(ChangeKind k) {
  switch (k) {
  case ChangeKind::Added: return "Added";
  case ChangeKind::Modified: return "Modified";
  case ChangeKind::Renamed: return "Renamed";
  case ChangeKind::Deleted: return "Deleted";
  }
  return "Added";
}

inline std::optional<ChangeKind> parse_change_kind(std::string_view s) {
  if (s == "Added") return ChangeKind::Added;
  if (s == "Modified") return ChangeKind::Modified;
  if (s == "Renamed") return ChangeKind::Renamed;
  if (s == "Deleted") return ChangeKind::Deleted;
  return std::nullopt;
}

struct FileVersion {
  std::string lineage_id;
  std::string path;
  std::string previous_path; // set for Renamed
  CommitRecord commit;
  ChangeKind change_kind = ChangeKind::Added;
  Language language = Language::Other;
  std::string blob_id;               // empty for Deleted
  std::optional<std::string> content; // absent for Deleted
};

// ---------------------------------------------------------------------------
// Languages

using ExtensionMap = std::map<std::string, Language>;

inline ExtensionMap default_extension_map() {
  return {{".c", Language::C},     {".h", Language::C},     {".cc", Language::Cpp},  {".cpp", Language::Cpp},
          {".cxx", Language::Cpp}, {".hpp", Language::Cpp}, {".hh", Language::Cpp},  {".cu", Language::Cpp},
          {".java", Language::Java}, {".py", Language::Python}};
}

inline std::optional<Language> language_for(std::string_view path, const ExtensionMap& map) {
  const auto slash = path.rfind('/');
  const auto dot = path.rfind('.');
  if (dot == std::string_view::npos || (slash != std::string_view::npos && dot < slash)) return std::nullopt;
  std::string ext(path.substr(dot));
  for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  auto it = map.find(ext);
  if (it == map.end()) return std::nullopt;
  return it->second;
}

// ---------------------------------------------------------------------------
// Linearization

inline void require_repository(const std::filesystem::path& repo) {
  if (!std::filesystem::exists(repo)) throw Error(ErrorKind::Repository, "missing repository: " + repo.string());
  auto r = proc::git(repo, {"rev-parse", "--git-dir"});
  if (r.exit_code != 0) throw Error(ErrorKind::Repository, "missing repository: " + repo.string());
}

/// Full commit id for a revision, or nullopt.
inline std::optional<std::string> resolve_revision(const std::filesystem::path& repo, const std::string& rev) {
  if (rev.empty()) return std::nullopt;
  auto r = proc::git(repo, {"rev-parse", "--verify", "--quiet", rev + "^{commit}"});
  if (r.exit_code != 0) return std::nullopt;
  std::string id = r.out;
  while (!id.empty() && (id.back() == '\n' || id.back() == '\r')) id.pop_back();
  return id;
}

/// First-parent chain of `branch`, oldest first, ordinals 0..N-1.
inline std::vector<CommitRecord> linearize_history(const std::filesystem::path& repo, const std::string& branch) {
  require_repository(repo);
  if (branch.empty()) throw Error(ErrorKind::Repository, "missing branch: (empty branch name)");
  auto tip = resolve_revision(repo, branch);
  if (!tip) throw Error(ErrorKind::Repository, "missing branch: " + branch);
  auto r = proc::git(repo, {"log", "--first-parent", "--reverse", "--no-color",
                            "--format=%H%x1f%at%x1f%an%x1f%ae%x1e", *tip});
  if (r.exit_code != 0) throw Error(ErrorKind::Repository, "unreadable object store: " + r.err);
  std::vector<CommitRecord> out;
  std::size_t pos = 0;
  while (pos < r.out.size()) {
    std::size_t end = r.out.find('\x1e', pos);
    if (end == std::string::npos) break;
    std::string_view rec(r.out.data() + pos, end - pos);
    while (!rec.empty() && (rec.front() == '\n' || rec.front() == '\r')) rec.remove_prefix(1);
    std::vector<std::string> f;
    std::size_t p = 0;
    for (;;) {
      std::size_t q = rec.find('\x1f', p);
      f.emplace_back(rec.substr(p, q == std::string_view::npos ? std::string_view::npos : q - p));
      if (q == std::string_view::npos) break;
      p = q + 1;
    }
    if (f.size() != 4) throw Error(ErrorKind::Repository, "unreadable object store: bad log record");
    CommitRecord c;
    c.commit_id = f[0];
    c.timestamp = std::stoll(f[1]);
    c.author = {f[2], f[3]};
    c.ordinal = out.size();
    out.push_back(std::move(c));
    pos = end + 1;
  }
  if (out.empty()) throw Error(ErrorKind::Repository, "missing branch: " + branch + " has no commits");
  return out;
}

/// Number of commits reachable from `rev` through all parents.
inline std::size_t count_all_ancestors(const std::filesystem::path& repo, const std::string& rev) {
  auto r = proc::git(repo, {"rev-list", "--count", rev});
  if (r.exit_code != 0) throw Error(ErrorKind::Repository, "rev-list failed: " + r.err);
  return static_cast<std::size_t>(std::stoull(r.out));
}

// ---------------------------------------------------------------------------
// Rename detection

struct TreeEntry {
  std::string path;
  std::string blob_id;
  std::string content;
};

struct RenamePair {
  std::string old_path;
  std::string new_path;
  double similarity = 0.0;
};

using TokenCounts = std::unordered_map<std::string_view, std::uint32_t>;

inline TokenCounts whitespace_tokens(std::string_view text, std::size_t* total = nullptr) {
  TokenCounts counts;
  std::size_t n = 0, i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    if (j > i) {
      ++counts[text.substr(i, j - i)];
      ++n;
    }
    i = j;
  }
  if (total) *total = n;
  return counts;
}

/// Dice coefficient over whitespace-token multisets: 2|A∩B| / (|A| + |B|).
inline double token_similarity(std::string_view a, std::string_view b) {
  std::size_t na = 0, nb = 0;
  auto ca = whitespace_tokens(a, &na);
  auto cb = whitespace_tokens(b, &nb);
  if (na + nb == 0) return 1.0;
  std::size_t common = 0;
  for (const auto& [tok, n] : ca) {
    auto it = cb.find(tok);
    if (it != cb.end()) common += std::min(n, it->second);
  }
  return 2.0 * static_cast<double>(common) / static_cast<double>(na + nb);
}

inline constexpr double kDefaultRenameThreshold = 0.6;
inline constexpr std::size_t kInexactRenameLimit = 250000; // removed x added pairs

/// Pair removed paths with added paths. Identical blobs pair first (similarity 1);
/// the rest pair greedily by descending similarity >= threshold. Each path is used once.
inline std::vector<RenamePair> detect_renames(const std::vector<TreeEntry>& removed, const std::vector<TreeEntry>& added,
                                              double threshold, Diagnostics* diag = nullptr) {
  if (!(threshold > 0.0 && threshold <= 1.0)) throw Error(ErrorKind::Data, "detect_renames: threshold must lie in (0,1]");
  std::vector<std::size_t> ri(removed.size()), ai(added.size());
  for (std::size_t i = 0; i < ri.size(); ++i) ri[i] = i;
  for (std::size_t i = 0; i < ai.size(); ++i) ai[i] = i;
  std::sort(ri.begin(), ri.end(), [&](auto x, auto y) { return removed[x].path < removed[y].path; });
  std::sort(ai.begin(), ai.end(), [&](auto x, auto y) { return added[x].path < added[y].path; });
  std::vector<bool> used_r(removed.size(), false), used_a(added.size(), false);
  std::vector<RenamePair> out;
  for (std::size_t a : ai) {
    for (std::size_t r : ri) {
      if (used_r[r] || removed[r].blob_id != added[a].blob_id) continue;
      used_r[r] = used_a[a] = true;
      out.push_back({removed[r].path, added[a].path, 1.0});
      break;
    }
  }
  std::size_t left_r = 0, left_a = 0;
  for (bool u : used_r) left_r += u ? 0 : 1;
  for (bool u : used_a) left_a += u ? 0 : 1;
  if (left_r == 0 || left_a == 0) return out;
  if (left_r * left_a > kInexactRenameLimit) {
    if (diag) diag->add("history", "rename_limit", "too many rename candidates; inexact detection skipped");
    return out;
  }
  struct Cand { double sim; std::size_t r, a; };
  std::vector<Cand> cands;
  for (std::size_t r : ri) {
    if (used_r[r]) continue;
    for (std::size_t a : ai) {
      if (used_a[a]) continue;
      const double s = token_similarity(removed[r].content, added[a].content);
      if (s >= threshold) cands.push_back({s, r, a});
    }
  }
  std::stable_sort(cands.begin(), cands.end(), [&](const Cand& x, const Cand& y) {
    if (x.sim != y.sim) return x.sim > y.sim;
    if (removed[x.r].path != removed[y.r].path) return removed[x.r].path < removed[y.r].path;
    return added[x.a].path < added[y.a].path;
  });
  for (const auto& c : cands) {
    if (used_r[c.r] || used_a[c.a]) continue;
    used_r[c.r] = used_a[c.a] = true;
    out.push_back({removed[c.r].path, added[c.a].path, c.sim});
  }
  return out;
}

/// Tree-to-tree form: candidates are paths present in only one of the two trees.
inline std::vector<RenamePair> detect_renames(const std::map<std::string, TreeEntry>& prev_tree,
                                              const std::map<std::string, TreeEntry>& next_tree, double threshold) {
  std::vector<TreeEntry> removed, added;
  for (const auto& [p, e] : prev_tree)
    if (!next_tree.count(p)) removed.push_back(e);
  for (const auto& [p, e] : next_tree)
    if (!prev_tree.count(p)) added.push_back(e);
  return detect_renames(removed, added, threshold);
}

// ---------------------------------------------------------------------------
// File version enumeration

inline std::string make_lineage_id(const std::string& commit_id, const std::string& path) {
  return hex64(fnv1a64(commit_id + ":" + path));
}

struct EnumerateOptions {
  ExtensionMap extensions = default_extension_map();
  double rename_threshold = kDefaultRenameThreshold;
  bool load_content = true;
};

struct RawChange {
  std::string old_mode, new_mode, old_blob, new_blob;
  char status = 'M';
  std::string path;
};

inline bool is_regular_mode(std::string_view mode) { return mode == "100644" || mode == "100755" || mode == "100664"; }

inline std::vector<RawChange> diff_tree(const std::filesystem::path& repo, const std::string& parent, const std::string& commit) {
  std::vector<std::string> args = {"diff-tree", "-r", "--no-renames", "--no-abbrev", "-z", "--no-commit-id"};
  if (parent.empty()) {
    args.push_back("--root");
    args.push_back(commit);
  } else {
    args.push_back(parent);
    args.push_back(commit);
  }
  auto r = proc::git(repo, std::move(args));
  if (r.exit_code != 0) throw Error(ErrorKind::Repository, "unreadable object store: diff-tree " + commit + ": " + r.err);
  std::vector<RawChange> out;
  std::size_t pos = 0;
  const std::string& s = r.out;
  while (pos < s.size()) {
    if (s[pos] != ':') {
      ++pos;
      continue;
    }
    const std::size_t meta_end = s.find('\0', pos);
    if (meta_end == std::string::npos) break;
    std::string_view meta(s.data() + pos + 1, meta_end - pos - 1);
    const std::size_t path_end = s.find('\0', meta_end + 1);
    if (path_end == std::string::npos) break;
    RawChange c;
    std::vector<std::string> parts;
    std::size_t p = 0;
    while (p < meta.size()) {
      std::size_t q = meta.find(' ', p);
      if (q == std::string_view::npos) q = meta.size();
      parts.emplace_back(meta.substr(p, q - p));
      p = q + 1;
    }
    if (parts.size() >= 5) {
      c.old_mode = parts[0];
      c.new_mode = parts[1];
      c.old_blob = parts[2];
      c.new_blob = parts[3];
      c.status = parts[4].empty() ? 'M' : parts[4][0];
      c.path = s.substr(meta_end + 1, path_end - meta_end - 1);
      out.push_back(std::move(c));
    }
    pos = path_end + 1;
  }
  return out;
}

/// Stream every version of every matching file along the chain. Per commit,
/// versions are delivered in path order.
inline void enumerate_file_versions(const std::filesystem::path& repo, const std::vector<CommitRecord>& commits,
                                    const EnumerateOptions& options,
                                    const std::function<void(FileVersion&&)>& sink, Diagnostics* diag = nullptr) {
  if (commits.empty()) throw Error(ErrorKind::Data, "enumerate_file_versions: no commits");
  proc::BlobReader blobs(repo);
  std::map<std::string, std::string> lineage_of; // live path -> lineage
  auto fetch = [&](const std::string& blob, const std::string& path, std::string& content) {
    if (blobs.read(blob, content)) return true;
    if (diag) diag->add("history", "unreadable_blob", "cannot read blob " + blob + " for " + path);
    return false;
  };

  for (std::size_t k = 0; k < commits.size(); ++k) {
    const auto& commit = commits[k];
    const std::string parent = k == 0 ? std::string() : commits[k - 1].commit_id;
    auto changes = diff_tree(repo, parent, commit.commit_id);

    struct Pending { std::string path; std::string blob; };
    std::vector<TreeEntry> removed, added;
    std::vector<Pending> modified;
    for (const auto& c : changes) {
      if (!language_for(c.path, options.extensions)) continue;
      const bool old_regular = is_regular_mode(c.old_mode);
      const bool new_regular = is_regular_mode(c.new_mode);
      switch (c.status) {
      case 'A':
        if (new_regular) added.push_back({c.path, c.new_blob, {}});
        break;
      case 'D':
        if (old_regular) removed.push_back({c.path, c.old_blob, {}});
        break;
      case 'M':
      case 'T':
        if (new_regular && old_regular) {
          if (c.old_blob != c.new_blob) modified.push_back({c.path, c.new_blob});
        } else if (new_regular) {
          added.push_back({c.path, c.new_blob, {}});
        } else if (old_regular) {
          removed.push_back({c.path, c.old_blob, {}});
        }
        break;
      default:
        break;
      }
    }

    // Inexact rename detection needs content; identical blobs do not.
    std::vector<RenamePair> renames;
    if (!removed.empty() && !added.empty()) {
      std::set<std::string> removed_blobs;
      for (const auto& r : removed) removed_blobs.insert(r.blob_id);
      bool need_content = false;
      for (const auto& a : added)
        if (!removed_blobs.count(a.blob_id)) need_content = true;
      if (need_content) {
        for (auto& r : removed) fetch(r.blob_id, r.path, r.content);
        for (auto& a : added) fetch(a.blob_id, a.path, a.content);
      }
      renames = detect_renames(removed, added, options.rename_threshold, diag);
    }

    std::vector<FileVersion> out;
    std::set<std::string> renamed_old, renamed_new;
    std::map<std::string, std::string> rename_source;
    for (const auto& r : renames) {
      renamed_old.insert(r.old_path);
      renamed_new.insert(r.new_path);
      rename_source[r.new_path] = r.old_path;
    }
    auto make = [&](const std::string& path, ChangeKind kind, const std::string& blob) {
      FileVersion v;
      v.path = path;
      v.commit = commit;
      v.change_kind = kind;
      v.language = *language_for(path, options.extensions);
      v.blob_id = blob;
      return v;
    };

    for (const auto& r : removed) {
      if (renamed_old.count(r.path)) continue;
      auto it = lineage_of.find(r.path);
      if (it == lineage_of.end()) continue;
      auto v = make(r.path, ChangeKind::Deleted, {});
      v.lineage_id = it->second;
      lineage_of.erase(it);
      out.push_back(std::move(v));
    }
    std::map<std::string, std::string> carried;
    for (const auto& [np, op] : rename_source) {
      auto it = lineage_of.find(op);
      carried[np] = it != lineage_of.end() ? it->second : make_lineage_id(commit.commit_id, np);
      if (it != lineage_of.end()) lineage_of.erase(it);
    }
    for (const auto& a : added) {
      FileVersion v;
      if (renamed_new.count(a.path)) {
        v = make(a.path, ChangeKind::Renamed, a.blob_id);
        v.previous_path = rename_source[a.path];
        v.lineage_id = carried[a.path];
      } else {
        v = make(a.path, ChangeKind::Added, a.blob_id);
        v.lineage_id = make_lineage_id(commit.commit_id, a.path);
      }
      lineage_of[a.path] = v.lineage_id;
      out.push_back(std::move(v));
    }
    for (const auto& m : modified) {
      auto it = lineage_of.find(m.path);
      FileVersion v;
      if (it == lineage_of.end()) {
        v = make(m.path, ChangeKind::Added, m.blob);
        v.lineage_id = make_lineage_id(commit.commit_id, m.path);
        lineage_of[m.path] = v.lineage_id;
      } else {
        v = make(m.path, ChangeKind::Modified, m.blob);
        v.lineage_id = it->second;
      }
      out.push_back(std::move(v));
    }
    std::sort(out.begin(), out.end(), [](const FileVersion& a, const FileVersion& b) { return a.path < b.path; });
    for (auto& v : out) {
      if (options.load_content && v.change_kind != ChangeKind::Deleted) {
        std::string content;
        if (!fetch(v.blob_id, v.path, content)) continue;
        v.content = std::move(content);
      }
      sink(std::move(v));
    }
  }
}

inline std::vector<FileVersion> enumerate_file_versions(const std::filesystem::path& repo,
                                                        const std::vector<CommitRecord>& commits,
                                                        const EnumerateOptions& options = {},
                                                        Diagnostics* diag = nullptr) {
  std::vector<FileVersion> out;
  enumerate_file_versions(repo, commits, options, [&](FileVersion&& v) { out.push_back(std::move(v)); }, diag);
  return out;
}

// ---------------------------------------------------------------------------
// Identities

inline std::string lowercase(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

struct MailmapEntry {
  std::string proper_name;  // may be empty
  std::string proper_email; // may be empty
  std::string commit_name;  // may be empty (match any name)
  std::string commit_email;
};

/// Parse mailmap text. Supported forms:
///   Proper Name <commit@email>
///   <proper@email> <commit@email>
///   Proper Name <proper@email> <commit@email>
///   Proper Name <proper@email> Commit Name <commit@email>
inline std::vector<MailmapEntry> parse_mailmap(std::string_view text) {
  std::vector<MailmapEntry> out;
  std::size_t pos = 0;
  int line_no = 0;
  auto trim = [](std::string_view v) {
    while (!v.empty() && std::isspace(static_cast<unsigned char>(v.front()))) v.remove_prefix(1);
    while (!v.empty() && std::isspace(static_cast<unsigned char>(v.back()))) v.remove_suffix(1);
    return std::string(v);
  };
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    ++line_no;
    pos = nl + 1;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      // '#' only starts a comment outside <...>
      const auto lt = line.rfind('<', hash), gt = line.rfind('>', hash);
      if (lt == std::string_view::npos || (gt != std::string_view::npos && gt > lt)) line = line.substr(0, hash);
    }
    if (trim(line).empty()) {
      if (nl == text.size()) break;
      continue;
    }
    std::vector<std::pair<std::string, std::string>> parts; // (name before, email)
    std::size_t p = 0;
    bool bad = false;
    while (p < line.size()) {
      const auto lt = line.find('<', p);
      if (lt == std::string_view::npos) {
        if (!trim(line.substr(p)).empty()) bad = true;
        break;
      }
      const auto gt = line.find('>', lt);
      if (gt == std::string_view::npos) { bad = true; break; }
      parts.emplace_back(trim(line.substr(p, lt - p)), trim(line.substr(lt + 1, gt - lt - 1)));
      p = gt + 1;
    }
    if (bad || parts.empty() || parts.size() > 2 || parts.back().second.empty())
      throw Error(ErrorKind::Config, "malformed mailmap line " + std::to_string(line_no));
    MailmapEntry e;
    if (parts.size() == 1) {
      if (parts[0].first.empty()) throw Error(ErrorKind::Config, "malformed mailmap line " + std::to_string(line_no));
      e.proper_name = parts[0].first;
      e.commit_email = parts[0].second;
    } else {
      e.proper_name = parts[0].first;
      e.proper_email = parts[0].second;
      e.commit_name = parts[1].first;
      e.commit_email = parts[1].second;
    }
    out.push_back(std::move(e));
    if (nl == text.size()) break;
  }
  return out;
}

struct AuthorIdentity {
  std::string canonical_name;
  std::string canonical_email; // lowercase, nonempty
  std::set<std::pair<std::string, std::string>> aliases;
};

/// Identity table, read-only once built.
class IdentityTable {
public:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  const std::vector<AuthorIdentity>& identities() const { return identities_; }

  std::size_t resolve(const Person& p) const {
    auto it = by_alias_.find({p.name, p.email});
    if (it != by_alias_.end()) return it->second;
    auto e = by_email_.find(lowercase(p.email));
    if (e != by_email_.end()) return e->second;
    return npos;
  }

  const AuthorIdentity& at(std::size_t i) const { return identities_.at(i); }

private:
  friend IdentityTable merge_identities(const std::vector<Person>&, const std::vector<MailmapEntry>*);
  std::vector<AuthorIdentity> identities_;
  std::map<std::pair<std::string, std::string>, std::size_t> by_alias_;
  std::map<std::string, std::size_t> by_email_;
};

/// Merge raw authors by mailmap rules, then by case-folded email. The first
/// raw spelling seen wins the canonical name unless the mailmap supplies one.
inline IdentityTable merge_identities(const std::vector<Person>& raw_authors, const std::vector<MailmapEntry>* mailmap) {
  auto apply = [&](const Person& p) {
    Person out{p.name, p.email};
    std::string proper_name;
    if (mailmap) {
      const MailmapEntry* hit = nullptr;
      for (const auto& e : *mailmap)
        if (lowercase(e.commit_email) == lowercase(p.email) && !e.commit_name.empty() && e.commit_name == p.name) hit = &e;
      if (!hit)
        for (const auto& e : *mailmap)
          if (lowercase(e.commit_email) == lowercase(p.email) && e.commit_name.empty()) hit = &e;
      if (hit) {
        if (!hit->proper_email.empty()) out.email = hit->proper_email;
        proper_name = hit->proper_name;
      }
    }
    return std::pair{out, proper_name};
  };
  struct Group {
    std::string first_name;
    std::string mailmap_name;
    std::set<std::pair<std::string, std::string>> aliases;
  };
  std::map<std::string, Group> groups;
  for (const auto& p : raw_authors) {
    auto [mapped, proper_name] = apply(p);
    std::string key = lowercase(mapped.email);
    if (key.empty()) key = "unknown:" + lowercase(mapped.name);
    auto& g = groups[key];
    if (g.aliases.empty()) g.first_name = mapped.name;
    if (g.mailmap_name.empty() && !proper_name.empty()) g.mailmap_name = proper_name;
    g.aliases.insert({p.name, p.email});
  }
  IdentityTable table;
  for (auto& [key, g] : groups) {
    AuthorIdentity id;
    id.canonical_email = key;
    id.canonical_name = g.mailmap_name.empty() ? g.first_name : g.mailmap_name;
    id.aliases = g.aliases;
    const std::size_t idx = table.identities_.size();
    for (const auto& a : id.aliases) {
      table.by_alias_[a] = idx;
      table.by_email_.emplace(lowercase(a.second), idx);
    }
    table.by_email_[key] = idx;
    table.identities_.push_back(std::move(id));
  }
  return table;
}

inline IdentityTable merge_identities(const std::vector<CommitRecord>& commits, const std::vector<MailmapEntry>* mailmap) {
  std::vector<Person> raw;
  for (const auto& c : commits) raw.push_back(c.author);
  return merge_identities(raw, mailmap);
}

/// Commits in the chain by `identity` with timestamp <= time.
inline std::size_t commit_count_at(std::size_t identity, std::int64_t time, const std::vector<CommitRecord>& commits,
                                   const IdentityTable& table) {
  std::size_t n = 0;
  for (const auto& c : commits)
    if (c.timestamp <= time && table.resolve(c.author) == identity) ++n;
  return n;
}

/// Per-identity sorted timestamps for repeated commit_count_at queries.
class ActivityIndex {
public:
  ActivityIndex(const std::vector<CommitRecord>& commits, const IdentityTable& table) {
    for (const auto& c : commits) times_[table.resolve(c.author)].push_back(c.timestamp);
    for (auto& [id, ts] : times_) std::sort(ts.begin(), ts.end());
  }

  std::size_t count_at(std::size_t identity, std::int64_t time) const {
    auto it = times_.find(identity);
    if (it == times_.end()) return 0;
    return static_cast<std::size_t>(std::upper_bound(it->second.begin(), it->second.end(), time) - it->second.begin());
  }

private:
  std::map<std::size_t, std::vector<std::int64_t>> times_;
};

} // namespace satd::history
