#pragma once

// Comment lifecycles: introduction and removal events per comment key,
// release-window censoring, remover attribution, survival samples.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "satd/classifier.hpp"
#include "satd/common.hpp"
#include "satd/repo_history.hpp"
#include "satd/survival.hpp"

namespace satd::lifecycle {

using classify::DebtType;
using history::CommitRecord;
using history::Person;

struct CommentKey {
  std::string lineage_id;
  std::string normalized_text;
  std::size_t occurrence_index = 0;
  auto operator<=>(const CommentKey&) const = default;
};

inline std::string comment_key_string(const CommentKey& k) {
  return k.lineage_id + ":" + text_hash(k.normalized_text) + ":" + std::to_string(k.occurrence_index);
}

/// Keys for one file version's comments, in top-to-bottom order.
inline std::vector<CommentKey> keys_for(const std::string& lineage_id, const std::vector<std::string>& texts) {
  std::map<std::string, std::size_t> seen;
  std::vector<CommentKey> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back({lineage_id, t, seen[t]++});
  return out;
}

struct Event {
  std::string commit_id;
  std::size_t ordinal = 0;
  std::int64_t timestamp = 0;
  Person author;
  std::string path;
};

inline Event event_of(const CommitRecord& c, const std::string& path) {
  return {c.commit_id, c.ordinal, c.timestamp, c.author, path};
}

enum class RemovalReason { TextGone, FileDeleted };

inline const char* to_string(RemovalReason r) { return r == RemovalReason::TextGone ? "TextGone" : "FileDeleted"; }

struct Removal {
  Event event;
  RemovalReason reason = RemovalReason::TextGone;
};

struct TrackedComment {
  CommentKey key;
  Event intro;
  std::optional<Removal> removal;
  std::optional<std::string> enclosing_hint;
};

/// One file version reduced to what tracking needs.
struct VersionComments {
  std::string lineage_id;
  std::string path;
  CommitRecord commit;
  bool deleted = false;
  std::vector<std::string> texts;                  // normalized, top to bottom
  std::vector<std::optional<std::string>> hints;   // parallel to texts, may be empty
};

inline constexpr double kEditSimilarity = 0.6;

/// Incremental tracker; feed versions in (ordinal, path) order.
class Tracker {
public:
  explicit Tracker(Diagnostics* diag = nullptr) : diag_(diag) {}

  void feed(const VersionComments& v) {
    if (have_last_ && std::tie(v.commit.ordinal, v.path) < std::tie(last_ordinal_, last_path_)) {
      throw Error(ErrorKind::Data, "track_lineages: versions out of (ordinal, path) order at " + v.path);
    }
    have_last_ = true;
    last_ordinal_ = v.commit.ordinal;
    last_path_ = v.path;

    auto& alive = alive_[v.lineage_id];
    const Event ev = event_of(v.commit, v.path);
    if (v.deleted) {
      for (const auto& [key, idx] : alive) out_[idx].removal = Removal{ev, RemovalReason::FileDeleted};
      alive_.erase(v.lineage_id);
      return;
    }
    const auto keys = keys_for(v.lineage_id, v.texts);
    std::map<CommentKey, std::size_t> next;
    std::vector<std::size_t> introduced, removed;
    for (std::size_t i = 0; i < keys.size(); ++i) {
      auto it = alive.find(keys[i]);
      if (it != alive.end()) {
        next.emplace(keys[i], it->second);
        continue;
      }
      TrackedComment tc;
      tc.key = keys[i];
      tc.intro = ev;
      if (i < v.hints.size()) tc.enclosing_hint = v.hints[i];
      next.emplace(keys[i], out_.size());
      introduced.push_back(out_.size());
      out_.push_back(std::move(tc));
    }
    for (const auto& [key, idx] : alive) {
      if (next.count(key)) continue;
      out_[idx].removal = Removal{ev, RemovalReason::TextGone};
      removed.push_back(idx);
    }
    if (diag_ && !introduced.empty() && !removed.empty()) flag_edits(removed, introduced, ev);
    alive = std::move(next);
  }

  std::vector<TrackedComment> finish() {
    alive_.clear();
    return std::move(out_);
  }

private:
  void flag_edits(const std::vector<std::size_t>& removed, const std::vector<std::size_t>& introduced, const Event& ev) {
    std::set<std::size_t> used;
    for (std::size_t r : removed) {
      for (std::size_t a : introduced) {
        if (used.count(a)) continue;
        const double s = history::token_similarity(out_[r].key.normalized_text, out_[a].key.normalized_text);
        if (s >= kEditSimilarity) {
          used.insert(a);
          diag_->add("track", "edit_like_pair",
                     comment_key_string(out_[r].key) + " -> " + comment_key_string(out_[a].key) + " at " + ev.commit_id +
                         " similarity " + fmt_real(s, 4));
          break;
        }
      }
    }
  }

  Diagnostics* diag_;
  std::map<std::string, std::map<CommentKey, std::size_t>> alive_;
  std::vector<TrackedComment> out_;
  bool have_last_ = false;
  std::size_t last_ordinal_ = 0;
  std::string last_path_;
};

inline std::vector<TrackedComment> track_lineages(const std::vector<VersionComments>& versions, Diagnostics* diag = nullptr) {
  Tracker t(diag);
  for (const auto& v : versions) t.feed(v);
  return t.finish();
}

// ---------------------------------------------------------------------------
// Instances

enum class RemoverClass { Self, MoreActive, FewerActive };

inline const char* to_string(RemoverClass c) {
  switch (c) {
  case RemoverClass::Self: return "Self";
  case RemoverClass::MoreActive: return "MoreActive";
  case RemoverClass::FewerActive: return "FewerActive";
  }
  return "Self";
}

enum class LabelSource { Import, Classifier };

inline const char* to_string(LabelSource s) { return s == LabelSource::Import ? "import" : "classifier"; }

struct SatdInstance {
  CommentKey key;
  DebtType debt_type = DebtType::NotSatd;
  LabelSource label_source = LabelSource::Classifier;
  Event intro;
  std::optional<Removal> removal; // observed removal at or before release
  bool censored = false;
  double duration_days = 0.0;
  std::optional<RemoverClass> remover_class;
};

struct PruneWindow {
  std::string release_commit;
  std::size_t release_ordinal = 0;
  std::int64_t release_time = 0;
  double window_days = 365.0;

  std::int64_t cutoff() const {
    return release_time - static_cast<std::int64_t>(std::llround(window_days * kSecondsPerDay));
  }
};

inline PruneWindow make_window(const std::vector<CommitRecord>& commits, const std::string& release_commit, double window_days) {
  if (!(window_days > 0)) throw Error(ErrorKind::Config, "window days must be > 0");
  for (const auto& c : commits)
    if (c.commit_id == release_commit) return {c.commit_id, c.ordinal, c.timestamp, window_days};
  throw Error(ErrorKind::Config, "release commit not on the analyzed chain: " + release_commit);
}

/// Last ordinal of the censor window: the largest ordinal <= release whose
/// timestamp is at or before the cutoff. nullopt when no commit qualifies.
inline std::optional<std::size_t> window_end_ordinal(const std::vector<CommitRecord>& commits, const PruneWindow& w) {
  std::optional<std::size_t> end;
  for (const auto& c : commits)
    if (c.ordinal <= w.release_ordinal && c.timestamp <= w.cutoff()) end = c.ordinal;
  return end;
}

/// Drop instances introduced inside the window (or after the release), censor
/// everything not removed by the release, and compute durations.
inline std::vector<SatdInstance> apply_censoring(std::vector<SatdInstance> instances, const PruneWindow& w,
                                                 Diagnostics* diag = nullptr, bool drop_window = true) {
  if (!(w.window_days > 0)) throw Error(ErrorKind::Config, "window days must be > 0");
  std::vector<SatdInstance> out;
  out.reserve(instances.size());
  for (auto& inst : instances) {
    if (inst.intro.ordinal > w.release_ordinal) continue;
    if (drop_window && inst.intro.timestamp > w.cutoff()) continue;
    std::int64_t end = w.release_time;
    if (inst.removal && inst.removal->event.ordinal <= w.release_ordinal && inst.removal->event.timestamp <= w.release_time) {
      inst.censored = false;
      end = inst.removal->event.timestamp;
    } else {
      inst.removal.reset();
      inst.censored = true;
      inst.remover_class.reset();
    }
    std::int64_t secs = end - inst.intro.timestamp;
    if (secs < 0) {
      if (diag) diag->add("track", "clock_skew", comment_key_string(inst.key) + " ends before it starts; duration clamped to 0");
      secs = 0;
    }
    inst.duration_days = static_cast<double>(secs) / kSecondsPerDay;
    out.push_back(std::move(inst));
  }
  return out;
}

/// Censoring at the release without the window exclusion.
inline std::vector<SatdInstance> censor_at_release(std::vector<SatdInstance> instances, const PruneWindow& w,
                                                   Diagnostics* diag = nullptr) {
  return apply_censoring(std::move(instances), w, diag, false);
}

inline RemoverClass classify_remover(const SatdInstance& inst, const history::IdentityTable& table,
                                     const history::ActivityIndex& activity) {
  if (inst.censored || !inst.removal) throw Error(ErrorKind::Data, "classify_remover: instance has no observed removal");
  const auto introducer = table.resolve(inst.intro.author);
  const auto remover = table.resolve(inst.removal->event.author);
  if (introducer == remover && introducer != history::IdentityTable::npos) return RemoverClass::Self;
  const auto t = inst.removal->event.timestamp;
  return activity.count_at(remover, t) > activity.count_at(introducer, t) ? RemoverClass::MoreActive
                                                                          : RemoverClass::FewerActive;
}

inline RemoverClass classify_remover(const SatdInstance& inst, const history::IdentityTable& table,
                                     const std::vector<CommitRecord>& commits) {
  return classify_remover(inst, table, history::ActivityIndex(commits, table));
}

// ---------------------------------------------------------------------------
// Survival samples

struct CovariateScheme {
  DebtType baseline = DebtType::NotSatd;
  std::vector<DebtType> indicators; // one 0/1 covariate each
};

/// Indicators for every type present in `instances` except the baseline, in taxonomy order.
inline CovariateScheme one_hot_scheme(const std::vector<SatdInstance>& instances, DebtType baseline = DebtType::NotSatd) {
  std::set<DebtType> present;
  for (const auto& i : instances) present.insert(i.debt_type);
  CovariateScheme s;
  s.baseline = baseline;
  for (DebtType t : classify::kDebtTypes)
    if (t != baseline && present.count(t)) s.indicators.push_back(t);
  if (baseline != DebtType::NotSatd && present.count(DebtType::NotSatd)) s.indicators.push_back(DebtType::NotSatd);
  return s;
}

inline survival::SurvivalData to_survival_samples(const std::vector<SatdInstance>& instances, const CovariateScheme& scheme) {
  survival::SurvivalData d;
  for (DebtType t : scheme.indicators) d.covariate_names.emplace_back(classify::to_string(t));
  d.samples.reserve(instances.size());
  for (const auto& inst : instances) {
    if (!(inst.duration_days >= 0) || !std::isfinite(inst.duration_days))
      throw Error(ErrorKind::Data, "negative duration for " + comment_key_string(inst.key));
    survival::SurvivalSample s;
    s.duration = inst.duration_days;
    s.event = !inst.censored;
    for (DebtType t : scheme.indicators) s.covariates.push_back(inst.debt_type == t ? 1.0 : 0.0);
    d.samples.push_back(std::move(s));
  }
  return d;
}

inline std::vector<survival::SurvivalSample> samples_of_type(const std::vector<SatdInstance>& instances, DebtType t) {
  std::vector<survival::SurvivalSample> out;
  for (const auto& inst : instances)
    if (inst.debt_type == t) out.push_back({inst.duration_days, !inst.censored, {}});
  return out;
}

// ---------------------------------------------------------------------------
// Labels

/// Imported labels: `comment_key,debt_type` CSV with header. NOT_SATD is allowed.
inline std::map<std::string, DebtType> read_label_import(std::string_view csv_text) {
  auto rows = io::parse_csv(csv_text);
  if (rows.empty()) throw Error(ErrorKind::Corpus, "label import: empty file");
  const auto& h = rows[0];
  if (h.size() < 2 || h[0] != "comment_key" || h[1] != "debt_type")
    throw Error(ErrorKind::Corpus, "label import: header must be comment_key,debt_type");
  std::map<std::string, DebtType> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() < 2) throw Error(ErrorKind::Corpus, "label import: short row " + std::to_string(r + 1));
    auto t = classify::parse_debt_type(rows[r][1]);
    if (!t) throw Error(ErrorKind::Corpus, "label import: unknown debt type '" + rows[r][1] + "' on row " + std::to_string(r + 1));
    out[rows[r][0]] = *t;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Serialization

inline io::json event_json(const Event& e) {
  return {{"commit", e.commit_id}, {"ordinal", e.ordinal}, {"time", e.timestamp}, {"author", e.author.name + " <" + e.author.email + ">"}};
}

inline io::json instance_json(const SatdInstance& i) {
  io::json j;
  j["lineage_id"] = i.key.lineage_id;
  j["text_hash"] = text_hash(i.key.normalized_text);
  j["occurrence_index"] = i.key.occurrence_index;
  j["debt_type"] = classify::to_string(i.debt_type);
  j["label_source"] = to_string(i.label_source);
  j["intro_commit"] = i.intro.commit_id;
  j["intro_ordinal"] = i.intro.ordinal;
  j["intro_time"] = i.intro.timestamp;
  j["intro_author"] = i.intro.author.name + " <" + i.intro.author.email + ">";
  j["intro_path"] = i.intro.path;
  if (i.removal) {
    j["removal_commit"] = i.removal->event.commit_id;
    j["removal_ordinal"] = i.removal->event.ordinal;
    j["removal_time"] = i.removal->event.timestamp;
    j["removal_author"] = i.removal->event.author.name + " <" + i.removal->event.author.email + ">";
    j["removal_reason"] = to_string(i.removal->reason);
  } else {
    j["removal_commit"] = nullptr;
    j["removal_ordinal"] = nullptr;
    j["removal_time"] = nullptr;
    j["removal_author"] = nullptr;
    j["removal_reason"] = nullptr;
  }
  j["censored"] = i.censored;
  j["duration_days"] = std::stod(fmt_real(i.duration_days, 6));
  j["remover_class"] = i.remover_class ? io::json(to_string(*i.remover_class)) : io::json(nullptr);
  j["text"] = i.key.normalized_text;
  return j;
}

inline Person parse_author(const std::string& s) {
  const auto lt = s.rfind(" <");
  if (lt == std::string::npos || s.empty() || s.back() != '>') return {s, ""};
  return {s.substr(0, lt), s.substr(lt + 2, s.size() - lt - 3)};
}

inline SatdInstance instance_from_json(const io::json& j) {
  SatdInstance i;
  i.key.lineage_id = j.at("lineage_id").get<std::string>();
  i.key.normalized_text = j.at("text").get<std::string>();
  i.key.occurrence_index = j.at("occurrence_index").get<std::size_t>();
  auto t = classify::parse_debt_type(j.at("debt_type").get<std::string>());
  if (!t) throw Error(ErrorKind::Data, "instance: bad debt_type");
  i.debt_type = *t;
  i.label_source = j.at("label_source").get<std::string>() == "import" ? LabelSource::Import : LabelSource::Classifier;
  i.intro = {j.at("intro_commit").get<std::string>(), j.at("intro_ordinal").get<std::size_t>(),
             j.at("intro_time").get<std::int64_t>(), parse_author(j.at("intro_author").get<std::string>()),
             j.at("intro_path").get<std::string>()};
  if (!j.at("removal_commit").is_null()) {
    Removal r;
    r.event = {j.at("removal_commit").get<std::string>(), j.at("removal_ordinal").get<std::size_t>(),
               j.at("removal_time").get<std::int64_t>(), parse_author(j.at("removal_author").get<std::string>()), ""};
    r.reason = j.at("removal_reason").get<std::string>() == "FileDeleted" ? RemovalReason::FileDeleted : RemovalReason::TextGone;
    i.removal = r;
  }
  i.censored = j.at("censored").get<bool>();
  i.duration_days = j.at("duration_days").get<double>();
  if (!j.at("remover_class").is_null()) {
    const auto rc = j.at("remover_class").get<std::string>();
    i.remover_class = rc == "Self" ? RemoverClass::Self : rc == "MoreActive" ? RemoverClass::MoreActive : RemoverClass::FewerActive;
  }
  return i;
}

} // namespace satd::lifecycle
