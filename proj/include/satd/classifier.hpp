#pragma once

// SATD detection: word features, Information Gain selection, one multinomial
// naive Bayes sub-model per project, majority voting across sub-models.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "satd/common.hpp"
#include "satd/io.hpp"
#include "satd/special_functions.hpp"

namespace satd::classify {

enum class DebtType { Design, Defect, Documentation, Requirement, Test, Compatibility, Algorithm, NotSatd };

inline constexpr DebtType kDebtTypes[] = {DebtType::Design,        DebtType::Defect,        DebtType::Documentation,
                                          DebtType::Requirement,   DebtType::Test,          DebtType::Compatibility,
                                          DebtType::Algorithm};

inline const char* to_string(DebtType t) {
  switch (t) {
  case DebtType::Design: return "Design";
  case DebtType::Defect: return "Defect";
  case DebtType::Documentation: return "Documentation";
  case DebtType::Requirement: return "Requirement";
  case DebtType::Test: return "Test";
  case DebtType::Compatibility: return "Compatibility";
  case DebtType::Algorithm: return "Algorithm";
  case DebtType::NotSatd: return "NotSatd";
  }
  return "NotSatd";
}

/// Accepts the enum names case-insensitively, plus NOT_SATD.
inline std::optional<DebtType> parse_debt_type(std::string_view s) {
  std::string lower;
  for (char c : s)
    if (c != '_' && c != ' ' && c != '-') lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (lower.size() > 4 && lower.ends_with("debt")) lower.resize(lower.size() - 4);
  static const std::map<std::string, DebtType> names = {
      {"design", DebtType::Design},           {"defect", DebtType::Defect},
      {"documentation", DebtType::Documentation}, {"requirement", DebtType::Requirement},
      {"test", DebtType::Test},               {"compatibility", DebtType::Compatibility},
      {"algorithm", DebtType::Algorithm},     {"notsatd", DebtType::NotSatd}};
  auto it = names.find(lower);
  if (it == names.end()) return std::nullopt;
  return it->second;
}

inline constexpr std::string_view kSatd = "SATD";
inline constexpr std::string_view kNotSatd = "NOT_SATD";

// ---------------------------------------------------------------------------
// Features

using TokenBag = std::map<std::string, std::uint32_t>;

/// Case-folded runs of [A-Za-z0-9_], dropping tokens shorter than 2 characters.
inline TokenBag preprocess(std::string_view text) {
  TokenBag bag;
  std::string cur;
  auto flush = [&] {
    if (cur.size() >= 2) ++bag[cur];
    cur.clear();
  };
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c) || c == '_') cur.push_back(static_cast<char>(std::tolower(c)));
    else flush();
  }
  flush();
  return bag;
}

struct CorpusEntry {
  std::string project;
  std::string text;
  std::string label; // class label as it appears in the model
};

struct TrainingCorpus {
  std::vector<CorpusEntry> entries;
};

enum class Mode { Binary, Typed };

/// Read `project,label,text` CSV. Binary mode folds any debt-type label into SATD;
/// typed mode keeps only entries that carry a debt type (NOT_SATD becomes NotSatd).
inline TrainingCorpus read_corpus_csv(std::string_view csv_text, Mode mode) {
  auto rows = io::parse_csv(csv_text);
  if (rows.empty()) throw Error(ErrorKind::Corpus, "corpus: empty file");
  const auto& header = rows.front();
  int ip = -1, il = -1, it = -1;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == "project") ip = static_cast<int>(i);
    else if (header[i] == "label") il = static_cast<int>(i);
    else if (header[i] == "text") it = static_cast<int>(i);
  }
  if (ip < 0 || il < 0 || it < 0) throw Error(ErrorKind::Corpus, "corpus: header must contain project,label,text");
  TrainingCorpus corpus;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const auto need = static_cast<std::size_t>(std::max({ip, il, it}));
    if (row.size() <= need) throw Error(ErrorKind::Corpus, "corpus: short row " + std::to_string(r + 1));
    const std::string& raw = row[static_cast<std::size_t>(il)];
    std::string label;
    if (mode == Mode::Binary) {
      if (raw == kSatd) label = kSatd;
      else if (raw == kNotSatd) label = kNotSatd;
      else if (auto t = parse_debt_type(raw)) label = *t == DebtType::NotSatd ? kNotSatd : kSatd;
      else throw Error(ErrorKind::Corpus, "corpus: unknown label '" + raw + "' on row " + std::to_string(r + 1));
    } else {
      if (raw == kSatd) continue; // untyped positive
      if (raw == kNotSatd) label = to_string(DebtType::NotSatd);
      else if (auto t = parse_debt_type(raw)) label = to_string(*t);
      else throw Error(ErrorKind::Corpus, "corpus: unknown label '" + raw + "' on row " + std::to_string(r + 1));
    }
    corpus.entries.push_back({row[static_cast<std::size_t>(ip)], sanitize_utf8(row[static_cast<std::size_t>(it)]), label});
  }
  return corpus;
}

inline bool corpus_has_types(std::string_view csv_text) {
  auto rows = io::parse_csv(csv_text);
  if (rows.empty()) return false;
  int il = -1;
  for (std::size_t i = 0; i < rows.front().size(); ++i)
    if (rows.front()[i] == "label") il = static_cast<int>(i);
  if (il < 0) return false;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() <= static_cast<std::size_t>(il)) continue;
    auto t = parse_debt_type(rows[r][static_cast<std::size_t>(il)]);
    if (t && *t != DebtType::NotSatd) return true;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Information Gain

namespace detail {

inline double xlog2x_ratio(double joint, double n, double a, double b) {
  // (joint/n) * log2(joint*n / (a*b)); 0 when joint == 0
  if (joint <= 0.0) return 0.0;
  return joint / n * std::log2((joint * n) / (a * b));
}

/// Mutual information between feature presence and label from integer counts.
/// present[c] = #docs of class c containing the feature; class_totals[c] = #docs of class c.
inline double ig_from_counts(const std::vector<double>& present, const std::vector<double>& class_totals) {
  double n = 0.0, nf = 0.0;
  for (std::size_t c = 0; c < class_totals.size(); ++c) {
    n += class_totals[c];
    nf += present[c];
  }
  const double nnf = n - nf;
  double ig = 0.0;
  for (std::size_t c = 0; c < class_totals.size(); ++c) {
    ig += xlog2x_ratio(present[c], n, nf, class_totals[c]);
    ig += xlog2x_ratio(class_totals[c] - present[c], n, nnf, class_totals[c]);
  }
  return std::max(0.0, ig);
}

} // namespace detail

/// IG = H(label) - H(label | feature present/absent), in bits. Computed as the
/// mutual information so exact independence yields exactly 0.
inline double information_gain(const TrainingCorpus& corpus, std::string_view feature) {
  if (corpus.entries.empty()) throw Error(ErrorKind::Corpus, "information_gain: empty corpus");
  std::map<std::string, std::pair<double, double>> per_class; // label -> (total, present)
  for (const auto& e : corpus.entries) {
    auto& slot = per_class[e.label];
    slot.first += 1.0;
    auto bag = preprocess(e.text);
    if (bag.count(std::string(feature))) slot.second += 1.0;
  }
  std::vector<double> present, totals;
  for (const auto& [label, v] : per_class) {
    totals.push_back(v.first);
    present.push_back(v.second);
  }
  return detail::ig_from_counts(present, totals);
}

struct ScoredFeature {
  std::string term;
  double ig = 0.0;
};

/// Top-k features by IG, ties broken by lexicographic term order.
inline std::vector<ScoredFeature> select_features(const TrainingCorpus& corpus, std::size_t k) {
  if (k < 1) throw Error(ErrorKind::Corpus, "select_features: k must be at least 1");
  if (corpus.entries.empty()) throw Error(ErrorKind::Corpus, "select_features: empty corpus");
  std::map<std::string, std::size_t> class_index;
  for (const auto& e : corpus.entries) class_index.emplace(e.label, 0);
  std::size_t ci = 0;
  for (auto& [label, idx] : class_index) idx = ci++;
  std::vector<double> totals(class_index.size(), 0.0);
  std::map<std::string, std::vector<double>> present;
  for (const auto& e : corpus.entries) {
    const std::size_t c = class_index[e.label];
    totals[c] += 1.0;
    for (const auto& [term, count] : preprocess(e.text)) {
      auto& v = present[term];
      if (v.empty()) v.assign(class_index.size(), 0.0);
      v[c] += 1.0;
    }
  }
  std::vector<ScoredFeature> scored;
  scored.reserve(present.size());
  for (const auto& [term, counts] : present) scored.push_back({term, detail::ig_from_counts(counts, totals)});
  std::stable_sort(scored.begin(), scored.end(), [](const ScoredFeature& a, const ScoredFeature& b) {
    if (a.ig != b.ig) return a.ig > b.ig;
    return a.term < b.term;
  });
  if (scored.size() > k) scored.resize(k);
  return scored;
}

// ---------------------------------------------------------------------------
// Model

struct ClassParams {
  std::string label;
  double prior = 0.0;
  std::vector<double> log_likelihood; // aligned with the model vocabulary
};

struct SubModel {
  std::string project;
  std::vector<ClassParams> classes; // sorted by label
};

struct ClassifierModel {
  Mode mode = Mode::Binary;
  std::size_t k = 500;
  std::vector<ScoredFeature> vocabulary;
  std::vector<SubModel> sub_models; // sorted by project
};

struct TrainReport {
  std::vector<std::string> skipped_projects;
  bool voting_degenerate = false;
};

inline constexpr std::size_t kDefaultFeatureCount = 500;

/// One multinomial NB sub-model per project over the shared vocabulary, Laplace alpha = 1.
/// Projects whose sub-corpus lacks a second class are skipped.
inline ClassifierModel train(const TrainingCorpus& corpus, std::size_t k, Mode mode = Mode::Binary,
                             TrainReport* report = nullptr, Diagnostics* diag = nullptr) {
  if (corpus.entries.empty()) throw Error(ErrorKind::Corpus, "train: empty corpus");
  ClassifierModel model;
  model.mode = mode;
  model.k = k;
  model.vocabulary = select_features(corpus, k);
  std::map<std::string, std::size_t> vocab_index;
  for (std::size_t i = 0; i < model.vocabulary.size(); ++i) vocab_index[model.vocabulary[i].term] = i;
  const double v = static_cast<double>(model.vocabulary.size());

  struct ClassAcc {
    double docs = 0.0;
    double tokens = 0.0;
    std::vector<double> counts;
  };
  std::map<std::string, std::map<std::string, ClassAcc>> by_project;
  for (const auto& e : corpus.entries) {
    auto& acc = by_project[e.project][e.label];
    if (acc.counts.empty()) acc.counts.assign(model.vocabulary.size(), 0.0);
    acc.docs += 1.0;
    for (const auto& [term, count] : preprocess(e.text)) {
      auto it = vocab_index.find(term);
      if (it == vocab_index.end()) continue;
      acc.counts[it->second] += count;
      acc.tokens += count;
    }
  }
  TrainReport local;
  for (const auto& [project, classes] : by_project) {
    if (classes.size() < 2) {
      local.skipped_projects.push_back(project);
      if (diag) diag->add("train", "single_class_project", "skipped sub-model for project '" + project + "': only one class present");
      continue;
    }
    double docs = 0.0;
    for (const auto& [label, acc] : classes) docs += acc.docs;
    SubModel sm;
    sm.project = project;
    for (const auto& [label, acc] : classes) {
      ClassParams cp;
      cp.label = label;
      cp.prior = acc.docs / docs;
      cp.log_likelihood.reserve(model.vocabulary.size());
      for (double c : acc.counts) cp.log_likelihood.push_back(std::log((c + 1.0) / (acc.tokens + v)));
      sm.classes.push_back(std::move(cp));
    }
    model.sub_models.push_back(std::move(sm));
  }
  if (model.sub_models.empty()) throw Error(ErrorKind::Corpus, "train: every project sub-corpus is single-class");
  local.voting_degenerate = model.sub_models.size() == 1;
  if (local.voting_degenerate && diag)
    diag->add("train", "voting_degenerate", "only one sub-model trained; voting degenerates to a single classifier");
  if (report) *report = local;
  return model;
}

namespace detail {

/// Unnormalized log posterior per class of one sub-model.
inline std::vector<double> log_joint(const ClassifierModel& model, const SubModel& sm, const TokenBag& bag) {
  std::vector<double> logp;
  for (const auto& cp : sm.classes) logp.push_back(std::log(cp.prior));
  for (std::size_t i = 0; i < model.vocabulary.size(); ++i) {
    auto it = bag.find(model.vocabulary[i].term);
    if (it == bag.end()) continue;
    for (std::size_t c = 0; c < sm.classes.size(); ++c)
      logp[c] += static_cast<double>(it->second) * sm.classes[c].log_likelihood[i];
  }
  return logp;
}

} // namespace detail

/// Posterior over a sub-model's classes (same order as SubModel::classes).
inline std::vector<double> posterior(const ClassifierModel& model, const SubModel& sm, const TokenBag& bag) {
  auto logp = detail::log_joint(model, sm, bag);
  const double mx = *std::max_element(logp.begin(), logp.end());
  double z = 0.0;
  for (double l : logp) z += std::exp(l - mx);
  std::vector<double> out;
  for (double l : logp) out.push_back(std::exp(l - mx) / z);
  return out;
}

struct Prediction {
  std::string label;
  std::map<std::string, int> votes;
};

namespace detail {

/// Tie preference: SATD in binary mode, otherwise lexicographically first label.
inline bool prefer(Mode mode, const std::string& a, const std::string& b) {
  if (mode == Mode::Binary) {
    if (a == kSatd && b != kSatd) return true;
    if (b == kSatd && a != kSatd) return false;
  }
  return a < b;
}

} // namespace detail

inline Prediction predict_bag(const ClassifierModel& model, const TokenBag& bag) {
  Prediction pred;
  for (const auto& sm : model.sub_models) {
    const auto logp = detail::log_joint(model, sm, bag);
    std::size_t best = 0;
    for (std::size_t c = 1; c < sm.classes.size(); ++c) {
      if (logp[c] > logp[best] || (logp[c] == logp[best] && detail::prefer(model.mode, sm.classes[c].label, sm.classes[best].label)))
        best = c;
    }
    ++pred.votes[sm.classes[best].label];
  }
  int top = -1;
  for (const auto& [label, n] : pred.votes) {
    if (n > top || (n == top && detail::prefer(model.mode, label, pred.label))) {
      top = n;
      pred.label = label;
    }
  }
  return pred;
}

inline Prediction predict(const ClassifierModel& model, std::string_view text) {
  return predict_bag(model, preprocess(text));
}

// ---------------------------------------------------------------------------
// Persistence

inline constexpr int kModelFormatVersion = 1;

inline io::json model_to_json(const ClassifierModel& model) {
  io::json j;
  j["format"] = "satd-nb-vote";
  j["version"] = kModelFormatVersion;
  j["mode"] = model.mode == Mode::Binary ? "binary" : "typed";
  j["k"] = model.k;
  auto& vocab = j["vocabulary"] = io::json::array();
  for (const auto& f : model.vocabulary) vocab.push_back({{"term", f.term}, {"ig", f.ig}});
  auto& subs = j["sub_models"] = io::json::array();
  for (const auto& sm : model.sub_models) {
    io::json s;
    s["project"] = sm.project;
    auto& cls = s["classes"] = io::json::array();
    for (const auto& cp : sm.classes)
      cls.push_back({{"label", cp.label}, {"prior", cp.prior}, {"log_likelihood", cp.log_likelihood}});
    subs.push_back(std::move(s));
  }
  return j;
}

inline ClassifierModel model_from_json(const io::json& j) {
  try {
    if (j.at("format") != "satd-nb-vote") throw Error(ErrorKind::Corpus, "model: unknown format");
    if (j.at("version").get<int>() != kModelFormatVersion) throw Error(ErrorKind::Corpus, "model: unsupported version");
    ClassifierModel m;
    m.mode = j.at("mode") == "typed" ? Mode::Typed : Mode::Binary;
    m.k = j.at("k").get<std::size_t>();
    for (const auto& f : j.at("vocabulary")) m.vocabulary.push_back({f.at("term"), f.at("ig")});
    for (const auto& s : j.at("sub_models")) {
      SubModel sm;
      sm.project = s.at("project");
      for (const auto& c : s.at("classes")) {
        ClassParams cp;
        cp.label = c.at("label");
        cp.prior = c.at("prior");
        cp.log_likelihood = c.at("log_likelihood").get<std::vector<double>>();
        if (cp.log_likelihood.size() != m.vocabulary.size()) throw Error(ErrorKind::Corpus, "model: vocabulary size mismatch");
        sm.classes.push_back(std::move(cp));
      }
      m.sub_models.push_back(std::move(sm));
    }
    if (m.sub_models.empty()) throw Error(ErrorKind::Corpus, "model: no sub-models");
    return m;
  } catch (const io::json::exception& e) {
    throw Error(ErrorKind::Corpus, std::string("model: malformed document: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Evaluation

struct Confusion {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  std::optional<double> precision() const {
    if (tp + fp == 0) return std::nullopt;
    return static_cast<double>(tp) / static_cast<double>(tp + fp);
  }
  std::optional<double> recall() const {
    if (tp + fn == 0) return std::nullopt;
    return static_cast<double>(tp) / static_cast<double>(tp + fn);
  }
  Confusion& operator+=(const Confusion& o) {
    tp += o.tp; fp += o.fp; fn += o.fn; tn += o.tn;
    return *this;
  }
};

struct EvalReport {
  Confusion overall;
  std::map<std::string, Confusion> per_project;
  std::size_t overlap_with_training = 0;
  std::optional<double> precision() const { return overall.precision(); }
  std::optional<double> recall() const { return overall.recall(); }
};

inline bool is_positive(const std::string& label) {
  return label == kSatd || (label != kNotSatd && label != to_string(DebtType::NotSatd));
}

/// SATD-positive precision/recall of the model on a labeled set.
inline EvalReport evaluate(const ClassifierModel& model, const TrainingCorpus& labeled) {
  if (labeled.entries.empty()) throw Error(ErrorKind::Corpus, "evaluate: empty labeled set");
  EvalReport rep;
  for (const auto& e : labeled.entries) {
    const bool truth = is_positive(e.label);
    const bool guess = is_positive(predict(model, e.text).label);
    Confusion c;
    if (truth && guess) c.tp = 1;
    else if (!truth && guess) c.fp = 1;
    else if (truth && !guess) c.fn = 1;
    else c.tn = 1;
    rep.overall += c;
    rep.per_project[e.project] += c;
  }
  return rep;
}

/// Number of test entries whose exact text also appears in the training corpus.
inline std::size_t count_overlap(const TrainingCorpus& train_set, const TrainingCorpus& test_set) {
  std::set<std::string> seen;
  for (const auto& e : train_set.entries) seen.insert(e.text);
  std::size_t n = 0;
  for (const auto& e : test_set.entries) n += seen.count(e.text);
  return n;
}

inline constexpr std::uint64_t kDefaultSeed = 20240521;

/// Deterministic fold assignment: Fisher-Yates over indices driven by mt19937_64.
inline std::vector<std::size_t> fold_assignment(std::size_t n, std::size_t folds, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::mt19937_64 rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(order[i - 1], order[j]);
  }
  std::vector<std::size_t> fold(n);
  for (std::size_t pos = 0; pos < n; ++pos) fold[order[pos]] = pos % folds;
  return fold;
}

/// k-fold cross-validation with disjoint folds; confusion counts are pooled.
inline EvalReport cross_validate(const TrainingCorpus& corpus, std::size_t k_features, std::size_t folds,
                                 std::uint64_t seed = kDefaultSeed, Mode mode = Mode::Binary) {
  if (folds < 2) throw Error(ErrorKind::Corpus, "cross_validate: need at least 2 folds");
  if (corpus.entries.size() < folds) throw Error(ErrorKind::Corpus, "cross_validate: fewer entries than folds");
  auto assignment = fold_assignment(corpus.entries.size(), folds, seed);
  EvalReport total;
  for (std::size_t f = 0; f < folds; ++f) {
    TrainingCorpus tr, te;
    for (std::size_t i = 0; i < corpus.entries.size(); ++i)
      (assignment[i] == f ? te : tr).entries.push_back(corpus.entries[i]);
    auto model = train(tr, k_features, mode);
    auto rep = evaluate(model, te);
    total.overall += rep.overall;
    for (const auto& [p, c] : rep.per_project) total.per_project[p] += c;
    total.overlap_with_training += count_overlap(tr, te);
  }
  return total;
}

/// Cochran's sample size with p = 0.5 and finite-population correction, rounded up.
inline std::size_t sample_size(std::size_t population, double confidence, double margin) {
  if (population < 1) throw Error(ErrorKind::Data, "sample_size: population must be >= 1");
  if (!(confidence > 0.0 && confidence < 1.0)) throw Error(ErrorKind::Data, "sample_size: confidence must lie in (0,1)");
  if (!(margin > 0.0 && margin < 1.0)) throw Error(ErrorKind::Data, "sample_size: margin must lie in (0,1)");
  const double z = special::normal_quantile(1.0 - (1.0 - confidence) / 2.0);
  const double n0 = z * z * 0.25 / (margin * margin);
  const double n = n0 / (1.0 + (n0 - 1.0) / static_cast<double>(population));
  auto out = static_cast<std::size_t>(std::ceil(n - 1e-9));
  return std::min(std::max<std::size_t>(out, 1), population);
}

} // namespace satd::classify
