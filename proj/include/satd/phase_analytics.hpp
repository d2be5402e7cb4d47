#pragma once

// Equal-commit-count development phases and the per-phase, per-type tables.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "satd/classifier.hpp"
#include "satd/common.hpp"
#include "satd/io.hpp"
#include "satd/lifecycle.hpp"

namespace satd::phases {

using classify::DebtType;
using lifecycle::SatdInstance;

struct Phase {
  std::size_t index = 0;
  std::size_t start = 0; // ordinal, inclusive
  std::size_t end = 0;   // ordinal, exclusive
  std::int64_t start_time = 0;
  std::int64_t end_time = 0; // timestamp of the last commit in the phase
  std::size_t size() const { return end - start; }
};

/// Split ordinals [first, first + count) into n phases of floor(count/n)
/// commits; the remainder goes to the last phase.
inline std::vector<Phase> split_phases(std::size_t first, std::size_t count, std::size_t n) {
  if (n == 0) throw Error(ErrorKind::Config, "phase count must be positive");
  if (count < n)
    throw Error(ErrorKind::Config, "fewer commits (" + std::to_string(count) + ") than phases (" + std::to_string(n) + ")");
  const std::size_t base = count / n;
  std::vector<Phase> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i].index = i;
    out[i].start = first + i * base;
    out[i].end = i + 1 == n ? first + count : first + (i + 1) * base;
  }
  return out;
}

/// Phases over a slice of the linearized chain, with timestamps filled in.
inline std::vector<Phase> split_phases(const std::vector<history::CommitRecord>& commits, std::size_t n,
                                       std::size_t first = 0, std::optional<std::size_t> count = std::nullopt) {
  const std::size_t c = count.value_or(commits.size() - std::min(first, commits.size()));
  if (first + c > commits.size()) throw Error(ErrorKind::Data, "split_phases: range exceeds history");
  auto out = split_phases(first, c, n);
  for (auto& p : out) {
    p.start_time = commits[p.start].timestamp;
    p.end_time = commits[p.end - 1].timestamp;
  }
  return out;
}

/// Phase containing an ordinal, or nullopt when outside every phase.
inline std::optional<std::size_t> phase_of(const std::vector<Phase>& phases, std::size_t ordinal) {
  for (const auto& p : phases)
    if (ordinal >= p.start && ordinal < p.end) return p.index;
  return std::nullopt;
}

enum class Normalization { ByPhaseTotal, None };

inline const char* to_string(Normalization n) { return n == Normalization::ByPhaseTotal ? "ByPhaseTotal" : "None"; }

struct PhaseTable {
  std::string name;
  std::string variant; // e.g. cumulative / incremental; empty when single-valued
  Normalization normalization = Normalization::None;
  std::vector<DebtType> types;
  // cells[phase][type]; nullopt marks an absent cell
  std::vector<std::vector<std::optional<double>>> cells;
  std::vector<bool> empty_phase;

  std::optional<double> at(std::size_t phase, DebtType t) const {
    for (std::size_t k = 0; k < types.size(); ++k)
      if (types[k] == t) return cells.at(phase)[k];
    return std::nullopt;
  }
};

inline std::vector<DebtType> all_types() { return {std::begin(classify::kDebtTypes), std::end(classify::kDebtTypes)}; }

inline std::size_t type_index(DebtType t) { return static_cast<std::size_t>(t); }

inline bool is_debt(const SatdInstance& i) { return i.debt_type != DebtType::NotSatd; }

namespace detail {

inline PhaseTable normalized_counts(std::string name, const std::vector<std::vector<double>>& counts) {
  PhaseTable t;
  t.name = std::move(name);
  t.normalization = Normalization::ByPhaseTotal;
  t.types = all_types();
  for (const auto& row : counts) {
    double total = 0;
    for (double c : row) total += c;
    std::vector<std::optional<double>> out;
    for (double c : row) out.emplace_back(total > 0 ? c / total : 0.0);
    t.cells.push_back(std::move(out));
    t.empty_phase.push_back(total == 0);
  }
  return t;
}

} // namespace detail

inline std::vector<std::vector<double>> intro_counts(const std::vector<SatdInstance>& instances, const std::vector<Phase>& phases) {
  std::vector<std::vector<double>> counts(phases.size(), std::vector<double>(std::size(classify::kDebtTypes), 0.0));
  for (const auto& i : instances) {
    if (!is_debt(i)) continue;
    if (auto p = phase_of(phases, i.intro.ordinal)) counts[*p][type_index(i.debt_type)] += 1;
  }
  return counts;
}

inline std::vector<std::vector<double>> removal_counts(const std::vector<SatdInstance>& instances, const std::vector<Phase>& phases) {
  std::vector<std::vector<double>> counts(phases.size(), std::vector<double>(std::size(classify::kDebtTypes), 0.0));
  for (const auto& i : instances) {
    if (!is_debt(i) || i.censored || !i.removal) continue;
    if (auto p = phase_of(phases, i.removal->event.ordinal)) counts[*p][type_index(i.debt_type)] += 1;
  }
  return counts;
}

inline PhaseTable intro_distribution(const std::vector<SatdInstance>& instances, const std::vector<Phase>& phases) {
  return detail::normalized_counts("intro_distribution", intro_counts(instances, phases));
}

inline PhaseTable removal_distribution(const std::vector<SatdInstance>& instances, const std::vector<Phase>& phases) {
  return detail::normalized_counts("removal_distribution", removal_counts(instances, phases));
}

/// Cumulative: removed by the end of each phase over all instances of the type
/// introduced in the phase range. The denominator is fixed, so the series is
/// non-decreasing. Absent when the type has no instances.
inline PhaseTable removal_rate_cumulative(const std::vector<SatdInstance>& instances, const std::vector<Phase>& phases) {
  PhaseTable t;
  t.name = "removal_rate";
  t.variant = "cumulative";
  t.types = all_types();
  const auto intros = intro_counts(instances, phases);
  const auto removals = removal_counts(instances, phases);
  std::vector<double> introduced(t.types.size(), 0.0), removed(t.types.size(), 0.0);
  for (const auto& row : intros)
    for (std::size_t k = 0; k < row.size(); ++k) introduced[k] += row[k];
  for (std::size_t p = 0; p < phases.size(); ++p) {
    std::vector<std::optional<double>> row;
    for (std::size_t k = 0; k < t.types.size(); ++k) {
      removed[k] += removals[p][k];
      row.push_back(introduced[k] > 0 ? std::optional<double>(removed[k] / introduced[k]) : std::nullopt);
    }
    t.cells.push_back(std::move(row));
    t.empty_phase.push_back(false);
  }
  return t;
}

/// Incremental: removed during the phase over instances exposed during it
/// (introduced before the phase end and not removed before its start).
inline PhaseTable removal_rate_incremental(const std::vector<SatdInstance>& instances, const std::vector<Phase>& phases) {
  PhaseTable t;
  t.name = "removal_rate";
  t.variant = "incremental";
  t.types = all_types();
  for (const auto& ph : phases) {
    std::vector<double> exposed(t.types.size(), 0.0), removed(t.types.size(), 0.0);
    for (const auto& i : instances) {
      if (!is_debt(i) || i.intro.ordinal >= ph.end) continue;
      const bool has_removal = !i.censored && i.removal;
      if (has_removal && i.removal->event.ordinal < ph.start) continue;
      exposed[type_index(i.debt_type)] += 1;
      if (has_removal && i.removal->event.ordinal < ph.end) removed[type_index(i.debt_type)] += 1;
    }
    std::vector<std::optional<double>> row;
    for (std::size_t k = 0; k < t.types.size(); ++k)
      row.push_back(exposed[k] > 0 ? std::optional<double>(removed[k] / exposed[k]) : std::nullopt);
    t.cells.push_back(std::move(row));
    t.empty_phase.push_back(false);
  }
  return t;
}

struct RemovalTotals {
  DebtType type;
  std::size_t introduced = 0, removed = 0, censored = 0;
  std::optional<double> rate;
};

/// End-of-window removal rate per type over the censor-processed set.
inline std::vector<RemovalTotals> removal_totals(const std::vector<SatdInstance>& instances) {
  std::vector<RemovalTotals> out;
  for (DebtType t : classify::kDebtTypes) out.push_back({t, 0, 0, 0, std::nullopt});
  for (const auto& i : instances) {
    if (!is_debt(i)) continue;
    auto& r = out[type_index(i.debt_type)];
    ++r.introduced;
    if (i.censored) ++r.censored;
    else ++r.removed;
  }
  for (auto& r : out)
    if (r.introduced > 0) r.rate = static_cast<double>(r.removed) / static_cast<double>(r.introduced);
  return out;
}

/// Instances alive at some point in each phase: [intro, removal) meets [start, end).
inline PhaseTable frequency_evolution(const std::vector<SatdInstance>& instances, const std::vector<Phase>& phases) {
  PhaseTable t;
  t.name = "frequency_evolution";
  t.types = all_types();
  for (const auto& ph : phases) {
    std::vector<double> alive(t.types.size(), 0.0);
    for (const auto& i : instances) {
      if (!is_debt(i) || i.intro.ordinal >= ph.end) continue;
      if (!i.censored && i.removal && i.removal->event.ordinal <= ph.start) continue;
      alive[type_index(i.debt_type)] += 1;
    }
    std::vector<std::optional<double>> row(alive.begin(), alive.end());
    t.cells.push_back(std::move(row));
    t.empty_phase.push_back(false);
  }
  return t;
}

struct RemoverShare {
  DebtType type;
  std::size_t self = 0, more = 0, fewer = 0;
  std::size_t total() const { return self + more + fewer; }
  std::optional<double> share(std::size_t n) const {
    return total() ? std::optional<double>(static_cast<double>(n) / static_cast<double>(total())) : std::nullopt;
  }
};

inline std::vector<RemoverShare> remover_breakdown(const std::vector<SatdInstance>& instances) {
  std::vector<RemoverShare> out;
  for (DebtType t : classify::kDebtTypes) out.push_back({t});
  for (const auto& i : instances) {
    if (!is_debt(i) || i.censored || !i.remover_class) continue;
    auto& r = out[type_index(i.debt_type)];
    switch (*i.remover_class) {
    case lifecycle::RemoverClass::Self: ++r.self; break;
    case lifecycle::RemoverClass::MoreActive: ++r.more; break;
    case lifecycle::RemoverClass::FewerActive: ++r.fewer; break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Output

inline std::string cell_text(const std::optional<double>& v) { return v ? fmt_real(*v) : std::string(); }

/// CSV: phase_index,debt_type,value,normalization. Absent cells have an empty value.
inline std::string to_csv(const PhaseTable& t) {
  std::string out = io::csv_line({"phase_index", "debt_type", "value", "normalization"});
  for (std::size_t p = 0; p < t.cells.size(); ++p)
    for (std::size_t k = 0; k < t.types.size(); ++k)
      out += io::csv_line({std::to_string(p), classify::to_string(t.types[k]), cell_text(t.cells[p][k]), to_string(t.normalization)});
  return out;
}

inline io::json to_json(const PhaseTable& t) {
  io::json j;
  j["name"] = t.name;
  if (!t.variant.empty()) j["variant"] = t.variant;
  j["normalization"] = to_string(t.normalization);
  io::json rows = io::json::array();
  for (std::size_t p = 0; p < t.cells.size(); ++p) {
    io::json row;
    row["phase_index"] = p;
    row["empty"] = t.empty_phase[p];
    io::json vals = io::json::object();
    for (std::size_t k = 0; k < t.types.size(); ++k)
      vals[classify::to_string(t.types[k])] = t.cells[p][k] ? io::json(std::stod(fmt_real(*t.cells[p][k]))) : io::json(nullptr);
    row["values"] = std::move(vals);
    rows.push_back(std::move(row));
  }
  j["rows"] = std::move(rows);
  return j;
}

inline io::json phases_json(const std::vector<Phase>& phases) {
  io::json a = io::json::array();
  for (const auto& p : phases)
    a.push_back({{"index", p.index}, {"start", p.start}, {"end", p.end}, {"start_time", p.start_time}, {"end_time", p.end_time}});
  return a;
}

// ---------------------------------------------------------------------------
// Conservation checks

/// Per type: introduced = removed + censored, and every nonempty
/// ByPhaseTotal row sums to 1 within 1e-9. Returns violation messages.
inline std::vector<std::string> conservation_violations(const std::vector<SatdInstance>& instances,
                                                        const std::vector<const PhaseTable*>& tables) {
  std::vector<std::string> out;
  std::map<DebtType, std::size_t> intro, removed, censored;
  for (const auto& i : instances) {
    ++intro[i.debt_type];
    if (i.censored) {
      if (i.removal) out.push_back("censored instance carries a removal: " + lifecycle::comment_key_string(i.key));
      ++censored[i.debt_type];
    } else if (i.removal) {
      ++removed[i.debt_type];
      if (i.removal->event.ordinal <= i.intro.ordinal)
        out.push_back("removal not after introduction: " + lifecycle::comment_key_string(i.key));
    } else {
      out.push_back("instance neither removed nor censored: " + lifecycle::comment_key_string(i.key));
    }
  }
  for (const auto& [t, n] : intro)
    if (n != removed[t] + censored[t])
      out.push_back(std::string("introduced != removed + censored for ") + classify::to_string(t));
  for (const auto* tab : tables) {
    if (tab->normalization != Normalization::ByPhaseTotal) continue;
    for (std::size_t p = 0; p < tab->cells.size(); ++p) {
      if (tab->empty_phase[p]) continue;
      double s = 0;
      for (const auto& c : tab->cells[p]) s += c.value_or(0.0);
      if (std::abs(s - 1.0) > 1e-9) out.push_back(tab->name + " phase " + std::to_string(p) + " sums to " + fmt_real(s, 12));
    }
  }
  return out;
}

} // namespace satd::phases
