#ifndef ARGCROWD_QUALITY_HPP
#define ARGCROWD_QUALITY_HPP

// Annotator devotedness scored against gold-standard documents.
//
// On every gold sentence each participating annotator gets a two-way alpha_u
// against the gold set. The lowest tail of each sentence's ranking earns a
// penalty point; annotators whose penalty reaches the threshold lose all of
// their annotation sets, and documents left under-annotated are pruned.

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "argcrowd/agreement_report.hpp"
#include "argcrowd/errors.hpp"
#include "argcrowd/parallel.hpp"
#include "argcrowd/standoff.hpp"
#include "json.hpp"

namespace argcrowd {

struct GoldSentenceScore {
  std::string doc_id;
  std::size_t sentence = 0;
  Score score;
  bool flagged = false;
};

struct DevotednessRecord {
  std::string annotator_id;
  std::size_t penalty = 0;
  std::vector<GoldSentenceScore> scores;
};

struct DevotednessOptions {
  double tail_fraction = 0.1;
  UnitizedAlphaOptions alpha;
  std::size_t threads = 1;
};

/// Number of annotators flagged out of `n` defined scores before tie
/// expansion: floor(fraction * n), raised to 1 when n >= 2 and the scores
/// differ, 0 when they are all equal.
inline std::size_t tail_size(std::size_t n, double fraction, bool all_equal) {
  if (n < 2 || all_equal) return 0;
  const auto k = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n) + 1e-9));
  return std::max<std::size_t>(k, 1);
}

/// Marks the flagged entries of one sentence's ranking. Undefined scores are
/// never ranked. Entries tied with the cutoff score are all flagged.
inline std::vector<bool> flag_bottom_tail(std::span<const Score> scores,
                                          std::span<const std::string> ids, double fraction,
                                          double tolerance = 1e-12) {
  std::vector<std::size_t> ranked;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (scores[i].defined()) ranked.push_back(i);
  }
  std::sort(ranked.begin(), ranked.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a].value() != scores[b].value()) return scores[a].value() < scores[b].value();
    return ids[a] < ids[b];
  });
  std::vector<bool> flagged(scores.size(), false);
  if (ranked.empty()) return flagged;
  const bool all_equal =
      scores[ranked.back()].value() - scores[ranked.front()].value() <= tolerance;
  const auto k = tail_size(ranked.size(), fraction, all_equal);
  if (k == 0) return flagged;
  const double cutoff = scores[ranked[k - 1]].value();
  for (auto i : ranked) {
    if (scores[i].value() <= cutoff + tolerance) flagged[i] = true;
  }
  return flagged;
}

/// One record per annotator found in `bundles`, sorted by annotator id.
/// Throws MissingGold when some annotator annotated no gold document.
inline std::vector<DevotednessRecord> score_devotedness(std::span<const AnnotationBundle> bundles,
                                                        const DevotednessOptions& opts = {}) {
  struct Task {
    const AnnotationBundle* bundle;
    std::size_t sentence;
    CharSpan span;
  };
  std::vector<Task> tasks;
  std::set<std::string> annotators;
  std::set<std::string> with_gold;
  for (const auto& b : bundles) {
    for (const auto& s : b.sets) annotators.insert(s.annotator_id);
    if (!b.is_gold()) continue;
    for (const auto& s : b.sets) with_gold.insert(s.annotator_id);
    const auto sentences = sentences_of(b.document);
    for (std::size_t i = 0; i < sentences.size(); ++i) tasks.push_back({&b, i, sentences[i]});
  }
  std::vector<std::string> missing;
  std::set_difference(annotators.begin(), annotators.end(), with_gold.begin(), with_gold.end(),
                      std::back_inserter(missing));
  if (!missing.empty()) {
    std::string list;
    for (const auto& a : missing) list += (list.empty() ? "" : ", ") + a;
    throw MissingGold("annotators without a gold document: " + list);
  }

  const auto per_task = parallel_map<std::vector<Score>>(tasks.size(), opts.threads, [&](std::size_t t) {
    const auto& task = tasks[t];
    std::vector<Score> scores;
    for (const auto& s : task.bundle->sets) {
      scores.push_back(alpha_u_against_gold(s, *task.bundle->gold, task.span, opts.alpha));
    }
    return scores;
  });

  std::map<std::string, DevotednessRecord> records;
  for (const auto& a : annotators) records[a].annotator_id = a;
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    const auto& sets = tasks[t].bundle->sets;
    std::vector<std::string> ids;
    for (const auto& s : sets) ids.push_back(s.annotator_id);
    const auto flagged = flag_bottom_tail(per_task[t], ids, opts.tail_fraction);
    for (std::size_t i = 0; i < sets.size(); ++i) {
      auto& r = records[ids[i]];
      r.scores.push_back({tasks[t].bundle->document.id(), tasks[t].sentence, per_task[t][i], flagged[i]});
      if (flagged[i]) ++r.penalty;
    }
  }
  std::vector<DevotednessRecord> out;
  for (auto& [id, r] : records) out.push_back(std::move(r));
  return out;
}

struct FilterOptions {
  std::size_t threshold = 2;
  std::size_t min_sets = 2;
};

struct RemovedDocument {
  std::string doc_id;
  std::size_t remaining_sets = 0;
};

struct RemovalReport {
  std::vector<std::string> removed_annotators;
  std::vector<RemovedDocument> removed_documents;
  std::size_t sets_removed = 0;
};

struct FilterResult {
  std::vector<AnnotationBundle> bundles;
  RemovalReport report;
};

/// Removes every set of annotators with penalty >= threshold, then drops
/// non-gold documents left with fewer than min_sets sets. Gold documents are
/// kept so their before/after comparison stays available.
inline FilterResult filter(std::span<const DevotednessRecord> records,
                           std::span<const AnnotationBundle> bundles, const FilterOptions& opts = {}) {
  FilterResult out;
  std::set<std::string> removed;
  for (const auto& r : records) {
    if (r.penalty >= opts.threshold) removed.insert(r.annotator_id);
  }
  out.report.removed_annotators.assign(removed.begin(), removed.end());
  for (const auto& b : bundles) {
    AnnotationBundle kept{b.document, {}, b.gold};
    for (const auto& s : b.sets) {
      if (removed.contains(s.annotator_id)) {
        ++out.report.sets_removed;
      } else {
        kept.sets.push_back(s);
      }
    }
    if (!kept.is_gold() && kept.sets.size() < opts.min_sets) {
      out.report.removed_documents.push_back({b.document.id(), kept.sets.size()});
      continue;
    }
    out.bundles.push_back(std::move(kept));
  }
  return out;
}

inline void to_json(nlohmann::json& j, const GoldSentenceScore& s) {
  j = nlohmann::json{{"doc_id", s.doc_id}, {"sentence_index", s.sentence}, {"alpha_u", s.score},
                     {"flagged", s.flagged}};
}

inline void to_json(nlohmann::json& j, const DevotednessRecord& r) {
  j = nlohmann::json{{"annotator_id", r.annotator_id}, {"penalty", r.penalty}, {"scores", r.scores}};
}

inline void from_json(const nlohmann::json& j, DevotednessRecord& r) {
  r.annotator_id = j.at("annotator_id").get<std::string>();
  r.penalty = j.at("penalty").get<std::size_t>();
  r.scores.clear();
  for (const auto& s : j.at("scores")) {
    r.scores.push_back({s.at("doc_id").get<std::string>(), s.at("sentence_index").get<std::size_t>(),
                        s.at("alpha_u").get<Score>(), s.at("flagged").get<bool>()});
  }
}

inline void to_json(nlohmann::json& j, const RemovalReport& r) {
  nlohmann::json docs = nlohmann::json::array();
  for (const auto& d : r.removed_documents) {
    docs.push_back({{"doc_id", d.doc_id}, {"remaining_sets", d.remaining_sets}});
  }
  j = nlohmann::json{{"removed_annotators", r.removed_annotators},
                     {"removed_documents", std::move(docs)},
                     {"sets_removed", r.sets_removed}};
}

}  // namespace argcrowd

#endif  // ARGCROWD_QUALITY_HPP
