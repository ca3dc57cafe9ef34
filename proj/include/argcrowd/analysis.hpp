#ifndef ARGCROWD_ANALYSIS_HPP
#define ARGCROWD_ANALYSIS_HPP

// Error analysis: confusion probability matrices over annotator label pairs,
// and the distribution of alpha_u scores.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "argcrowd/aggregate.hpp"
#include "argcrowd/corpus.hpp"
#include "argcrowd/errors.hpp"
#include "argcrowd/parallel.hpp"
#include "argcrowd/score.hpp"
#include "argcrowd/standoff.hpp"
#include "argcrowd/text_table.hpp"
#include "json.hpp"

namespace argcrowd {

enum class CpmGranularity : std::uint8_t { Character, Clause };

inline std::string_view to_string(CpmGranularity g) {
  return g == CpmGranularity::Character ? "character" : "clause";
}

/// counts[r][c]: ordered annotator pairs on one item where the first chose r
/// and the second c. Symmetric by construction.
struct CPM {
  using Counts = std::array<std::array<std::uint64_t, kNumLabels>, kNumLabels>;
  Counts counts{};
  std::array<std::array<double, kNumLabels>, kNumLabels> probabilities{};
  /// False for rows with no counts; their probabilities are all zero.
  std::array<bool, kNumLabels> row_defined{};
  std::uint64_t total = 0;
  std::uint64_t items = 0;

  /// Adds every ordered pair of distinct annotators on one item.
  void add_item(std::span<const ComponentLabel> labels) {
    std::array<std::uint64_t, kNumLabels> n{};
    for (auto l : labels) ++n[index_of(l)];
    for (std::size_t r = 0; r < kNumLabels; ++r) {
      for (std::size_t c = 0; c < kNumLabels; ++c) counts[r][c] += r == c ? n[r] * (n[r] - (n[r] > 0)) : n[r] * n[c];
    }
    const std::uint64_t m = labels.size();
    total += m * (m - (m > 0));
    ++items;
  }

  void merge(const CPM& other) {
    for (std::size_t r = 0; r < kNumLabels; ++r) {
      for (std::size_t c = 0; c < kNumLabels; ++c) counts[r][c] += other.counts[r][c];
    }
    total += other.total;
    items += other.items;
  }

  void normalize() {
    for (std::size_t r = 0; r < kNumLabels; ++r) {
      std::uint64_t row = 0;
      for (auto v : counts[r]) row += v;
      row_defined[r] = row > 0;
      for (std::size_t c = 0; c < kNumLabels; ++c) {
        probabilities[r][c] = row ? static_cast<double>(counts[r][c]) / static_cast<double>(row) : 0.0;
      }
    }
  }
};

/// One item per character of [0, length).
inline CPM cpm_characters(std::span<const AnnotationSet> sets, std::size_t length) {
  CPM out;
  std::vector<std::vector<ComponentLabel>> labels;
  for (const auto& s : sets) labels.push_back(to_char_labels(s, length));
  std::vector<ComponentLabel> item(sets.size());
  for (std::size_t i = 0; i < length; ++i) {
    for (std::size_t a = 0; a < sets.size(); ++a) item[a] = labels[a][i];
    out.add_item(item);
  }
  return out;
}

/// One item per consensus component; an annotator's label for it is the
/// argmax of its character labels over the span.
inline CPM cpm_clauses(std::span<const AnnotationSet> sets, std::size_t length,
                       std::span<const AggregatedComponent> components) {
  CPM out;
  std::vector<std::vector<ComponentLabel>> labels;
  for (const auto& s : sets) labels.push_back(to_char_labels(s, length));
  std::vector<ComponentLabel> item(sets.size());
  for (const auto& c : components) {
    for (std::size_t a = 0; a < sets.size(); ++a) {
      std::array<std::uint32_t, kNumLabels> n{};
      for (auto i = c.span.start; i < c.span.end; ++i) ++n[index_of(labels[a][i])];
      item[a] = argmax_label(n).first;
    }
    out.add_item(item);
  }
  return out;
}

/// CPM over corpus records, using each record's window of its source
/// bundle. Throws DegenerateInput when no record has two or more sets.
inline CPM cpm(std::span<const CorpusRecord> records, std::span<const AnnotationBundle> bundles,
               CpmGranularity granularity = CpmGranularity::Character, std::size_t threads = 1) {
  std::map<std::string, const AnnotationBundle*, std::less<>> by_id;
  for (const auto& b : bundles) by_id[b.document.id()] = &b;
  const auto parts = parallel_map<CPM>(records.size(), threads, [&](std::size_t i) {
    const auto& r = records[i];
    const auto it = by_id.find(r.doc_id);
    if (it == by_id.end()) throw Error("corpus record refers to unknown document " + r.doc_id);
    const auto& b = *it->second;
    if (b.sets.size() < 2) return CPM{};
    std::vector<AnnotationSet> sets;
    for (const auto& s : b.sets) sets.push_back(r.sentence_index ? clip_set(s, r.span) : s);
    return granularity == CpmGranularity::Character ? cpm_characters(sets, r.span.length())
                                                    : cpm_clauses(sets, r.span.length(), r.components);
  });
  CPM out;
  bool any = false;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    out.merge(parts[i]);
    any = any || by_id.at(records[i].doc_id)->sets.size() >= 2;
  }
  if (!any) throw DegenerateInput("no record has two or more annotation sets");
  out.normalize();
  return out;
}

inline void to_json(nlohmann::json& j, const CPM& m) {
  nlohmann::json labels = nlohmann::json::array();
  for (auto l : kAllLabels) labels.push_back(to_string(l));
  j = nlohmann::json{{"labels", std::move(labels)},
                     {"counts", m.counts},
                     {"probabilities", m.probabilities},
                     {"row_defined", m.row_defined},
                     {"total_pairs", m.total},
                     {"items", m.items}};
}

/// Rows are the given label, columns the other annotator's label.
inline std::string render(const CPM& m, const std::string& title) {
  std::vector<std::string> header = {title};
  for (auto l : kAllLabels) header.push_back(short_label(l));
  TextTable t(header);
  for (auto r : kAllLabels) {
    std::vector<std::string> row = {short_label(r)};
    for (auto c : kAllLabels) {
      row.push_back(m.row_defined[index_of(r)] ? fixed(m.probabilities[index_of(r)][index_of(c)]) : "n/a");
    }
    t.add(row);
  }
  return t.render();
}

// ---------------------------------------------------------------------------
// Histogram

struct AlphaHistogram {
  double lower = -1.0;
  double width = 0.1;
  /// The last bin is closed on the right; values below `lower` land in the first.
  std::vector<std::size_t> bins;
  std::vector<double> values;  // defined scores, ascending
  std::size_t undefined = 0;

  double share_at_least(double threshold) const {
    if (values.empty()) return 0.0;
    const auto it = std::lower_bound(values.begin(), values.end(), threshold);
    return static_cast<double>(values.end() - it) / static_cast<double>(values.size());
  }
};

inline AlphaHistogram alpha_histogram(std::span<const Score> scores, double width = 0.1) {
  if (!(width > 0)) throw ConfigError("histogram bin width must be positive");
  AlphaHistogram h;
  h.width = width;
  const auto n = static_cast<std::size_t>(std::llround(2.0 / width));
  h.bins.assign(std::max<std::size_t>(n, 1), 0);
  for (const auto& s : scores) {
    if (!s.defined()) {
      ++h.undefined;
      continue;
    }
    h.values.push_back(s.value());
    const double pos = std::floor((s.value() - h.lower) / width + 1e-9);
    const auto idx = static_cast<std::size_t>(std::clamp(pos, 0.0, static_cast<double>(h.bins.size() - 1)));
    ++h.bins[idx];
  }
  std::sort(h.values.begin(), h.values.end());
  return h;
}

inline nlohmann::json histogram_json(const AlphaHistogram& h, std::span<const double> thresholds) {
  nlohmann::json bins = nlohmann::json::array();
  for (std::size_t i = 0; i < h.bins.size(); ++i) {
    const double lo = h.lower + static_cast<double>(i) * h.width;
    bins.push_back({{"lower", std::round(lo * 1e9) / 1e9},
                    {"upper", std::round((lo + h.width) * 1e9) / 1e9},
                    {"count", h.bins[i]}});
  }
  nlohmann::json shares = nlohmann::json::object();
  for (double t : thresholds) shares[fixed(t, 2)] = h.share_at_least(t);
  return nlohmann::json{{"bins", std::move(bins)},
                        {"scored", h.values.size()},
                        {"undefined", h.undefined},
                        {"share_at_least", std::move(shares)}};
}

inline std::string render(const AlphaHistogram& h) {
  TextTable t({"alpha_U bin", "count", ""});
  const auto peak = std::max<std::size_t>(1, *std::max_element(h.bins.begin(), h.bins.end()));
  for (std::size_t i = 0; i < h.bins.size(); ++i) {
    const double lo = h.lower + static_cast<double>(i) * h.width;
    t.add({"[" + fixed(lo, 1) + ", " + fixed(lo + h.width, 1) + (i + 1 == h.bins.size() ? "]" : ")"),
           std::to_string(h.bins[i]), std::string(h.bins[i] * 50 / peak, '#')});
  }
  return t.render() + "scored " + std::to_string(h.values.size()) + ", undefined " + std::to_string(h.undefined) +
         '\n';
}

}  // namespace argcrowd

#endif  // ARGCROWD_ANALYSIS_HPP
