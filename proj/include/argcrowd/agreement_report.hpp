#ifndef ARGCROWD_AGREEMENT_REPORT_HPP
#define ARGCROWD_AGREEMENT_REPORT_HPP

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "argcrowd/argmodel.hpp"
#include "argcrowd/nominal_agreement.hpp"
#include "argcrowd/random.hpp"
#include "argcrowd/score.hpp"
#include "argcrowd/segmentation.hpp"
#include "argcrowd/standoff.hpp"
#include "argcrowd/unitized_alpha.hpp"
#include "json.hpp"

namespace argcrowd {

struct MetricScores {
  Score percentage;
  Score multi_pi;
  Score alpha;
  Score alpha_u;
};

/// Agreement over one continuum: a whole document or one of its sentences.
/// Nominal metrics treat each character as an item with NA as a fifth
/// category; per-label rows are one-vs-rest. alpha_u treats NA as gap.
struct AgreementReport {
  std::string doc_id;
  std::optional<std::size_t> sentence_index;
  CharSpan continuum;
  std::size_t annotators = 0;
  MetricScores overall;
  std::array<MetricScores, kNumComponentLabels> per_label;

  /// Component-type alpha_u, the score used for filtering and corpus selection.
  const Score& headline() const noexcept { return overall.alpha_u; }
};

enum class ReportScope { Document, PerSentence, Both };

namespace report_detail {

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace report_detail

/// Seed for randomized alpha_u on one scope unit, independent of scheduling.
inline std::uint64_t scope_seed(std::uint64_t seed, std::string_view doc_id,
                                std::optional<std::size_t> sentence) {
  return rnd::derive(seed ^ report_detail::fnv1a(doc_id), sentence ? *sentence + 1 : 0);
}

inline AgreementReport report_continuum(std::string doc_id, std::optional<std::size_t> sentence,
                                        std::span<const std::vector<LabeledSpan>> annotators,
                                        CharSpan continuum, UnitizedAlphaOptions opts = {}) {
  AgreementReport r;
  r.doc_id = std::move(doc_id);
  r.sentence_index = sentence;
  r.continuum = continuum;
  r.annotators = annotators.size();
  if (annotators.size() < 2) {
    const auto u = Score::undefined("fewer than two annotation sets");
    r.overall = {u, u, u, u};
    r.per_label.fill(r.overall);
    return r;
  }

  std::vector<std::vector<LabeledSpan>> clipped;
  clipped.reserve(annotators.size());
  for (const auto& a : annotators) clipped.push_back(clip_spans(a, continuum));
  const auto matrix = label_matrix(clipped, continuum.length());
  if (continuum.length() == 0) {
    const auto u = Score::undefined("empty continuum");
    r.overall = {u, u, u, u};
  } else {
    r.overall.percentage = percentage_agreement(matrix);
    r.overall.multi_pi = multi_pi(matrix);
    r.overall.alpha = kripp_alpha_nominal(matrix);
  }

  opts.seed = scope_seed(opts.seed, r.doc_id, sentence);
  const auto unitized = alpha_u(clipped, {0, continuum.length()}, kComponentLabels, opts);
  r.overall.alpha_u = unitized.joint;

  for (auto label : kComponentLabels) {
    auto& row = r.per_label[index_of(label)];
    if (continuum.length() == 0) {
      row = r.overall;
      continue;
    }
    const auto bin = matrix.binarized(index_of(label));
    row.percentage = percentage_agreement(bin);
    row.multi_pi = multi_pi(bin);
    row.alpha = kripp_alpha_nominal(bin);
    row.alpha_u = unitized.category(label);
  }
  return r;
}

inline std::vector<CharSpan> sentences_of(const Document& doc) {
  if (doc.sentences()) return *doc.sentences();
  return segment_sentences_utf8(doc.text());
}

/// Reports for a bundle's non-gold sets: the document first, then each
/// sentence in order (as requested by `scope`).
inline std::vector<AgreementReport> report(const AnnotationBundle& bundle, ReportScope scope,
                                           const UnitizedAlphaOptions& opts = {}) {
  const auto spans = bundle.annotator_spans();
  std::vector<AgreementReport> out;
  if (scope != ReportScope::PerSentence) {
    out.push_back(report_continuum(bundle.document.id(), std::nullopt, spans,
                                   {0, bundle.document.length()}, opts));
  }
  if (scope != ReportScope::Document) {
    const auto sentences = sentences_of(bundle.document);
    for (std::size_t i = 0; i < sentences.size(); ++i) {
      out.push_back(report_continuum(bundle.document.id(), i, spans, sentences[i], opts));
    }
  }
  return out;
}

/// Two-annotator alpha_u of one set against the gold standard on `continuum`.
inline Score alpha_u_against_gold(const AnnotationSet& set, const AnnotationSet& gold,
                                  CharSpan continuum, UnitizedAlphaOptions opts = {}) {
  const std::vector<std::vector<LabeledSpan>> pair = {
      clip_spans(labeled_spans(set), continuum), clip_spans(labeled_spans(gold), continuum)};
  opts.seed = scope_seed(opts.seed, set.document_id + "/" + set.annotator_id, continuum.start);
  return alpha_u(pair, {0, continuum.length()}, kComponentLabels, opts).joint;
}

// ---------------------------------------------------------------------------
// JSON

inline void to_json(nlohmann::json& j, const MetricScores& s) {
  j = nlohmann::json{{"percentage", s.percentage},
                     {"multi_pi", s.multi_pi},
                     {"alpha", s.alpha},
                     {"alpha_u", s.alpha_u}};
}

inline void from_json(const nlohmann::json& j, MetricScores& s) {
  s.percentage = j.at("percentage").get<Score>();
  s.multi_pi = j.at("multi_pi").get<Score>();
  s.alpha = j.at("alpha").get<Score>();
  s.alpha_u = j.at("alpha_u").get<Score>();
}

inline void to_json(nlohmann::json& j, const AgreementReport& r) {
  j = nlohmann::json::object();
  j["doc_id"] = r.doc_id;
  if (r.sentence_index) j["sentence_index"] = *r.sentence_index;
  j["start"] = r.continuum.start;
  j["end"] = r.continuum.end;
  j["annotators"] = r.annotators;
  j["overall"] = r.overall;
  nlohmann::json labels = nlohmann::json::object();
  for (auto label : kComponentLabels) labels[std::string(to_string(label))] = r.per_label[index_of(label)];
  j["per_label"] = std::move(labels);
}

inline void from_json(const nlohmann::json& j, AgreementReport& r) {
  r.doc_id = j.at("doc_id").get<std::string>();
  r.sentence_index.reset();
  if (j.contains("sentence_index")) r.sentence_index = j.at("sentence_index").get<std::size_t>();
  r.continuum = {j.at("start").get<std::size_t>(), j.at("end").get<std::size_t>()};
  r.annotators = j.at("annotators").get<std::size_t>();
  r.overall = j.at("overall").get<MetricScores>();
  for (auto label : kComponentLabels) {
    r.per_label[index_of(label)] = j.at("per_label").at(std::string(to_string(label))).get<MetricScores>();
  }
}

}  // namespace argcrowd

#endif  // ARGCROWD_AGREEMENT_REPORT_HPP
