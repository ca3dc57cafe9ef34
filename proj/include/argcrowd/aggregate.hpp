#ifndef ARGCROWD_AGGREGATE_HPP
#define ARGCROWD_AGGREGATE_HPP

// Consensus from diverging annotations.
//
// Every annotator's labelling is one-hot encoded per character (five digits
// in canonical label order). A single-cluster K-means over those vectors has
// the arithmetic mean as its centroid, so the centroid is computed directly
// as the mean. Each character takes the centroid's argmax label, with the
// argmax mass as its confidence; maximal runs of equal non-NA labels become
// consensus components. Sentiments and relations of the consensus
// components are decided by majority vote over aligned annotator components.

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "argcrowd/argmodel.hpp"
#include "argcrowd/errors.hpp"
#include "json.hpp"

namespace argcrowd {

struct LabelDistribution {
  std::size_t annotators = 0;
  /// Number of annotators choosing each label, per character.
  std::vector<std::array<std::uint32_t, kNumLabels>> counts;
  /// counts / annotators
  std::vector<std::array<double, kNumLabels>> probabilities;
  std::vector<double> confidence;
  std::vector<bool> tie;
  std::vector<ComponentLabel> label;

  std::size_t size() const noexcept { return counts.size(); }
};

/// Argmax of one character's counts. Ties prefer a non-NA label, then
/// canonical order (MajorClaim, Claim, Premise, PSIC).
inline std::pair<ComponentLabel, bool> argmax_label(const std::array<std::uint32_t, kNumLabels>& c) {
  const auto best = *std::max_element(c.begin(), c.end());
  std::size_t winners = 0;
  for (auto v : c) winners += v == best;
  for (auto l : kComponentLabels) {
    if (c[index_of(l)] == best) return {l, winners > 1};
  }
  return {ComponentLabel::NA, winners > 1};
}

inline LabelDistribution centroid(std::span<const std::vector<LabeledSpan>> annotators,
                                  std::size_t length) {
  if (annotators.size() < 2) throw DegenerateInput("aggregation needs at least two annotation sets");
  LabelDistribution d;
  d.annotators = annotators.size();
  d.counts.assign(length, {});
  for (const auto& spans : annotators) {
    const auto labels = to_char_labels(spans, length);
    for (std::size_t i = 0; i < length; ++i) ++d.counts[i][index_of(labels[i])];
  }
  const double m = static_cast<double>(d.annotators);
  d.probabilities.resize(length);
  d.confidence.resize(length);
  d.tie.resize(length);
  d.label.resize(length);
  for (std::size_t i = 0; i < length; ++i) {
    for (std::size_t k = 0; k < kNumLabels; ++k) d.probabilities[i][k] = d.counts[i][k] / m;
    const auto [label, tied] = argmax_label(d.counts[i]);
    d.label[i] = label;
    d.tie[i] = tied;
    d.confidence[i] = d.counts[i][index_of(label)] / m;
  }
  return d;
}

inline LabelDistribution centroid(std::span<const AnnotationSet> sets, std::size_t length) {
  std::vector<std::vector<LabeledSpan>> spans;
  for (const auto& s : sets) spans.push_back(labeled_spans(s));
  return centroid(std::span<const std::vector<LabeledSpan>>(spans), length);
}

struct AggregatedComponent {
  CharSpan span;
  ComponentLabel label = ComponentLabel::Claim;
  /// Mean per-character confidence over the span.
  double confidence = 0;
  /// Some character of the span had a tied argmax.
  bool tie = false;
  std::optional<Sentiment> sentiment;
  std::optional<double> sentiment_confidence;
  bool sentiment_tie = false;
};

struct AggregatedRelation {
  std::size_t source = 0;  // indices into the document's aggregated components
  std::size_t target = 0;
  RelationKind kind = RelationKind::Support;
  /// Share of the document's annotators asserting a relation between the pair.
  double confidence = 0;
};

inline std::vector<AggregatedComponent> extract_components(const LabelDistribution& dist) {
  std::vector<AggregatedComponent> out;
  std::size_t i = 0;
  while (i < dist.size()) {
    const auto label = dist.label[i];
    std::size_t j = i;
    double conf = 0;
    bool tie = false;
    while (j < dist.size() && dist.label[j] == label) {
      conf += dist.confidence[j];
      tie = tie || dist.tie[j];
      ++j;
    }
    if (label != ComponentLabel::NA) {
      AggregatedComponent c;
      c.span = {i, j};
      c.label = label;
      c.confidence = conf / static_cast<double>(j - i);
      c.tie = tie;
      out.push_back(c);
    }
    i = j;
  }
  return out;
}

/// True when the overlap covers at least `threshold` of the shorter span.
inline bool aligned(CharSpan a, CharSpan b, double threshold) {
  const auto ov = a.overlap_length(b);
  if (ov == 0) return false;
  return static_cast<double>(ov) >= threshold * static_cast<double>(std::min(a.length(), b.length()));
}

struct SentimentVote {
  std::optional<Sentiment> sentiment;
  double confidence = 0;
  bool tie = false;
  std::size_t votes = 0;
};

/// Majority vote over the sentiments of annotator components that align with
/// `component` and share its label. Each annotator votes at most once (its
/// best-overlapping aligned component). An exact tie yields Neutral.
inline SentimentVote vote_sentiment(const AggregatedComponent& component,
                                    std::span<const AnnotationSet> sets,
                                    double overlap_threshold = 0.5) {
  SentimentVote v;
  if (!takes_sentiment(component.label)) return v;
  std::array<std::size_t, 3> tally{};
  for (const auto& set : sets) {
    const ComponentAnnotation* best = nullptr;
    std::size_t best_overlap = 0;
    for (const auto& c : set.components) {
      if (c.label != component.label || !c.sentiment) continue;
      if (!aligned(c.span, component.span, overlap_threshold)) continue;
      const auto ov = c.span.overlap_length(component.span);
      if (ov > best_overlap) {
        best = &c;
        best_overlap = ov;
      }
    }
    if (best) {
      ++tally[static_cast<std::size_t>(*best->sentiment)];
      ++v.votes;
    }
  }
  if (v.votes == 0) return v;
  const auto top = *std::max_element(tally.begin(), tally.end());
  const auto leaders = std::count(tally.begin(), tally.end(), top);
  v.confidence = static_cast<double>(top) / static_cast<double>(v.votes);
  if (leaders > 1) {
    v.sentiment = Sentiment::Neutral;
    v.tie = true;
  } else {
    v.sentiment = static_cast<Sentiment>(std::max_element(tally.begin(), tally.end()) - tally.begin());
  }
  return v;
}

struct RelationDiagnostics {
  std::size_t annotator_relations = 0;
  std::size_t unaligned = 0;       // an endpoint matched no consensus component
  std::size_t collapsed = 0;       // both endpoints aligned to the same component
  std::size_t below_majority = 0;  // candidate pairs without a strict majority
  std::size_t illegal = 0;         // majority pairs whose consensus labels forbid a relation
};

struct RelationVote {
  std::vector<AggregatedRelation> relations;
  RelationDiagnostics diagnostics;
};

/// Index of the component with maximal overlap, if it aligns.
inline std::optional<std::size_t> align_to(CharSpan span,
                                           std::span<const AggregatedComponent> components,
                                           double threshold) {
  std::optional<std::size_t> best;
  std::size_t best_overlap = 0;
  for (std::size_t i = 0; i < components.size(); ++i) {
    const auto ov = span.overlap_length(components[i].span);
    if (ov > best_overlap) {
      best = i;
      best_overlap = ov;
    }
  }
  if (best && !aligned(span, components[*best].span, threshold)) return std::nullopt;
  return best;
}

/// A relation is kept when more than half of the annotators assert one
/// between the same aligned pair; its kind is the majority kind among them
/// (Support on a tie).
inline RelationVote vote_relations(std::span<const AnnotationSet> sets,
                                   std::span<const AggregatedComponent> components,
                                   double overlap_threshold = 0.5,
                                   const ValidationPolicy& policy = {}) {
  RelationVote out;
  struct Votes {
    std::size_t support = 0;
    std::size_t attack = 0;
  };
  std::map<std::pair<std::size_t, std::size_t>, Votes> pairs;
  for (const auto& set : sets) {
    std::map<std::pair<std::size_t, std::size_t>, RelationKind> mine;
    for (const auto& r : set.relations) {
      ++out.diagnostics.annotator_relations;
      const auto* src = set.find(r.source);
      const auto* tgt = set.find(r.target);
      if (!src || !tgt) {
        ++out.diagnostics.unaligned;
        continue;
      }
      const auto s = align_to(src->span, components, overlap_threshold);
      const auto t = align_to(tgt->span, components, overlap_threshold);
      if (!s || !t) {
        ++out.diagnostics.unaligned;
        continue;
      }
      if (*s == *t) {
        ++out.diagnostics.collapsed;
        continue;
      }
      mine.emplace(std::make_pair(*s, *t), r.kind);
    }
    for (const auto& [pair, kind] : mine) {
      auto& v = pairs[pair];
      (kind == RelationKind::Support ? v.support : v.attack) += 1;
    }
  }
  const double m = static_cast<double>(sets.size());
  for (const auto& [pair, v] : pairs) {
    const double share = static_cast<double>(v.support + v.attack) / m;
    if (!(share > 0.5)) {
      ++out.diagnostics.below_majority;
      continue;
    }
    if (!is_legal_relation(components[pair.first].label, components[pair.second].label, policy)) {
      ++out.diagnostics.illegal;
      continue;
    }
    out.relations.push_back({pair.first, pair.second,
                             v.attack > v.support ? RelationKind::Attack : RelationKind::Support,
                             share});
  }
  return out;
}

struct AggregationOptions {
  double overlap_threshold = 0.5;
  bool relations = true;
  ValidationPolicy policy;
};

struct AggregatedDocument {
  std::vector<AggregatedComponent> components;
  std::vector<AggregatedRelation> relations;
  RelationDiagnostics diagnostics;
};

inline AggregatedDocument aggregate(std::span<const AnnotationSet> sets, std::size_t length,
                                    const AggregationOptions& opts = {}) {
  AggregatedDocument doc;
  doc.components = extract_components(centroid(sets, length));
  for (auto& c : doc.components) {
    const auto v = vote_sentiment(c, sets, opts.overlap_threshold);
    if (v.sentiment) {
      c.sentiment = v.sentiment;
      c.sentiment_confidence = v.confidence;
      c.sentiment_tie = v.tie;
    }
  }
  if (opts.relations) {
    auto votes = vote_relations(sets, doc.components, opts.overlap_threshold, opts.policy);
    doc.relations = std::move(votes.relations);
    doc.diagnostics = votes.diagnostics;
  }
  return doc;
}

inline void to_json(nlohmann::json& j, const AggregatedComponent& c) {
  j = nlohmann::json{{"start", c.span.start},
                     {"end", c.span.end},
                     {"label", to_string(c.label)},
                     {"confidence", c.confidence},
                     {"tie", c.tie}};
  if (c.sentiment) {
    j["sentiment"] = to_string(*c.sentiment);
    j["sentiment_confidence"] = *c.sentiment_confidence;
  }
}

inline void from_json(const nlohmann::json& j, AggregatedComponent& c) {
  c.span = {j.at("start").get<std::size_t>(), j.at("end").get<std::size_t>()};
  const auto label = parse_label(j.at("label").get<std::string>());
  if (!label) throw UnknownLabelError("unknown label " + j.at("label").dump());
  c.label = *label;
  c.confidence = j.at("confidence").get<double>();
  c.tie = j.at("tie").get<bool>();
  c.sentiment.reset();
  c.sentiment_confidence.reset();
  if (j.contains("sentiment")) {
    const auto s = parse_sentiment(j.at("sentiment").get<std::string>());
    if (!s) throw UnknownLabelError("unknown sentiment " + j.at("sentiment").dump());
    c.sentiment = *s;
    c.sentiment_confidence = j.at("sentiment_confidence").get<double>();
  }
}

inline void to_json(nlohmann::json& j, const AggregatedRelation& r) {
  j = nlohmann::json{{"source", r.source},
                     {"target", r.target},
                     {"kind", to_string(r.kind)},
                     {"confidence", r.confidence}};
}

inline void from_json(const nlohmann::json& j, AggregatedRelation& r) {
  r.source = j.at("source").get<std::size_t>();
  r.target = j.at("target").get<std::size_t>();
  const auto kind = parse_relation_kind(j.at("kind").get<std::string>());
  if (!kind) throw UnknownLabelError("unknown relation kind " + j.at("kind").dump());
  r.kind = *kind;
  r.confidence = j.at("confidence").get<double>();
}

inline void to_json(nlohmann::json& j, const RelationDiagnostics& d) {
  j = nlohmann::json{{"annotator_relations", d.annotator_relations},
                     {"unaligned", d.unaligned},
                     {"collapsed", d.collapsed},
                     {"below_majority", d.below_majority},
                     {"illegal", d.illegal}};
}

}  // namespace argcrowd

#endif  // ARGCROWD_AGGREGATE_HPP
