#ifndef ARGCROWD_ARGMODEL_HPP
#define ARGCROWD_ARGMODEL_HPP

// Argumentation model for review texts: component labels, sentiments,
// support/attack relations, and the legality rules an annotation set must
// satisfy before it is admitted into a campaign.
//
// Legal structure:
//   Premise --Support/Attack--> Claim        (always)
//   Premise --Support/Attack--> MajorClaim   (ValidationPolicy flag)
//   MajorClaim, Claim           carry a sentiment
//   Premise, PSIC               carry none
//   every Premise               has at least one outgoing relation

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "argcrowd/errors.hpp"
#include "json.hpp"

namespace argcrowd {

/// Canonical order matters: it is the index order of one-hot vectors and the
/// tie-break order used during aggregation.
enum class ComponentLabel : std::uint8_t { MajorClaim = 0, Claim, Premise, PSIC, NA };

inline constexpr std::size_t kNumLabels = 5;
inline constexpr std::size_t kNumComponentLabels = 4;  // labels other than NA

inline constexpr std::array<ComponentLabel, kNumLabels> kAllLabels = {
    ComponentLabel::MajorClaim, ComponentLabel::Claim, ComponentLabel::Premise,
    ComponentLabel::PSIC, ComponentLabel::NA};

inline constexpr std::array<ComponentLabel, kNumComponentLabels> kComponentLabels = {
    ComponentLabel::MajorClaim, ComponentLabel::Claim, ComponentLabel::Premise,
    ComponentLabel::PSIC};

constexpr std::size_t index_of(ComponentLabel label) noexcept {
  return static_cast<std::size_t>(label);
}

enum class Sentiment : std::uint8_t { Positive = 0, Negative, Neutral };
inline constexpr std::array<Sentiment, 3> kAllSentiments = {Sentiment::Positive,
                                                            Sentiment::Negative,
                                                            Sentiment::Neutral};

enum class RelationKind : std::uint8_t { Support = 0, Attack };

inline std::string_view to_string(ComponentLabel label) {
  switch (label) {
    case ComponentLabel::MajorClaim: return "MajorClaim";
    case ComponentLabel::Claim: return "Claim";
    case ComponentLabel::Premise: return "Premise";
    case ComponentLabel::PSIC: return "PSIC";
    case ComponentLabel::NA: return "NA";
  }
  return "?";
}

inline std::string_view to_string(Sentiment s) {
  switch (s) {
    case Sentiment::Positive: return "Positive";
    case Sentiment::Negative: return "Negative";
    case Sentiment::Neutral: return "Neutral";
  }
  return "?";
}

inline std::string_view to_string(RelationKind k) {
  return k == RelationKind::Support ? "Support" : "Attack";
}

inline std::optional<ComponentLabel> parse_label(std::string_view s) {
  for (auto label : kAllLabels) {
    if (to_string(label) == s) return label;
  }
  return std::nullopt;
}

inline std::optional<Sentiment> parse_sentiment(std::string_view s) {
  for (auto v : kAllSentiments) {
    if (to_string(v) == s) return v;
  }
  return std::nullopt;
}

inline std::optional<RelationKind> parse_relation_kind(std::string_view s) {
  if (s == "Support") return RelationKind::Support;
  if (s == "Attack") return RelationKind::Attack;
  return std::nullopt;
}

constexpr bool takes_sentiment(ComponentLabel label) noexcept {
  return label == ComponentLabel::MajorClaim || label == ComponentLabel::Claim;
}

/// Half-open range of code points [start, end).
struct CharSpan {
  std::size_t start = 0;
  std::size_t end = 0;

  constexpr std::size_t length() const noexcept { return end > start ? end - start : 0; }
  constexpr bool empty() const noexcept { return end <= start; }
  constexpr bool overlaps(const CharSpan& o) const noexcept {
    return start < o.end && o.start < end;
  }
  constexpr bool contains(const CharSpan& o) const noexcept {
    return start <= o.start && o.end <= end;
  }
  constexpr std::size_t overlap_length(const CharSpan& o) const noexcept {
    const auto lo = std::max(start, o.start);
    const auto hi = std::min(end, o.end);
    return hi > lo ? hi - lo : 0;
  }
  constexpr bool operator==(const CharSpan&) const = default;
  constexpr auto operator<=>(const CharSpan&) const = default;
};

struct ComponentAnnotation {
  std::string id;
  CharSpan span;
  ComponentLabel label = ComponentLabel::Claim;
  std::optional<Sentiment> sentiment;

  bool operator==(const ComponentAnnotation&) const = default;
};

struct RelationAnnotation {
  std::string id;
  RelationKind kind = RelationKind::Support;
  std::string source;
  std::string target;

  bool operator==(const RelationAnnotation&) const = default;
};

/// One annotator's labelling of one document.
struct AnnotationSet {
  std::string annotator_id;
  std::string document_id;
  std::vector<ComponentAnnotation> components;
  std::vector<RelationAnnotation> relations;

  const ComponentAnnotation* find(std::string_view id) const {
    for (const auto& c : components) {
      if (c.id == id) return &c;
    }
    return nullptr;
  }

  bool operator==(const AnnotationSet&) const = default;
};

// ---------------------------------------------------------------------------
// Validation

enum class Rule : std::uint8_t {
  EmptySpan,
  SpanOutOfRange,
  NotAComponent,  // a component carrying the NA label
  DuplicateId,
  OverlappingComponents,
  MissingSentiment,
  UnexpectedSentiment,
  DanglingEndpoint,
  SelfRelation,
  DuplicateRelation,
  IllegalRelationEndpoints,
  MultipleTargets,
  UnattachedPremise,
};

inline std::string_view to_string(Rule r) {
  switch (r) {
    case Rule::EmptySpan: return "EmptySpan";
    case Rule::SpanOutOfRange: return "SpanOutOfRange";
    case Rule::NotAComponent: return "NotAComponent";
    case Rule::DuplicateId: return "DuplicateId";
    case Rule::OverlappingComponents: return "OverlappingComponents";
    case Rule::MissingSentiment: return "MissingSentiment";
    case Rule::UnexpectedSentiment: return "UnexpectedSentiment";
    case Rule::DanglingEndpoint: return "DanglingEndpoint";
    case Rule::SelfRelation: return "SelfRelation";
    case Rule::DuplicateRelation: return "DuplicateRelation";
    case Rule::IllegalRelationEndpoints: return "IllegalRelationEndpoints";
    case Rule::MultipleTargets: return "MultipleTargets";
    case Rule::UnattachedPremise: return "UnattachedPremise";
  }
  return "?";
}

inline std::optional<Rule> parse_rule(std::string_view s) {
  for (int i = 0; i <= static_cast<int>(Rule::UnattachedPremise); ++i) {
    const auto r = static_cast<Rule>(i);
    if (to_string(r) == s) return r;
  }
  return std::nullopt;
}

enum class Severity : std::uint8_t { Error, Warning };

inline std::string_view to_string(Severity s) {
  return s == Severity::Error ? "Error" : "Warning";
}

struct ValidationPolicy {
  bool allow_premise_to_major_claim = true;
  bool allow_multiple_targets = true;
  /// Rules reported as Warning instead of Error.
  std::set<Rule> downgraded;

  Severity severity_of(Rule r) const {
    return downgraded.count(r) ? Severity::Warning : Severity::Error;
  }
};

struct Violation {
  std::string doc_id;
  std::string annotator_id;
  Rule rule = Rule::EmptySpan;
  std::string target_id;
  Severity severity = Severity::Error;
  std::string message;

  bool operator==(const Violation&) const = default;
};

inline bool has_errors(const std::vector<Violation>& violations) {
  return std::any_of(violations.begin(), violations.end(),
                     [](const Violation& v) { return v.severity == Severity::Error; });
}

inline bool is_legal_relation(ComponentLabel source, ComponentLabel target,
                              const ValidationPolicy& policy) {
  if (source != ComponentLabel::Premise) return false;
  if (target == ComponentLabel::Claim) return true;
  return target == ComponentLabel::MajorClaim && policy.allow_premise_to_major_claim;
}

/// Checks `set` against every legality rule. Violations are returned, never
/// thrown; the order is deterministic (components by position in the set,
/// then relations, then premise attachment).
inline std::vector<Violation> validate(const AnnotationSet& set, std::size_t doc_length,
                                       const ValidationPolicy& policy = {}) {
  std::vector<Violation> out;
  auto report = [&](Rule rule, const std::string& target, std::string message) {
    out.push_back(Violation{set.document_id, set.annotator_id, rule, target,
                            policy.severity_of(rule), std::move(message)});
  };

  std::map<std::string, const ComponentAnnotation*> by_id;
  for (const auto& c : set.components) {
    if (!by_id.emplace(c.id, &c).second) {
      report(Rule::DuplicateId, c.id, "component id used more than once");
    }
    if (c.span.empty()) {
      report(Rule::EmptySpan, c.id, "span is empty");
    }
    if (c.span.end > doc_length) {
      report(Rule::SpanOutOfRange, c.id,
             "span ends at " + std::to_string(c.span.end) + " beyond document length " +
                 std::to_string(doc_length));
    }
    if (c.label == ComponentLabel::NA) {
      report(Rule::NotAComponent, c.id, "NA is not an annotatable component label");
    }
    if (takes_sentiment(c.label) && !c.sentiment) {
      report(Rule::MissingSentiment, c.id,
             std::string(to_string(c.label)) + " has no sentiment");
    } else if (!takes_sentiment(c.label) && c.sentiment) {
      report(Rule::UnexpectedSentiment, c.id,
             std::string(to_string(c.label)) + " must not carry a sentiment");
    }
  }

  // Overlaps: sort by start and compare neighbours against the running max end.
  {
    std::vector<const ComponentAnnotation*> sorted;
    for (const auto& c : set.components) {
      if (!c.span.empty()) sorted.push_back(&c);
    }
    std::stable_sort(sorted.begin(), sorted.end(), [](const auto* a, const auto* b) {
      return a->span.start < b->span.start;
    });
    const ComponentAnnotation* reach = nullptr;
    for (const auto* c : sorted) {
      if (reach != nullptr && c->span.start < reach->span.end) {
        report(Rule::OverlappingComponents, c->id, "overlaps component " + reach->id);
      }
      if (reach == nullptr || c->span.end > reach->span.end) reach = c;
    }
  }

  std::set<std::pair<std::string, std::string>> seen_pairs;
  std::map<std::string, int> outgoing;
  for (const auto& r : set.relations) {
    const auto src = by_id.find(r.source);
    const auto tgt = by_id.find(r.target);
    if (src == by_id.end() || tgt == by_id.end()) {
      report(Rule::DanglingEndpoint, r.id, "relation endpoint does not exist");
      continue;
    }
    if (r.source == r.target) {
      report(Rule::SelfRelation, r.id, "relation links a component to itself");
      continue;
    }
    if (!seen_pairs.emplace(r.source, r.target).second) {
      report(Rule::DuplicateRelation, r.id,
             "second relation between " + r.source + " and " + r.target);
    }
    const auto sl = src->second->label;
    const auto tl = tgt->second->label;
    if (!is_legal_relation(sl, tl, policy)) {
      report(Rule::IllegalRelationEndpoints, r.id,
             std::string(to_string(sl)) + " cannot " +
                 (r.kind == RelationKind::Support ? "support " : "attack ") +
                 std::string(to_string(tl)));
    }
    ++outgoing[r.source];
  }

  for (const auto& c : set.components) {
    if (c.label != ComponentLabel::Premise) continue;
    const auto it = outgoing.find(c.id);
    const int n = it == outgoing.end() ? 0 : it->second;
    if (n == 0) {
      report(Rule::UnattachedPremise, c.id, "premise supports or attacks no claim");
    } else if (n > 1 && !policy.allow_multiple_targets) {
      report(Rule::MultipleTargets, c.id, "premise has more than one target");
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Character projection

/// A label on a span; the minimal view of a component used by the metrics.
struct LabeledSpan {
  CharSpan span;
  ComponentLabel label = ComponentLabel::Claim;

  bool operator==(const LabeledSpan&) const = default;
};

inline std::vector<LabeledSpan> labeled_spans(const AnnotationSet& set) {
  std::vector<LabeledSpan> out;
  out.reserve(set.components.size());
  for (const auto& c : set.components) out.push_back({c.span, c.label});
  std::sort(out.begin(), out.end(),
            [](const LabeledSpan& a, const LabeledSpan& b) { return a.span < b.span; });
  return out;
}

/// Per-character labels; characters outside every span are NA.
inline std::vector<ComponentLabel> to_char_labels(std::span<const LabeledSpan> spans,
                                                  std::size_t doc_length) {
  std::vector<ComponentLabel> labels(doc_length, ComponentLabel::NA);
  std::vector<bool> covered(doc_length, false);
  for (const auto& s : spans) {
    if (s.span.end > doc_length) {
      throw Error("span [" + std::to_string(s.span.start) + "," +
                               std::to_string(s.span.end) + ") exceeds length " +
                               std::to_string(doc_length));
    }
    for (std::size_t i = s.span.start; i < s.span.end; ++i) {
      if (covered[i]) {
        throw OverlapError("components overlap at character " + std::to_string(i));
      }
      covered[i] = true;
      labels[i] = s.label;
    }
  }
  return labels;
}

inline std::vector<ComponentLabel> to_char_labels(const AnnotationSet& set,
                                                  std::size_t doc_length) {
  const auto spans = labeled_spans(set);
  return to_char_labels(std::span<const LabeledSpan>(spans), doc_length);
}

/// Maximal runs of equal non-NA labels.
inline std::vector<LabeledSpan> spans_from_char_labels(std::span<const ComponentLabel> labels) {
  std::vector<LabeledSpan> out;
  std::size_t i = 0;
  while (i < labels.size()) {
    const auto l = labels[i];
    std::size_t j = i + 1;
    while (j < labels.size() && labels[j] == l) ++j;
    if (l != ComponentLabel::NA) out.push_back({{i, j}, l});
    i = j;
  }
  return out;
}

/// Spans clipped to `window` and translated so the window starts at 0.
/// Spans that fall outside the window are dropped.
inline std::vector<LabeledSpan> clip_spans(std::span<const LabeledSpan> spans, CharSpan window) {
  std::vector<LabeledSpan> out;
  for (const auto& s : spans) {
    const auto lo = std::max(s.span.start, window.start);
    const auto hi = std::min(s.span.end, window.end);
    if (lo < hi) out.push_back({{lo - window.start, hi - window.start}, s.label});
  }
  return out;
}

/// Components clipped to `window` and shifted to window-local offsets.
/// Relations are dropped.
inline AnnotationSet clip_set(const AnnotationSet& set, CharSpan window) {
  AnnotationSet out{set.annotator_id, set.document_id, {}, {}};
  for (const auto& c : set.components) {
    const auto lo = std::max(c.span.start, window.start);
    const auto hi = std::min(c.span.end, window.end);
    if (lo < hi) out.components.push_back({c.id, {lo - window.start, hi - window.start}, c.label, c.sentiment});
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON

inline void to_json(nlohmann::json& j, const Violation& v) {
  j = nlohmann::json{{"doc_id", v.doc_id},
                     {"annotator_id", v.annotator_id},
                     {"rule", to_string(v.rule)},
                     {"target_id", v.target_id},
                     {"severity", to_string(v.severity)},
                     {"message", v.message}};
}

inline void to_json(nlohmann::json& j, const CharSpan& s) {
  j = nlohmann::json{{"start", s.start}, {"end", s.end}};
}

inline void to_json(nlohmann::json& j, const AnnotationSet& set) {
  nlohmann::json comps = nlohmann::json::array();
  for (const auto& c : set.components) {
    nlohmann::json jc{{"id", c.id},
                      {"start", c.span.start},
                      {"end", c.span.end},
                      {"label", to_string(c.label)}};
    if (c.sentiment) jc["sentiment"] = to_string(*c.sentiment);
    comps.push_back(std::move(jc));
  }
  nlohmann::json rels = nlohmann::json::array();
  for (const auto& r : set.relations) {
    rels.push_back({{"id", r.id},
                    {"kind", to_string(r.kind)},
                    {"source", r.source},
                    {"target", r.target}});
  }
  j = nlohmann::json{{"annotator_id", set.annotator_id},
                     {"document_id", set.document_id},
                     {"components", std::move(comps)},
                     {"relations", std::move(rels)}};
}

inline void from_json(const nlohmann::json& j, AnnotationSet& set) {
  set.annotator_id = j.at("annotator_id").get<std::string>();
  set.document_id = j.at("document_id").get<std::string>();
  set.components.clear();
  set.relations.clear();
  for (const auto& jc : j.at("components")) {
    ComponentAnnotation c;
    c.id = jc.at("id").get<std::string>();
    c.span = {jc.at("start").get<std::size_t>(), jc.at("end").get<std::size_t>()};
    const auto label = parse_label(jc.at("label").get<std::string>());
    if (!label) throw UnknownLabelError("unknown label " + jc.at("label").dump());
    c.label = *label;
    if (jc.contains("sentiment")) {
      const auto s = parse_sentiment(jc.at("sentiment").get<std::string>());
      if (!s) throw UnknownLabelError("unknown sentiment " + jc.at("sentiment").dump());
      c.sentiment = *s;
    }
    set.components.push_back(std::move(c));
  }
  for (const auto& jr : j.at("relations")) {
    RelationAnnotation r;
    r.id = jr.at("id").get<std::string>();
    const auto kind = parse_relation_kind(jr.at("kind").get<std::string>());
    if (!kind) throw UnknownLabelError("unknown relation kind " + jr.at("kind").dump());
    r.kind = *kind;
    r.source = jr.at("source").get<std::string>();
    r.target = jr.at("target").get<std::string>();
    set.relations.push_back(std::move(r));
  }
}

}  // namespace argcrowd

#endif  // ARGCROWD_ARGMODEL_HPP
