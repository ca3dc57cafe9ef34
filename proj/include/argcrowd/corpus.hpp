#ifndef ARGCROWD_CORPUS_HPP
#define ARGCROWD_CORPUS_HPP

// Two corpora from a filtered campaign. Documents whose alpha_u reaches the
// easy threshold are aggregated whole, relations included. The remaining
// (controversial) documents are cut into sentences, and sentences reaching
// the sentence threshold are aggregated without relations.

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "argcrowd/agreement_report.hpp"
#include "argcrowd/aggregate.hpp"
#include "argcrowd/errors.hpp"
#include "argcrowd/nominal_agreement.hpp"
#include "argcrowd/parallel.hpp"
#include "argcrowd/standoff.hpp"
#include "argcrowd/text_table.hpp"
#include "json.hpp"

namespace argcrowd {

struct Thresholds {
  double easy = 0.6;
  double sentence = 0.7;

  void validate() const {
    if (!(easy >= -1 && easy <= 1)) throw ConfigError("easy threshold must lie in [-1, 1]");
    if (!(sentence >= -1 && sentence <= 1)) throw ConfigError("sentence threshold must lie in [-1, 1]");
  }
};

/// Undefined scores never pass a threshold.
inline bool reaches(const Score& s, double threshold) { return s.defined() && s.value() >= threshold; }

struct SplitResult {
  std::vector<std::size_t> easy;           // indices into the input
  std::vector<std::size_t> controversial;  // includes undefined
  std::vector<std::size_t> undefined;
};

inline SplitResult split(std::span<const Score> document_scores, const Thresholds& t) {
  SplitResult out;
  for (std::size_t i = 0; i < document_scores.size(); ++i) {
    if (reaches(document_scores[i], t.easy)) {
      out.easy.push_back(i);
    } else {
      out.controversial.push_back(i);
      if (!document_scores[i].defined()) out.undefined.push_back(i);
    }
  }
  return out;
}

struct CorpusRecord {
  std::string doc_id;
  std::optional<std::size_t> sentence_index;
  /// Offsets of the record within its document; components are relative to start.
  CharSpan span;
  std::string text;
  Score alpha_u;
  std::vector<AggregatedComponent> components;
  std::optional<std::vector<AggregatedRelation>> relations;
};

struct ComponentRow {
  ComponentLabel label = ComponentLabel::Claim;
  std::size_t total = 0;
  double average = 0;
  Score percentage, multi_pi, alpha, alpha_u;
};

struct SentimentRow {
  ComponentLabel label = ComponentLabel::Claim;
  Sentiment sentiment = Sentiment::Positive;
  std::size_t total = 0;
  Score percentage, multi_pi, alpha;
};

struct RelationRow {
  RelationKind kind = RelationKind::Support;
  std::size_t total = 0;
  /// Records holding at least one aggregated relation of this kind.
  std::size_t records = 0;
  Score percentage, multi_pi, alpha;
};

struct CorpusStatistics {
  std::string name;
  std::size_t records = 0;
  double mean_annotators = 0;
  std::array<ComponentRow, kNumComponentLabels> components;
  std::vector<SentimentRow> sentiments;
  std::optional<std::vector<RelationRow>> relations;
};

struct CorpusCounts {
  std::size_t documents = 0;
  std::size_t easy = 0;
  std::size_t controversial = 0;
  std::size_t undefined_documents = 0;
  std::size_t sentences = 0;  // in controversial documents
  std::size_t sentences_selected = 0;
  std::size_t sentences_undefined = 0;
};

struct CorpusBuild {
  std::vector<CorpusRecord> easy;
  std::vector<CorpusRecord> sentences;
  CorpusStatistics easy_statistics;
  CorpusStatistics sentence_statistics;
  CorpusCounts counts;
  std::vector<std::string> undefined_documents;
};

struct BuildOptions {
  Thresholds thresholds;
  UnitizedAlphaOptions alpha;
  AggregationOptions aggregation;
  std::size_t threads = 1;
};

namespace corpus_detail {

/// A record plus what its statistics need: the window-local sets and the
/// record's own agreement report.
struct Entry {
  CorpusRecord record;
  std::vector<AnnotationSet> sets;
  AgreementReport report;
};

struct DocumentOutcome {
  Score alpha_u;
  bool easy = false;
  std::optional<Entry> easy_entry;
  std::vector<Entry> sentence_entries;
  std::size_t sentences = 0;
  std::size_t sentences_undefined = 0;
};

inline Entry make_entry(const AnnotationBundle& b, std::optional<std::size_t> sentence, CharSpan window,
                        AgreementReport report, const AggregationOptions& agg) {
  Entry e;
  e.report = std::move(report);
  for (const auto& s : b.sets) {
    if (sentence) {
      e.sets.push_back(clip_set(s, window));
    } else {
      e.sets.push_back(s);
    }
  }
  auto opts = agg;
  opts.relations = !sentence;
  auto doc = aggregate(e.sets, window.length(), opts);
  e.record = {b.document.id(),
              sentence,
              window,
              std::string(b.document.slice(window)),
              e.report.headline(),
              std::move(doc.components),
              std::nullopt};
  if (!sentence) e.record.relations = std::move(doc.relations);
  return e;
}

inline DocumentOutcome process(const AnnotationBundle& b, const BuildOptions& opts) {
  DocumentOutcome out;
  const auto spans = b.annotator_spans();
  auto doc_report = report_continuum(b.document.id(), std::nullopt, spans, {0, b.document.length()}, opts.alpha);
  out.alpha_u = doc_report.headline();
  if (reaches(out.alpha_u, opts.thresholds.easy)) {
    out.easy = true;
    out.easy_entry = make_entry(b, std::nullopt, {0, b.document.length()}, std::move(doc_report), opts.aggregation);
    return out;
  }
  const auto sentences = sentences_of(b.document);
  out.sentences = sentences.size();
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    auto r = report_continuum(b.document.id(), i, spans, sentences[i], opts.alpha);
    if (!r.headline().defined()) ++out.sentences_undefined;
    if (reaches(r.headline(), opts.thresholds.sentence)) {
      out.sentence_entries.push_back(make_entry(b, i, sentences[i], std::move(r), opts.aggregation));
    }
  }
  return out;
}

// Sentiment categories: MajorClaim x 3, Claim x 3, then "other".
constexpr std::size_t kSentimentCategories = 7;

inline std::size_t sentiment_category(ComponentLabel l, std::optional<Sentiment> s) {
  if (!s || !takes_sentiment(l)) return 6;
  return (l == ComponentLabel::MajorClaim ? 0 : 3) + static_cast<std::size_t>(*s);
}

inline void pooled_scores(const LabelMatrix& m, Score& pct, Score& pi, Score& alpha) {
  pct = percentage_agreement(m);
  pi = multi_pi(m);
  alpha = kripp_alpha_nominal(m);
}

inline CorpusStatistics statistics(std::string name, const std::vector<const Entry*>& entries, bool relations) {
  CorpusStatistics st;
  st.name = std::move(name);
  st.records = entries.size();
  std::size_t width = 2;
  double annotators = 0;
  for (const auto* e : entries) {
    width = std::max(width, e->sets.size());
    annotators += static_cast<double>(e->sets.size());
  }
  if (!entries.empty()) st.mean_annotators = annotators / static_cast<double>(entries.size());

  LabelMatrix labels(0, width, kNumLabels);
  LabelMatrix sentiments(0, width, kSentimentCategories);
  LabelMatrix pairs(0, width, 3);  // none, Support, Attack
  for (const auto* e : entries) {
    const auto len = e->record.span.length();
    std::vector<std::vector<LabeledSpan>> spans;
    for (const auto& s : e->sets) spans.push_back(labeled_spans(s));
    labels.append(label_matrix(spans, len));

    LabelMatrix sm(len, e->sets.size(), kSentimentCategories);
    for (std::size_t a = 0; a < e->sets.size(); ++a) {
      for (std::size_t i = 0; i < len; ++i) sm.set(i, a, 6);
      for (const auto& c : e->sets[a].components) {
        for (auto i = c.span.start; i < c.span.end; ++i) sm.set(i, a, sentiment_category(c.label, c.sentiment));
      }
    }
    sentiments.append(sm);

    if (relations) {
      const auto& comps = e->record.components;
      const std::size_t n = comps.size();
      LabelMatrix rm(n * n, e->sets.size(), 3);
      for (std::size_t a = 0; a < e->sets.size(); ++a) {
        std::vector<std::size_t> value(n * n, 0);
        for (const auto& r : e->sets[a].relations) {
          const auto* src = e->sets[a].find(r.source);
          const auto* tgt = e->sets[a].find(r.target);
          if (!src || !tgt) continue;
          const auto s = align_to(src->span, comps, 0.5);
          const auto t = align_to(tgt->span, comps, 0.5);
          if (!s || !t || *s == *t) continue;
          auto& v = value[*s * n + *t];
          if (v == 0) v = r.kind == RelationKind::Support ? 1 : 2;
        }
        for (std::size_t k = 0; k < n * n; ++k) {
          if (k / n != k % n) rm.set(k, a, value[k]);
        }
      }
      pairs.append(rm);
    }
  }

  for (auto label : kComponentLabels) {
    auto& row = st.components[index_of(label)];
    row.label = label;
    double sum = 0;
    std::size_t scored = 0;
    for (const auto* e : entries) {
      for (const auto& c : e->record.components) row.total += c.label == label;
      const auto& s = e->report.per_label[index_of(label)].alpha_u;
      if (s.defined()) sum += s.value(), ++scored;
    }
    row.average = entries.empty() ? 0 : static_cast<double>(row.total) / static_cast<double>(entries.size());
    if (entries.empty()) {
      row.percentage = row.multi_pi = row.alpha = row.alpha_u = Score::undefined("no record");
      continue;
    }
    pooled_scores(labels.binarized(index_of(label)), row.percentage, row.multi_pi, row.alpha);
    row.alpha_u = scored ? Score::of(sum / static_cast<double>(scored))
                         : Score::undefined("no record with a defined score");
  }

  for (auto label : {ComponentLabel::MajorClaim, ComponentLabel::Claim}) {
    for (auto sentiment : kAllSentiments) {
      SentimentRow row{label, sentiment, 0, {}, {}, {}};
      for (const auto* e : entries) {
        for (const auto& c : e->record.components) row.total += c.label == label && c.sentiment == sentiment;
      }
      if (entries.empty()) {
        row.percentage = row.multi_pi = row.alpha = Score::undefined("no record");
      } else {
        pooled_scores(sentiments.binarized(sentiment_category(label, sentiment)), row.percentage, row.multi_pi,
                      row.alpha);
      }
      st.sentiments.push_back(row);
    }
  }

  if (relations) {
    st.relations.emplace();
    for (auto kind : {RelationKind::Support, RelationKind::Attack}) {
      RelationRow row{kind, 0, 0, {}, {}, {}};
      for (const auto* e : entries) {
        std::size_t here = 0;
        for (const auto& r : *e->record.relations) here += r.kind == kind;
        row.total += here;
        row.records += here > 0;
      }
      if (pairs.items() == 0) {
        row.percentage = row.multi_pi = row.alpha = Score::undefined("no component pair");
      } else {
        pooled_scores(pairs.binarized(kind == RelationKind::Support ? 1 : 2), row.percentage, row.multi_pi,
                      row.alpha);
      }
      st.relations->push_back(row);
    }
  }
  return st;
}

}  // namespace corpus_detail

/// Gold documents are excluded. Records come out ordered by document then
/// sentence index.
inline CorpusBuild build(std::span<const AnnotationBundle> bundles, const BuildOptions& opts = {}) {
  using namespace corpus_detail;
  opts.thresholds.validate();
  std::vector<const AnnotationBundle*> docs;
  for (const auto& b : bundles) {
    if (!b.is_gold()) docs.push_back(&b);
  }
  auto outcomes = parallel_map<DocumentOutcome>(docs.size(), opts.threads,
                                                [&](std::size_t i) { return process(*docs[i], opts); });

  CorpusBuild out;
  std::vector<const Entry*> easy_entries, sentence_entries;
  out.counts.documents = docs.size();
  for (std::size_t i = 0; i < docs.size(); ++i) {
    auto& o = outcomes[i];
    if (o.easy) {
      ++out.counts.easy;
      easy_entries.push_back(&*o.easy_entry);
      out.easy.push_back(o.easy_entry->record);
      continue;
    }
    ++out.counts.controversial;
    if (!o.alpha_u.defined()) {
      ++out.counts.undefined_documents;
      out.undefined_documents.push_back(docs[i]->document.id());
    }
    out.counts.sentences += o.sentences;
    out.counts.sentences_undefined += o.sentences_undefined;
    out.counts.sentences_selected += o.sentence_entries.size();
    for (const auto& e : o.sentence_entries) {
      sentence_entries.push_back(&e);
      out.sentences.push_back(e.record);
    }
  }
  out.easy_statistics = statistics("easy", easy_entries, true);
  out.sentence_statistics = statistics("sentences", sentence_entries, false);
  return out;
}

// ---------------------------------------------------------------------------
// Output

inline void to_json(nlohmann::json& j, const CorpusRecord& r) {
  j = nlohmann::json::object();
  j["doc_id"] = r.doc_id;
  if (r.sentence_index) j["sentence_index"] = *r.sentence_index;
  j["text"] = r.text;
  j["alpha_u"] = r.alpha_u;
  j["components"] = r.components;
  if (r.relations) j["relations"] = *r.relations;
}

/// `span` is not serialized; callers restore it from the source document.
inline void from_json(const nlohmann::json& j, CorpusRecord& r) {
  r.doc_id = j.at("doc_id").get<std::string>();
  r.sentence_index.reset();
  if (j.contains("sentence_index")) r.sentence_index = j.at("sentence_index").get<std::size_t>();
  r.text = j.at("text").get<std::string>();
  r.alpha_u = j.at("alpha_u").get<Score>();
  r.components = j.at("components").get<std::vector<AggregatedComponent>>();
  r.relations.reset();
  if (j.contains("relations")) r.relations = j.at("relations").get<std::vector<AggregatedRelation>>();
  r.span = {};
}

inline void to_json(nlohmann::json& j, const CorpusCounts& c) {
  j = nlohmann::json{{"documents", c.documents},
                     {"easy", c.easy},
                     {"controversial", c.controversial},
                     {"undefined_documents", c.undefined_documents},
                     {"sentences", c.sentences},
                     {"sentences_selected", c.sentences_selected},
                     {"sentences_undefined", c.sentences_undefined}};
}

inline void to_json(nlohmann::json& j, const CorpusStatistics& s) {
  nlohmann::json comps = nlohmann::json::array();
  for (const auto& r : s.components) {
    comps.push_back({{"label", to_string(r.label)},
                     {"total", r.total},
                     {"average", r.average},
                     {"percentage", r.percentage},
                     {"multi_pi", r.multi_pi},
                     {"alpha", r.alpha},
                     {"alpha_u", r.alpha_u}});
  }
  nlohmann::json sents = nlohmann::json::array();
  for (const auto& r : s.sentiments) {
    sents.push_back({{"label", to_string(r.label)},
                     {"sentiment", to_string(r.sentiment)},
                     {"total", r.total},
                     {"percentage", r.percentage},
                     {"multi_pi", r.multi_pi},
                     {"alpha", r.alpha}});
  }
  j = nlohmann::json{{"name", s.name},
                     {"records", s.records},
                     {"mean_annotators", s.mean_annotators},
                     {"components", std::move(comps)},
                     {"sentiments", std::move(sents)}};
  if (s.relations) {
    nlohmann::json rels = nlohmann::json::array();
    for (const auto& r : *s.relations) {
      rels.push_back({{"kind", to_string(r.kind)},
                      {"total", r.total},
                      {"records_with_relations", r.records},
                      {"percentage", r.percentage},
                      {"multi_pi", r.multi_pi},
                      {"alpha", r.alpha}});
    }
    j["relations"] = std::move(rels);
  }
}

inline std::string short_label(ComponentLabel l) {
  return l == ComponentLabel::MajorClaim ? "MC" : std::string(to_string(l));
}

inline std::string render(const CorpusStatistics& s) {
  std::string out = s.name + " corpus: " + std::to_string(s.records) + " records, " +
                    fixed(s.mean_annotators, 2) + " annotators per record\n";
  TextTable comps({"Label", "Total", "avg.", "%", "pi", "alpha", "alpha_U"});
  for (const auto& r : s.components) {
    comps.add({std::string(to_string(r.label)), std::to_string(r.total), fixed(r.average, 1),
               fixed(r.percentage), fixed(r.multi_pi), fixed(r.alpha), fixed(r.alpha_u)});
  }
  out += comps.render() + '\n';
  TextTable other({"Label/Relation", "Total", "%", "pi", "alpha"});
  for (const auto& r : s.sentiments) {
    other.add({short_label(r.label) + "(" + std::string(to_string(r.sentiment)) + ")", std::to_string(r.total),
               fixed(r.percentage), fixed(r.multi_pi), fixed(r.alpha)});
  }
  if (s.relations) {
    for (const auto& r : *s.relations) {
      other.add({std::string(to_string(r.kind)) + "(" + std::to_string(r.records) + " records)",
                 std::to_string(r.total), fixed(r.percentage), fixed(r.multi_pi), fixed(r.alpha)});
    }
  }
  return out + other.render();
}

}  // namespace argcrowd

#endif  // ARGCROWD_CORPUS_HPP
