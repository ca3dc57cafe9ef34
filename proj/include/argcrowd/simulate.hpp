#ifndef ARGCROWD_SIMULATE_HPP
#define ARGCROWD_SIMULATE_HPP

// Synthetic annotation campaigns with known ground truth.
//
// Documents are strings of CJK characters cut into sentences and comma
// separated clauses; ground-truth components are whole clauses. Devoted
// annotators copy the truth through a noise channel (boundary jitter, label
// flips, dropped relations, flipped sentiments). Spammers ignore the truth
// and place random units. Every document draws from its own derived random
// stream, so output is independent of generation order and thread count.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "argcrowd/argmodel.hpp"
#include "argcrowd/errors.hpp"
#include "argcrowd/parallel.hpp"
#include "argcrowd/random.hpp"
#include "argcrowd/standoff.hpp"
#include "argcrowd/utf8.hpp"
#include "json.hpp"

namespace argcrowd {

enum class AnnotatorKind : std::uint8_t { Devoted, Spammer };

inline std::string_view to_string(AnnotatorKind k) {
  return k == AnnotatorKind::Devoted ? "Devoted" : "Spammer";
}

/// Row = true label, column = replacement weight. The diagonal is ignored.
using FlipMatrix = std::array<std::array<double, kNumLabels>, kNumLabels>;

inline FlipMatrix uniform_flip_matrix() {
  FlipMatrix m{};
  for (std::size_t r = 0; r < kNumLabels; ++r) {
    for (std::size_t c = 0; c < kNumLabels; ++c) m[r][c] = r == c ? 0.0 : 1.0;
  }
  return m;
}

struct AnnotatorProfile {
  AnnotatorKind kind = AnnotatorKind::Devoted;
  /// Standard deviation of each boundary shift in characters; the shift
  /// magnitude is geometric.
  double jitter = 0;
  double label_flip = 0;
  FlipMatrix flip_matrix = uniform_flip_matrix();
  double relation_drop = 0;
  double sentiment_flip = 0;
  /// Spammers: expected share of characters covered by units.
  double spam_density = 0.5;

  void validate() const {
    auto prob = [](double p, const char* name) {
      if (!(p >= 0 && p <= 1)) throw ConfigError(std::string(name) + " must lie in [0, 1]");
    };
    prob(label_flip, "label_flip");
    prob(relation_drop, "relation_drop");
    prob(sentiment_flip, "sentiment_flip");
    prob(spam_density, "spam_density");
    if (!(jitter >= 0)) throw ConfigError("jitter must be non-negative");
    for (std::size_t r = 0; r < kNumLabels; ++r) {
      double off = 0;
      for (std::size_t c = 0; c < kNumLabels; ++c) {
        if (!(flip_matrix[r][c] >= 0)) throw ConfigError("flip matrix weights must be non-negative");
        if (c != r) off += flip_matrix[r][c];
      }
      if (off <= 0) throw ConfigError("flip matrix row has no off-diagonal weight");
    }
  }
};

struct CampaignConfig {
  std::size_t documents = 100;
  std::size_t min_length = 80;
  std::size_t max_length = 200;
  /// Size of the annotator pool.
  std::size_t annotators = 20;
  std::size_t annotators_per_doc = 4;
  /// Gold documents shared by the pool; each annotator works on
  /// gold_per_annotator of them.
  std::size_t gold_documents = 1;
  std::size_t gold_per_annotator = 1;
  double spammer_share = 0;
  AnnotatorProfile devoted;
  AnnotatorProfile spammer{.kind = AnnotatorKind::Spammer};
  /// Per annotation set probability of one injected structural violation.
  double violation_rate = 0;
  std::optional<std::uint64_t> seed;
  std::size_t threads = 1;

  void validate() const {
    if (!seed) throw ConfigError("a seed is required");
    if (min_length < 8) throw ConfigError("min_length must be at least 8");
    if (min_length > max_length) throw ConfigError("min_length exceeds max_length");
    if (annotators_per_doc < 2) throw ConfigError("annotators_per_doc must be at least 2");
    if (annotators < annotators_per_doc) throw ConfigError("annotator pool smaller than annotators_per_doc");
    if (gold_per_annotator > gold_documents) {
      throw ConfigError("gold_per_annotator exceeds gold_documents");
    }
    if (!(spammer_share >= 0 && spammer_share <= 1)) throw ConfigError("spammer_share must lie in [0, 1]");
    if (!(violation_rate >= 0 && violation_rate <= 1)) {
      throw ConfigError("violation_rate must lie in [0, 1]");
    }
    devoted.validate();
    spammer.validate();
  }
};

struct InjectedViolation {
  std::string doc_id;
  std::string annotator_id;
  Rule rule = Rule::IllegalRelationEndpoints;
  std::string target_id;
};

struct SimulatedAnnotator {
  std::string id;
  AnnotatorKind kind = AnnotatorKind::Devoted;
};

struct GroundTruth {
  std::uint64_t seed = 0;
  /// One set per document, in bundle order, annotator id "truth".
  std::vector<AnnotationSet> documents;
  std::vector<SimulatedAnnotator> annotators;
  std::vector<InjectedViolation> injected;

  const AnnotationSet* find(std::string_view doc_id) const {
    for (const auto& d : documents) {
      if (d.document_id == doc_id) return &d;
    }
    return nullptr;
  }
};

struct SimulatedCampaign {
  std::vector<AnnotationBundle> bundles;
  GroundTruth truth;
};

namespace simulate_detail {

// Common characters of hotel reviews; any CJK set would do.
inline constexpr std::u32string_view kAlphabet =
    U"房间很好服务不错前台热情早餐丰富位置方便交通干净卫生设施陈旧隔音差价格合理"
    U"推荐入住环境安静床舒适浴室大窗户景色美味停车困难空调声音网络速度慢员工友善";
inline constexpr std::u32string_view kTerminators = U"。！？";

struct Draft {
  std::string text;
  AnnotationSet truth;
};

inline ComponentLabel draw_label(rnd::Engine& rng) {
  static const std::vector<double> w = {0.1, 0.35, 0.4, 0.15};
  return kComponentLabels[rnd::weighted(rng, w)];
}

inline Sentiment draw_sentiment(rnd::Engine& rng) {
  static const std::vector<double> w = {0.5, 0.35, 0.15};
  return kAllSentiments[rnd::weighted(rng, w)];
}

inline std::string cid(std::size_t n) { return "T" + std::to_string(n); }
inline std::string rid(std::size_t n) { return "R" + std::to_string(n); }

/// Attaches each premise to a random claim; premises with no claim to
/// attach to become PSIC. Relation ids are renumbered.
inline void attach_premises(rnd::Engine& rng, AnnotationSet& set, double attack_share = 0.15) {
  std::vector<std::string> claims;
  for (const auto& c : set.components) {
    if (c.label == ComponentLabel::Claim || c.label == ComponentLabel::MajorClaim) claims.push_back(c.id);
  }
  set.relations.clear();
  for (auto& c : set.components) {
    if (c.label != ComponentLabel::Premise) continue;
    if (claims.empty()) {
      c.label = ComponentLabel::PSIC;
      continue;
    }
    set.relations.push_back({rid(set.relations.size() + 1),
                             rnd::bernoulli(rng, attack_share) ? RelationKind::Attack : RelationKind::Support,
                             c.id, claims[rnd::index(rng, claims.size())]});
  }
}

inline Draft draft_document(rnd::Engine& rng, std::string doc_id, std::size_t length) {
  std::u32string text;
  AnnotationSet truth{"truth", std::move(doc_id), {}, {}};
  std::size_t remaining = length;
  while (remaining > 0) {
    auto s = static_cast<std::size_t>(rnd::between(rng, 10, 36));
    if (s > remaining || remaining - s < 8) s = remaining;
    const std::size_t body_end = text.size() + s - 1;
    while (text.size() < body_end) {
      auto c = static_cast<std::size_t>(rnd::between(rng, 4, 13));
      const bool last = text.size() + c + 3 > body_end;
      if (last) c = body_end - text.size();
      const std::size_t content = last ? c : c - 1;
      const std::size_t start = text.size();
      for (std::size_t i = 0; i < content; ++i) text.push_back(kAlphabet[rnd::index(rng, kAlphabet.size())]);
      if (!last) text.push_back(U'，');
      if (content > 0 && rnd::bernoulli(rng, 0.75)) {
        const auto label = draw_label(rng);
        truth.components.push_back({cid(truth.components.size() + 1), {start, start + content}, label,
                                    takes_sentiment(label) ? std::optional(draw_sentiment(rng))
                                                           : std::nullopt});
      }
    }
    text.push_back(kTerminators[rnd::index(rng, kTerminators.size())]);
    remaining -= s;
  }
  attach_premises(rng, truth);
  return {utf8::encode(text), std::move(truth)};
}

inline ComponentLabel flip_label(rnd::Engine& rng, ComponentLabel label, const FlipMatrix& m) {
  std::vector<double> w(m[index_of(label)].begin(), m[index_of(label)].end());
  w[index_of(label)] = 0;
  return kAllLabels[rnd::weighted(rng, w)];
}

inline Sentiment other_sentiment(rnd::Engine& rng, Sentiment s) {
  std::vector<Sentiment> others;
  for (auto x : kAllSentiments) {
    if (x != s) others.push_back(x);
  }
  return others[rnd::index(rng, others.size())];
}

/// Signed shift with standard deviation `sigma`: a geometric magnitude G with
/// E[G^2] = sigma^2 and a fair sign, so p = 4 / (3 + sqrt(1 + 8 sigma^2)).
inline std::int64_t shift(rnd::Engine& rng, double sigma) {
  const double p = 4.0 / (3.0 + std::sqrt(1.0 + 8.0 * sigma * sigma));
  const auto g = rnd::geometric_with_mean(rng, (1.0 - p) / p);
  return rnd::bernoulli(rng, 0.5) ? g : -g;
}

inline AnnotationSet devoted_copy(rnd::Engine& rng, const AnnotationSet& truth, std::size_t length,
                                  const AnnotatorProfile& p, std::string annotator) {
  AnnotationSet out{std::move(annotator), truth.document_id, {}, {}};
  std::map<std::string, std::string> renamed;
  std::size_t floor = 0;
  for (const auto& t : truth.components) {
    auto label = t.label;
    if (p.label_flip > 0 && rnd::bernoulli(rng, p.label_flip)) label = flip_label(rng, label, p.flip_matrix);
    const auto ds = shift(rng, p.jitter);
    const auto de = shift(rng, p.jitter);
    if (label == ComponentLabel::NA) continue;
    const auto start = std::clamp<std::int64_t>(static_cast<std::int64_t>(t.span.start) + ds,
                                                static_cast<std::int64_t>(floor),
                                                static_cast<std::int64_t>(length));
    if (start >= static_cast<std::int64_t>(length)) continue;
    const auto end = std::clamp<std::int64_t>(static_cast<std::int64_t>(t.span.end) + de, start + 1,
                                              static_cast<std::int64_t>(length));
    std::optional<Sentiment> sentiment;
    if (takes_sentiment(label)) {
      if (t.sentiment) {
        sentiment = p.sentiment_flip > 0 && rnd::bernoulli(rng, p.sentiment_flip)
                        ? other_sentiment(rng, *t.sentiment)
                        : *t.sentiment;
      } else {
        sentiment = draw_sentiment(rng);
      }
    }
    const auto id = cid(out.components.size() + 1);
    renamed[t.id] = id;
    out.components.push_back({id, {static_cast<std::size_t>(start), static_cast<std::size_t>(end)}, label,
                              sentiment});
    floor = static_cast<std::size_t>(end);
  }
  for (const auto& r : truth.relations) {
    if (p.relation_drop > 0 && rnd::bernoulli(rng, p.relation_drop)) continue;
    const auto s = renamed.find(r.source);
    const auto t = renamed.find(r.target);
    if (s == renamed.end() || t == renamed.end()) continue;
    if (!is_legal_relation(out.find(s->second)->label, out.find(t->second)->label, {})) continue;
    out.relations.push_back({rid(out.relations.size() + 1), r.kind, s->second, t->second});
  }
  for (auto& c : out.components) {
    if (c.label != ComponentLabel::Premise) continue;
    const bool attached = std::any_of(out.relations.begin(), out.relations.end(),
                                      [&](const RelationAnnotation& r) { return r.source == c.id; });
    if (!attached) c.label = ComponentLabel::PSIC;
  }
  return out;
}

inline AnnotationSet spam(rnd::Engine& rng, std::string doc_id, std::size_t length,
                          const AnnotatorProfile& p, std::string annotator) {
  AnnotationSet out{std::move(annotator), std::move(doc_id), {}, {}};
  constexpr double kMeanUnit = 7.0;  // uniform over [2, 12]
  const double mean_gap = p.spam_density > 0 ? kMeanUnit * (1 - p.spam_density) / p.spam_density : 0;
  if (p.spam_density <= 0) return out;
  std::size_t pos = static_cast<std::size_t>(rnd::geometric_with_mean(rng, mean_gap));
  while (pos < length) {
    const auto end = std::min(length, pos + static_cast<std::size_t>(rnd::between(rng, 2, 12)));
    const auto label = kComponentLabels[rnd::index(rng, kNumComponentLabels)];
    out.components.push_back({cid(out.components.size() + 1), {pos, end}, label,
                              takes_sentiment(label)
                                  ? std::optional(kAllSentiments[rnd::index(rng, 3)])
                                  : std::nullopt});
    pos = end + 1 + static_cast<std::size_t>(rnd::geometric_with_mean(rng, mean_gap));
  }
  attach_premises(rng, out, 0.5);
  return out;
}

/// Breaks one structural rule in `set`, if the set offers a place for it.
inline std::optional<InjectedViolation> inject(rnd::Engine& rng, AnnotationSet& set) {
  std::vector<std::size_t> sentiment_bearing, attached_premises, components;
  for (std::size_t i = 0; i < set.components.size(); ++i) {
    const auto& c = set.components[i];
    components.push_back(i);
    if (takes_sentiment(c.label) && c.sentiment) sentiment_bearing.push_back(i);
    if (c.label == ComponentLabel::Premise) attached_premises.push_back(i);
  }
  std::vector<Rule> options;
  if (components.size() >= 2) options.push_back(Rule::IllegalRelationEndpoints);
  if (!sentiment_bearing.empty()) options.push_back(Rule::MissingSentiment);
  if (!attached_premises.empty()) options.push_back(Rule::UnattachedPremise);
  if (options.empty()) return std::nullopt;
  const auto rule = options[rnd::index(rng, options.size())];
  InjectedViolation v{set.document_id, set.annotator_id, rule, {}};
  switch (rule) {
    case Rule::MissingSentiment: {
      auto& c = set.components[sentiment_bearing[rnd::index(rng, sentiment_bearing.size())]];
      c.sentiment.reset();
      v.target_id = c.id;
      break;
    }
    case Rule::UnattachedPremise: {
      const auto& c = set.components[attached_premises[rnd::index(rng, attached_premises.size())]];
      std::erase_if(set.relations, [&](const RelationAnnotation& r) { return r.source == c.id; });
      v.target_id = c.id;
      break;
    }
    default: {
      // A relation whose source is not a premise is always illegal.
      std::vector<std::size_t> sources;
      for (auto i : components) {
        if (set.components[i].label != ComponentLabel::Premise) sources.push_back(i);
      }
      if (sources.empty()) return std::nullopt;
      const auto s = sources[rnd::index(rng, sources.size())];
      auto t = components[rnd::index(rng, components.size() - 1)];
      if (t >= s) ++t;
      std::size_t n = set.relations.size() + 1;
      while (std::any_of(set.relations.begin(), set.relations.end(),
                         [&](const RelationAnnotation& r) { return r.id == rid(n); })) {
        ++n;
      }
      set.relations.push_back({rid(n), RelationKind::Support, set.components[s].id, set.components[t].id});
      v.target_id = rid(n);
      break;
    }
  }
  return v;
}

inline std::string padded(std::string_view prefix, std::size_t i, std::size_t count) {
  const auto width = std::to_string(std::max<std::size_t>(count, 1) - 1).size();
  auto digits = std::to_string(i);
  return std::string(prefix) + std::string(width > digits.size() ? width - digits.size() : 0, '0') +
         digits;
}

struct DocumentPlan {
  std::string id;
  bool gold = false;
  std::uint64_t seed = 0;
  std::vector<std::size_t> annotators;  // pool indices; empty means draw at generation
};

struct GeneratedDocument {
  AnnotationBundle bundle;
  AnnotationSet truth;
  std::vector<InjectedViolation> injected;
};

inline GeneratedDocument generate_document(const CampaignConfig& cfg, const DocumentPlan& plan,
                                           const std::vector<SimulatedAnnotator>& pool) {
  rnd::Engine rng(plan.seed);
  const auto length = static_cast<std::size_t>(
      rnd::between(rng, static_cast<std::int64_t>(cfg.min_length), static_cast<std::int64_t>(cfg.max_length)));
  auto draft = draft_document(rng, plan.id, length);
  auto who = plan.annotators;
  if (!plan.gold) {
    std::vector<std::size_t> all(pool.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    for (std::size_t i = 0; i < cfg.annotators_per_doc; ++i) {  // partial Fisher-Yates
      std::swap(all[i], all[i + rnd::index(rng, all.size() - i)]);
    }
    who.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(cfg.annotators_per_doc));
  }
  std::sort(who.begin(), who.end());

  GeneratedDocument out{{Document(plan.id, draft.text), {}, std::nullopt}, draft.truth, {}};
  for (auto a : who) {
    const auto& ann = pool[a];
    auto set = ann.kind == AnnotatorKind::Devoted
                   ? devoted_copy(rng, draft.truth, length, cfg.devoted, ann.id)
                   : spam(rng, plan.id, length, cfg.spammer, ann.id);
    if (cfg.violation_rate > 0 && rnd::bernoulli(rng, cfg.violation_rate)) {
      if (auto v = inject(rng, set)) out.injected.push_back(*v);
    }
    out.bundle.sets.push_back(std::move(set));
  }
  if (plan.gold) {
    AnnotationSet gold = draft.truth;
    gold.annotator_id = std::string(kGoldAnnotatorId);
    out.bundle.gold = std::move(gold);
  }
  return out;
}

}  // namespace simulate_detail

inline SimulatedCampaign generate(const CampaignConfig& cfg) {
  using namespace simulate_detail;
  cfg.validate();
  const auto seed = *cfg.seed;

  std::vector<SimulatedAnnotator> pool(cfg.annotators);
  for (std::size_t i = 0; i < pool.size(); ++i) pool[i].id = padded("ann-", i, cfg.annotators);
  {
    rnd::Engine rng(rnd::derive(seed, 2));
    std::vector<std::size_t> order(pool.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    rnd::shuffle(rng, order);
    const auto spammers = static_cast<std::size_t>(
        std::llround(cfg.spammer_share * static_cast<double>(cfg.annotators)));
    for (std::size_t i = 0; i < spammers; ++i) pool[order[i]].kind = AnnotatorKind::Spammer;
  }

  std::vector<DocumentPlan> plans;
  for (std::size_t d = 0; d < cfg.documents; ++d) {
    plans.push_back({padded("doc-", d, cfg.documents), false, rnd::derive(rnd::derive(seed, 0), d), {}});
  }
  for (std::size_t g = 0; g < cfg.gold_documents; ++g) {
    DocumentPlan plan{padded("gold-", g, cfg.gold_documents), true, rnd::derive(rnd::derive(seed, 1), g), {}};
    for (std::size_t a = 0; a < pool.size(); ++a) {
      for (std::size_t j = 0; j < cfg.gold_per_annotator; ++j) {
        if ((a * cfg.gold_per_annotator + j) % cfg.gold_documents == g) plan.annotators.push_back(a);
      }
    }
    plans.push_back(std::move(plan));
  }

  auto docs = parallel_map<GeneratedDocument>(plans.size(), cfg.threads, [&](std::size_t i) {
    return generate_document(cfg, plans[i], pool);
  });

  SimulatedCampaign out;
  out.truth.seed = seed;
  out.truth.annotators = pool;
  for (auto& d : docs) {
    out.bundles.push_back(std::move(d.bundle));
    out.truth.documents.push_back(std::move(d.truth));
    for (auto& v : d.injected) out.truth.injected.push_back(std::move(v));
  }
  return out;
}

inline void to_json(nlohmann::json& j, const InjectedViolation& v) {
  j = nlohmann::json{{"doc_id", v.doc_id},
                     {"annotator_id", v.annotator_id},
                     {"rule", to_string(v.rule)},
                     {"target_id", v.target_id}};
}

inline void to_json(nlohmann::json& j, const GroundTruth& t) {
  nlohmann::json annotators = nlohmann::json::array();
  for (const auto& a : t.annotators) annotators.push_back({{"id", a.id}, {"kind", to_string(a.kind)}});
  j = nlohmann::json{{"seed", t.seed},
                     {"annotators", std::move(annotators)},
                     {"documents", t.documents},
                     {"injected_violations", t.injected}};
}

inline void from_json(const nlohmann::json& j, GroundTruth& t) {
  t.seed = j.at("seed").get<std::uint64_t>();
  t.annotators.clear();
  for (const auto& a : j.at("annotators")) {
    t.annotators.push_back({a.at("id").get<std::string>(),
                            a.at("kind") == "Spammer" ? AnnotatorKind::Spammer : AnnotatorKind::Devoted});
  }
  t.documents = j.at("documents").get<std::vector<AnnotationSet>>();
  t.injected.clear();
  for (const auto& v : j.at("injected_violations")) {
    const auto rule = parse_rule(v.at("rule").get<std::string>());
    if (!rule) throw ParseError(0, "unknown rule in ground truth");
    t.injected.push_back({v.at("doc_id").get<std::string>(), v.at("annotator_id").get<std::string>(),
                          *rule, v.at("target_id").get<std::string>()});
  }
}

/// Writes the campaign directory plus ground_truth.json at its root.
inline void write_simulation(const std::filesystem::path& root, const SimulatedCampaign& c) {
  write_campaign(root, c.bundles);
  std::ofstream out(root / "ground_truth.json", std::ios::binary);
  if (!out) throw IoError("cannot write " + (root / "ground_truth.json").string());
  out << nlohmann::json(c.truth).dump(1) << '\n';
}

}  // namespace argcrowd

#endif  // ARGCROWD_SIMULATE_HPP
