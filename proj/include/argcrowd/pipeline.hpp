#ifndef ARGCROWD_PIPELINE_HPP
#define ARGCROWD_PIPELINE_HPP

// Batch pipeline over an output directory of artifacts. Each stage reads the
// artifacts of the stages before it and writes its own:
//
//   validate   load_report.json validation.jsonl campaign.jsonl
//   agreement  agreement.json agreement_documents.jsonl agreement_sentences.jsonl
//   filter     devotedness.json removal_report.json filtered_campaign.jsonl
//   aggregate  aggregated.jsonl
//   build      easy_corpus.jsonl sentence_corpus.jsonl statistics.json statistics.txt
//   cpm        cpm.json cpm.txt
//   report     summary.json summary.txt
//
// `simulate` writes a synthetic campaign into the input root instead.
// Artifacts depend only on the inputs and the configuration, never on the
// thread count.

#include <array>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "argcrowd/aggregate.hpp"
#include "argcrowd/agreement_report.hpp"
#include "argcrowd/analysis.hpp"
#include "argcrowd/corpus.hpp"
#include "argcrowd/errors.hpp"
#include "argcrowd/parallel.hpp"
#include "argcrowd/quality.hpp"
#include "argcrowd/simulate.hpp"
#include "argcrowd/standoff.hpp"
#include "argcrowd/text_table.hpp"
#include "json.hpp"

namespace argcrowd {

struct PipelineConfig {
  std::filesystem::path input_root = "campaign";
  std::filesystem::path output_root = "out";
  Thresholds thresholds;
  std::size_t quality_threshold = 2;
  std::size_t min_sets = 2;
  double tail_fraction = 0.1;
  ValidationPolicy policy;
  UnitizedAlphaOptions::Mode alpha_mode = UnitizedAlphaOptions::Mode::ClosedForm;
  std::size_t alpha_resamples = 10000;
  std::optional<std::uint64_t> seed;
  /// 0 means one per hardware core.
  std::size_t threads = 0;
  CpmGranularity cpm_granularity = CpmGranularity::Character;
  double overlap_threshold = 0.5;
  CampaignConfig simulate;

  UnitizedAlphaOptions alpha() const {
    return {alpha_mode, alpha_resamples, seed.value_or(0)};
  }

  /// Applies one `key = value` setting. Throws ConfigError.
  void set(std::string_view key, std::string_view value);

  /// Parses `key = value` lines; `#` starts a comment.
  static PipelineConfig parse(std::string_view text);
  static PipelineConfig parse(std::string_view text, PipelineConfig base);
  static PipelineConfig load(const std::filesystem::path& file);
  static PipelineConfig load(const std::filesystem::path& file, PipelineConfig base);

  void validate() const {
    thresholds.validate();
    if (!(tail_fraction > 0 && tail_fraction < 1)) throw ConfigError("tail_fraction must lie in (0, 1)");
    if (!(overlap_threshold > 0 && overlap_threshold <= 1)) {
      throw ConfigError("overlap_threshold must lie in (0, 1]");
    }
    if (alpha_resamples == 0) throw ConfigError("alpha_u_resamples must be positive");
  }
};

namespace pipeline_detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

template <class T>
T number(std::string_view key, std::string_view v) {
  T out{};
  const auto* end = v.data() + v.size();
  const auto r = std::from_chars(v.data(), end, out);
  if (r.ec != std::errc() || r.ptr != end) {
    throw ConfigError("invalid value for " + std::string(key) + ": '" + std::string(v) + "'");
  }
  return out;
}

inline bool boolean(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("invalid boolean for " + std::string(key) + ": '" + std::string(v) + "'");
}

}  // namespace pipeline_detail

inline void PipelineConfig::set(std::string_view key, std::string_view value) {
  using namespace pipeline_detail;
  const auto v = trim(value);
  auto sz = [&] { return number<std::size_t>(key, v); };
  auto real = [&] { return number<double>(key, v); };
  if (key == "input_root") {
    input_root = std::string(v);
  } else if (key == "output_root") {
    output_root = std::string(v);
  } else if (key == "easy_threshold") {
    thresholds.easy = real();
  } else if (key == "sentence_threshold") {
    thresholds.sentence = real();
  } else if (key == "quality_threshold") {
    quality_threshold = sz();
  } else if (key == "min_sets") {
    min_sets = sz();
  } else if (key == "tail_fraction") {
    tail_fraction = real();
  } else if (key == "allow_premise_to_major_claim") {
    policy.allow_premise_to_major_claim = boolean(key, v);
  } else if (key == "allow_multiple_targets") {
    policy.allow_multiple_targets = boolean(key, v);
  } else if (key == "downgrade") {
    policy.downgraded.clear();
    std::string_view rest = v;
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const auto name = trim(rest.substr(0, comma));
      rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
      if (name.empty()) continue;
      const auto rule = parse_rule(name);
      if (!rule) throw ConfigError("unknown validation rule: " + std::string(name));
      policy.downgraded.insert(*rule);
    }
  } else if (key == "alpha_u_mode") {
    if (v == "closed_form") {
      alpha_mode = UnitizedAlphaOptions::Mode::ClosedForm;
    } else if (v == "randomization") {
      alpha_mode = UnitizedAlphaOptions::Mode::Randomization;
    } else {
      throw ConfigError("alpha_u_mode must be closed_form or randomization");
    }
  } else if (key == "alpha_u_resamples") {
    alpha_resamples = sz();
  } else if (key == "seed") {
    seed = number<std::uint64_t>(key, v);
  } else if (key == "threads") {
    threads = sz();
  } else if (key == "cpm_granularity") {
    if (v == "character") {
      cpm_granularity = CpmGranularity::Character;
    } else if (v == "clause") {
      cpm_granularity = CpmGranularity::Clause;
    } else {
      throw ConfigError("cpm_granularity must be character or clause");
    }
  } else if (key == "overlap_threshold") {
    overlap_threshold = real();
  } else if (key == "simulate.documents") {
    simulate.documents = sz();
  } else if (key == "simulate.min_length") {
    simulate.min_length = sz();
  } else if (key == "simulate.max_length") {
    simulate.max_length = sz();
  } else if (key == "simulate.annotators") {
    simulate.annotators = sz();
  } else if (key == "simulate.annotators_per_doc") {
    simulate.annotators_per_doc = sz();
  } else if (key == "simulate.gold_documents") {
    simulate.gold_documents = sz();
  } else if (key == "simulate.gold_per_annotator") {
    simulate.gold_per_annotator = sz();
  } else if (key == "simulate.spammer_share") {
    simulate.spammer_share = real();
  } else if (key == "simulate.jitter") {
    simulate.devoted.jitter = real();
  } else if (key == "simulate.label_flip") {
    simulate.devoted.label_flip = real();
  } else if (key == "simulate.relation_drop") {
    simulate.devoted.relation_drop = real();
  } else if (key == "simulate.sentiment_flip") {
    simulate.devoted.sentiment_flip = real();
  } else if (key == "simulate.spam_density") {
    simulate.spammer.spam_density = real();
  } else if (key == "simulate.violation_rate") {
    simulate.violation_rate = real();
  } else {
    throw ConfigError("unknown configuration key: " + std::string(key));
  }
}

inline PipelineConfig PipelineConfig::parse(std::string_view text, PipelineConfig base) {
  using pipeline_detail::trim;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    auto line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    }
    try {
      base.set(trim(line.substr(0, eq)), line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return base;
}

inline PipelineConfig PipelineConfig::load(const std::filesystem::path& file, PipelineConfig base) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + file.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), std::move(base));
}

inline PipelineConfig PipelineConfig::parse(std::string_view text) { return parse(text, PipelineConfig{}); }

inline PipelineConfig PipelineConfig::load(const std::filesystem::path& file) { return load(file, PipelineConfig{}); }

namespace artifacts {
inline constexpr const char* kLoadReport = "load_report.json";
inline constexpr const char* kValidation = "validation.jsonl";
inline constexpr const char* kCampaign = "campaign.jsonl";
inline constexpr const char* kAgreement = "agreement.json";
inline constexpr const char* kAgreementDocuments = "agreement_documents.jsonl";
inline constexpr const char* kAgreementSentences = "agreement_sentences.jsonl";
inline constexpr const char* kDevotedness = "devotedness.json";
inline constexpr const char* kRemovalReport = "removal_report.json";
inline constexpr const char* kFilteredCampaign = "filtered_campaign.jsonl";
inline constexpr const char* kAggregated = "aggregated.jsonl";
inline constexpr const char* kEasyCorpus = "easy_corpus.jsonl";
inline constexpr const char* kSentenceCorpus = "sentence_corpus.jsonl";
inline constexpr const char* kStatistics = "statistics.json";
inline constexpr const char* kStatisticsText = "statistics.txt";
inline constexpr const char* kCpm = "cpm.json";
inline constexpr const char* kCpmText = "cpm.txt";
inline constexpr const char* kSummary = "summary.json";
inline constexpr const char* kSummaryText = "summary.txt";
}  // namespace artifacts

class Pipeline {
 public:
  explicit Pipeline(PipelineConfig config) : cfg_(std::move(config)) { cfg_.validate(); }

  const PipelineConfig& config() const noexcept { return cfg_; }

  void validate() {
    auto loaded = load_campaign(cfg_.input_root, cfg_.policy);
    std::string lines;
    for (const auto& v : loaded.report.violations) lines += nlohmann::json(v).dump() + '\n';
    write(artifacts::kValidation, lines);
    write(artifacts::kLoadReport, nlohmann::json(loaded.report).dump(2) + '\n');
    write_bundles(artifacts::kCampaign, loaded.bundles);
  }

  void agreement() {
    const auto bundles = read_bundles(artifacts::kCampaign, "validate");
    std::vector<const AnnotationBundle*> docs;
    for (const auto& b : bundles) {
      if (!b.is_gold()) docs.push_back(&b);
    }
    const auto reports = parallel_map<std::vector<AgreementReport>>(
        docs.size(), cfg_.threads, [&](std::size_t i) { return argcrowd::report(*docs[i], ReportScope::Both, cfg_.alpha()); });
    std::string doc_lines, sentence_lines;
    std::vector<Score> doc_scores, sentence_scores;
    for (const auto& rs : reports) {
      for (const auto& r : rs) {
        (r.sentence_index ? sentence_lines : doc_lines) += nlohmann::json(r).dump() + '\n';
        (r.sentence_index ? sentence_scores : doc_scores).push_back(r.headline());
      }
    }
    write(artifacts::kAgreementDocuments, doc_lines);
    write(artifacts::kAgreementSentences, sentence_lines);
    nlohmann::json summary{{"documents", histogram_json(alpha_histogram(doc_scores), kShares)},
                           {"sentences", histogram_json(alpha_histogram(sentence_scores), kShares)},
                           {"mean_document_alpha_u", mean(doc_scores)},
                           {"mean_sentence_alpha_u", mean(sentence_scores)}};
    write(artifacts::kAgreement, summary.dump(2) + '\n');
  }

  void filter() {
    const auto bundles = read_bundles(artifacts::kCampaign, "validate");
    DevotednessOptions dopts{cfg_.tail_fraction, cfg_.alpha(), cfg_.threads};
    const auto records = score_devotedness(bundles, dopts);
    auto filtered = argcrowd::filter(records, bundles, {cfg_.quality_threshold, cfg_.min_sets});

    const auto pre = document_scores(bundles);
    const auto post = document_scores(filtered.bundles);
    nlohmann::json gold = nlohmann::json::array();
    for (const auto& b : bundles) {
      if (!b.is_gold()) continue;
      const AnnotationBundle* after = nullptr;
      for (const auto& f : filtered.bundles) {
        if (f.document.id() == b.document.id()) after = &f;
      }
      const auto before_scores = gold_scores(b);
      const auto after_scores = after ? gold_scores(*after) : std::vector<Score>{};
      gold.push_back({{"doc_id", b.document.id()},
                      {"before", mean(before_scores)},
                      {"after", mean(after_scores)},
                      {"students_before", b.sets.size()},
                      {"students_after", after ? after->sets.size() : 0}});
    }
    nlohmann::json report = filtered.report;
    report["annotators_scored"] = records.size();
    report["threshold"] = cfg_.quality_threshold;
    report["min_sets"] = cfg_.min_sets;
    report["histogram"] = {{"pre", histogram_json(alpha_histogram(pre), kShares)},
                           {"post", histogram_json(alpha_histogram(post), kShares)}};
    report["gold"] = std::move(gold);
    write(artifacts::kDevotedness, nlohmann::json(records).dump(1) + '\n');
    write(artifacts::kRemovalReport, report.dump(2) + '\n');
    write_bundles(artifacts::kFilteredCampaign, filtered.bundles);
  }

  void aggregate() {
    const auto bundles = read_bundles(artifacts::kFilteredCampaign, "filter");
    std::vector<const AnnotationBundle*> docs;
    for (const auto& b : bundles) {
      if (!b.is_gold() && b.sets.size() >= 2) docs.push_back(&b);
    }
    AggregationOptions opts{cfg_.overlap_threshold, true, cfg_.policy};
    const auto lines = parallel_map<std::string>(docs.size(), cfg_.threads, [&](std::size_t i) {
      const auto doc = argcrowd::aggregate(docs[i]->sets, docs[i]->document.length(), opts);
      return nlohmann::json{{"doc_id", docs[i]->document.id()},
                            {"components", doc.components},
                            {"relations", doc.relations},
                            {"diagnostics", doc.diagnostics}}
                 .dump();
    });
    std::string out;
    for (const auto& l : lines) out += l + '\n';
    write(artifacts::kAggregated, out);
  }

  void build() {
    const auto bundles = read_bundles(artifacts::kFilteredCampaign, "filter");
    BuildOptions opts{cfg_.thresholds, cfg_.alpha(), {cfg_.overlap_threshold, true, cfg_.policy}, cfg_.threads};
    const auto corpus = argcrowd::build(bundles, opts);
    write_records(artifacts::kEasyCorpus, corpus.easy);
    write_records(artifacts::kSentenceCorpus, corpus.sentences);
    nlohmann::json stats{{"thresholds", {{"easy", cfg_.thresholds.easy}, {"sentence", cfg_.thresholds.sentence}}},
                         {"counts", corpus.counts},
                         {"undefined_documents", corpus.undefined_documents},
                         {"easy", corpus.easy_statistics},
                         {"sentences", corpus.sentence_statistics}};
    write(artifacts::kStatistics, stats.dump(2) + '\n');
    write(artifacts::kStatisticsText, render(corpus.easy_statistics) + '\n' + render(corpus.sentence_statistics));
  }

  void cpm() {
    const auto bundles = read_bundles(artifacts::kFilteredCampaign, "filter");
    auto easy = read_records(artifacts::kEasyCorpus, bundles);
    auto sentences = read_records(artifacts::kSentenceCorpus, bundles);
    nlohmann::json out{{"granularity", to_string(cfg_.cpm_granularity)}};
    std::string text;
    auto one = [&](const char* key, const char* title, const std::vector<CorpusRecord>& records) {
      try {
        const auto m = argcrowd::cpm(records, bundles, cfg_.cpm_granularity, cfg_.threads);
        out[key] = m;
        text += render(m, title) + '\n';
      } catch (const DegenerateInput& e) {
        out[key] = {{"undefined", e.what()}};
        text += std::string(title) + ": " + e.what() + "\n\n";
      }
    };
    one("easy", "Reviews corpus", easy);
    one("sentences", "Sentences corpus", sentences);
    write(artifacts::kCpm, out.dump(2) + '\n');
    write(artifacts::kCpmText, text);
  }

  void report() {
    const auto load = read_json(artifacts::kLoadReport, "validate");
    const auto agreement = read_json(artifacts::kAgreement, "agreement");
    const auto removal = read_json(artifacts::kRemovalReport, "filter");
    require(artifacts::kAggregated, "aggregate");
    const auto stats = read_json(artifacts::kStatistics, "build");
    const auto cpm = read_json(artifacts::kCpm, "cpm");

    std::size_t aggregated = 0;
    {
      std::ifstream in(cfg_.output_root / artifacts::kAggregated, std::ios::binary);
      for (std::string line; std::getline(in, line);) aggregated += !line.empty();
    }
    nlohmann::json summary{{"load",
                            {{"documents_found", load.at("documents_found")},
                             {"documents_loaded", load.at("documents_loaded")},
                             {"sets_loaded", load.at("sets_loaded")},
                             {"sets_removed", load.at("sets_removed")},
                             {"violation_count", load.at("violation_count")}}},
                           {"agreement", agreement},
                           {"quality", removal},
                           {"aggregated_documents", aggregated},
                           {"corpus", stats},
                           {"cpm", cpm}};
    write(artifacts::kSummary, summary.dump(2) + '\n');
    write(artifacts::kSummaryText, render_summary(summary));
  }

  /// Writes a synthetic campaign into the input root, which must be empty or absent.
  void simulate() {
    namespace fs = std::filesystem;
    auto c = cfg_.simulate;
    c.seed = cfg_.seed;
    c.threads = cfg_.threads;
    if (fs::exists(cfg_.input_root) && !fs::is_empty(cfg_.input_root)) {
      throw IoError("simulation target is not empty: " + cfg_.input_root.string());
    }
    write_simulation(cfg_.input_root, generate(c));
  }

  void run_all() {
    validate();
    agreement();
    filter();
    aggregate();
    build();
    cpm();
    report();
  }

 private:
  static constexpr std::array<double, 3> kShares = {0.5, 0.6, 0.7};

  static nlohmann::json mean(const std::vector<Score>& scores) {
    double sum = 0;
    std::size_t n = 0;
    for (const auto& s : scores) {
      if (s.defined()) sum += s.value(), ++n;
    }
    if (n == 0) return Score::undefined("no defined score");
    return sum / static_cast<double>(n);
  }

  std::vector<Score> document_scores(const std::vector<AnnotationBundle>& bundles) const {
    std::vector<const AnnotationBundle*> docs;
    for (const auto& b : bundles) {
      if (!b.is_gold()) docs.push_back(&b);
    }
    return parallel_map<Score>(docs.size(), cfg_.threads, [&](std::size_t i) {
      const auto& b = *docs[i];
      return report_continuum(b.document.id(), std::nullopt, b.annotator_spans(), {0, b.document.length()},
                              cfg_.alpha())
          .headline();
    });
  }

  std::vector<Score> gold_scores(const AnnotationBundle& b) const {
    return parallel_map<Score>(b.sets.size(), cfg_.threads, [&](std::size_t i) {
      return alpha_u_against_gold(b.sets[i], *b.gold, {0, b.document.length()}, cfg_.alpha());
    });
  }

  void write(const char* name, const std::string& content) const {
    std::filesystem::create_directories(cfg_.output_root);
    const auto path = cfg_.output_root / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << content;
    if (!out) throw IoError("failed writing " + path.string());
  }

  void require(const char* name, const char* stage) const {
    if (!std::filesystem::exists(cfg_.output_root / name)) {
      throw MissingStage(std::string(name) + " not found in " + cfg_.output_root.string() + "; run '" + stage +
                         "' first");
    }
  }

  std::string read_text(const char* name, const char* stage) const {
    require(name, stage);
    std::ifstream in(cfg_.output_root / name, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  nlohmann::json read_json(const char* name, const char* stage) const {
    try {
      return nlohmann::json::parse(read_text(name, stage));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(0, std::string(name) + ": " + e.what());
    }
  }

  template <class F>
  void for_each_line(const char* name, const char* stage, F&& f) const {
    std::istringstream in(read_text(name, stage));
    std::size_t n = 0;
    for (std::string line; std::getline(in, line);) {
      ++n;
      if (line.empty()) continue;
      try {
        f(nlohmann::json::parse(line));
      } catch (const nlohmann::json::exception& e) {
        throw ParseError(n, std::string(name) + ": " + e.what());
      }
    }
  }

  void write_bundles(const char* name, const std::vector<AnnotationBundle>& bundles) const {
    std::string out;
    for (const auto& b : bundles) out += nlohmann::json(b).dump() + '\n';
    write(name, out);
  }

  std::vector<AnnotationBundle> read_bundles(const char* name, const char* stage) const {
    std::vector<AnnotationBundle> out;
    for_each_line(name, stage, [&](const nlohmann::json& j) { out.push_back(j.get<AnnotationBundle>()); });
    return out;
  }

  void write_records(const char* name, const std::vector<CorpusRecord>& records) const {
    std::string out;
    for (const auto& r : records) out += nlohmann::json(r).dump() + '\n';
    write(name, out);
  }

  std::vector<CorpusRecord> read_records(const char* name, const std::vector<AnnotationBundle>& bundles) const {
    std::map<std::string, const AnnotationBundle*, std::less<>> by_id;
    for (const auto& b : bundles) by_id[b.document.id()] = &b;
    std::vector<CorpusRecord> out;
    for_each_line(name, "build", [&](const nlohmann::json& j) {
      auto r = j.get<CorpusRecord>();
      const auto it = by_id.find(r.doc_id);
      if (it == by_id.end()) throw Error(std::string(name) + ": unknown document " + r.doc_id);
      const auto& doc = it->second->document;
      if (r.sentence_index) {
        const auto sentences = sentences_of(doc);
        if (*r.sentence_index >= sentences.size()) throw Error(std::string(name) + ": bad sentence index");
        r.span = sentences[*r.sentence_index];
      } else {
        r.span = {0, doc.length()};
      }
      out.push_back(std::move(r));
    });
    return out;
  }

  static std::string cell(const nlohmann::json& j, int digits = 3) {
    if (j.is_number_float()) return fixed(j.get<double>(), digits);
    if (j.is_number()) return j.dump();
    if (j.is_string()) return j.get<std::string>();
    return "n/a";
  }

  static std::string render_summary(const nlohmann::json& s) {
    std::string out;
    const auto& load = s.at("load");
    out += "Load: " + cell(load.at("documents_loaded")) + " of " + cell(load.at("documents_found")) +
           " documents, " + cell(load.at("sets_loaded")) + " sets loaded, " + cell(load.at("sets_removed")) +
           " sets removed, " + cell(load.at("violation_count")) + " violations\n\n";

    const auto& q = s.at("quality");
    out += "Quality filter: " + std::to_string(q.at("removed_annotators").size()) + " of " +
           cell(q.at("annotators_scored")) + " annotators removed, " +
           std::to_string(q.at("removed_documents").size()) + " documents pruned\n";
    TextTable gold({"Gold document", "before", "after", "students before", "students after"});
    for (const auto& g : q.at("gold")) {
      gold.add({cell(g.at("doc_id")), cell(g.at("before"), 4), cell(g.at("after"), 4), cell(g.at("students_before")),
                cell(g.at("students_after"))});
    }
    out += gold.render() + '\n';

    const auto& pre = q.at("histogram").at("pre");
    const auto& post = q.at("histogram").at("post");
    TextTable hist({"alpha_U bin", "before filter", "after filter"});
    for (std::size_t i = 0; i < pre.at("bins").size(); ++i) {
      const auto& b = pre.at("bins")[i];
      hist.add({"[" + fixed(b.at("lower").get<double>(), 1) + ", " + fixed(b.at("upper").get<double>(), 1) +
                    (i + 1 == pre.at("bins").size() ? "]" : ")"),
                cell(b.at("count")), cell(post.at("bins")[i].at("count"))});
    }
    for (const auto& [k, v] : pre.at("share_at_least").items()) {
      hist.add({"share >= " + k, fixed(v.get<double>()), fixed(post.at("share_at_least").at(k).get<double>())});
    }
    out += "Document alpha_U distribution\n" + hist.render() + '\n';

    const auto& c = s.at("corpus").at("counts");
    out += "Corpus: " + cell(c.at("easy")) + " easy of " + cell(c.at("documents")) + " documents; " +
           cell(c.at("sentences_selected")) + "/" + cell(c.at("sentences")) +
           " sentences of controversial documents selected\n";
    for (const char* name : {"easy", "sentences"}) {
      const auto& st = s.at("corpus").at(name);
      TextTable t({std::string(name) + " (" + cell(st.at("records")) + ")", "Total", "avg.", "%", "pi", "alpha",
                   "alpha_U"});
      for (const auto& r : st.at("components")) {
        t.add({cell(r.at("label")), cell(r.at("total")), cell(r.at("average"), 1), cell(r.at("percentage")),
               cell(r.at("multi_pi")), cell(r.at("alpha")), cell(r.at("alpha_u"))});
      }
      TextTable u({"Label/Relation", "Total", "%", "pi", "alpha"});
      for (const auto& r : st.at("sentiments")) {
        const auto label = r.at("label").get<std::string>() == "MajorClaim" ? std::string("MC") : cell(r.at("label"));
        u.add({label + "(" + cell(r.at("sentiment")) + ")", cell(r.at("total")), cell(r.at("percentage")),
               cell(r.at("multi_pi")), cell(r.at("alpha"))});
      }
      if (st.contains("relations")) {
        for (const auto& r : st.at("relations")) {
          u.add({cell(r.at("kind")) + "(" + cell(r.at("records_with_relations")) + " records)", cell(r.at("total")),
                 cell(r.at("percentage")), cell(r.at("multi_pi")), cell(r.at("alpha"))});
        }
      }
      out += t.render() + u.render() + '\n';
    }

    for (const char* name : {"easy", "sentences"}) {
      const auto& m = s.at("cpm").at(name);
      if (m.contains("undefined")) {
        out += std::string("CPM ") + name + ": " + cell(m.at("undefined")) + "\n";
        continue;
      }
      std::vector<std::string> header = {std::string("CPM ") + name};
      for (const auto& l : m.at("labels")) header.push_back(l.get<std::string>() == "MajorClaim" ? "MC" : cell(l));
      TextTable t(header);
      for (std::size_t r = 0; r < kNumLabels; ++r) {
        std::vector<std::string> row = {header[r + 1]};
        for (std::size_t k = 0; k < kNumLabels; ++k) {
          row.push_back(m.at("row_defined")[r].get<bool>() ? fixed(m.at("probabilities")[r][k].get<double>()) : "n/a");
        }
        t.add(row);
      }
      out += t.render() + '\n';
    }
    return out;
  }

  PipelineConfig cfg_;
};

}  // namespace argcrowd

#endif  // ARGCROWD_PIPELINE_HPP
