#ifndef ARGCROWD_STANDOFF_HPP
#define ARGCROWD_STANDOFF_HPP

// brat standoff reading and writing.
//
//   T1<TAB>Claim 0 6<TAB>舒适的环境和
//   A1<TAB>Sentiment T1 Positive
//   R1<TAB>Support Arg1:T2 Arg2:T1
//
// Offsets are code points. Campaign layout on disk:
//
//   root/<doc_id>/<doc_id>.txt
//   root/<doc_id>/<annotator_id>.ann
//   root/<doc_id>/gold.ann            (gold-standard documents only)

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "argcrowd/argmodel.hpp"
#include "argcrowd/errors.hpp"
#include "argcrowd/utf8.hpp"
#include "json.hpp"

namespace argcrowd {

inline constexpr std::string_view kGoldAnnotatorId = "gold";

class Document {
 public:
  Document() = default;
  Document(std::string id, std::string text)
      : id_(std::move(id)), text_(std::move(text)), offsets_(utf8::codepoint_offsets(text_)) {}

  const std::string& id() const noexcept { return id_; }
  const std::string& text() const noexcept { return text_; }
  /// Length in code points.
  std::size_t length() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }

  std::string_view slice(CharSpan span) const {
    if (span.end > length() || span.start > span.end) {
      throw Error("slice [" + std::to_string(span.start) + "," + std::to_string(span.end) +
                  ") outside document " + id_);
    }
    return std::string_view(text_).substr(offsets_[span.start],
                                          offsets_[span.end] - offsets_[span.start]);
  }

  const std::optional<std::vector<CharSpan>>& sentences() const noexcept { return sentences_; }

  /// Sentence spans must partition [0, length()) in order.
  void set_sentences(std::vector<CharSpan> spans) {
    std::size_t pos = 0;
    for (const auto& s : spans) {
      if (s.start != pos || s.end <= s.start) {
        throw Error("sentence spans do not partition document " + id_);
      }
      pos = s.end;
    }
    if (pos != length()) throw Error("sentence spans do not cover document " + id_);
    sentences_ = std::move(spans);
  }

 private:
  std::string id_;
  std::string text_;
  std::vector<std::size_t> offsets_{0};
  std::optional<std::vector<CharSpan>> sentences_;
};

struct AnnotationBundle {
  Document document;
  std::vector<AnnotationSet> sets;  // non-gold, sorted by annotator id
  std::optional<AnnotationSet> gold;

  bool is_gold() const noexcept { return gold.has_value(); }

  std::vector<std::vector<LabeledSpan>> annotator_spans() const {
    std::vector<std::vector<LabeledSpan>> out;
    out.reserve(sets.size());
    for (const auto& s : sets) out.push_back(labeled_spans(s));
    return out;
  }
};

/// A line that was read but not consumed (events, notes, other attributes).
struct UnsupportedLine {
  std::size_t line = 0;
  std::string text;
  std::string reason;
};

namespace standoff_detail {

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto next = s.find(sep, pos);
    if (next == std::string_view::npos) {
      out.push_back(s.substr(pos));
      return out;
    }
    out.push_back(s.substr(pos, next - pos));
    pos = next + 1;
  }
}

inline std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    const auto b = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
    if (i > b) out.push_back(s.substr(b, i - b));
  }
  return out;
}

inline std::size_t parse_offset(std::string_view s, std::size_t line) {
  if (s.empty()) throw ParseError(line, "missing offset");
  std::size_t v = 0;
  for (char ch : s) {
    if (ch < '0' || ch > '9') throw ParseError(line, "bad offset '" + std::string(s) + "'");
    v = v * 10 + static_cast<std::size_t>(ch - '0');
  }
  return v;
}

inline std::string_view strip_bom(std::string_view s) {
  if (s.size() >= 3 && static_cast<unsigned char>(s[0]) == 0xEF &&
      static_cast<unsigned char>(s[1]) == 0xBB && static_cast<unsigned char>(s[2]) == 0xBF) {
    s.remove_prefix(3);
  }
  return s;
}

/// Lines with CR, LF or CRLF endings; a BOM is dropped.
inline std::vector<std::string_view> lines(std::string_view s) {
  s = strip_bom(s);
  std::vector<std::string_view> out;
  std::size_t b = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\n' || s[i] == '\r') {
      out.push_back(s.substr(b, i - b));
      if (s[i] == '\r' && i + 1 < s.size() && s[i + 1] == '\n') ++i;
      b = i + 1;
    }
  }
  if (b < s.size()) out.push_back(s.substr(b));
  return out;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace standoff_detail

/// Parses one .ann file against its document.
inline AnnotationSet parse_ann(std::string_view ann_text, const Document& doc,
                               std::string annotator_id = {},
                               std::vector<UnsupportedLine>* unsupported = nullptr) {
  using namespace standoff_detail;
  AnnotationSet set;
  set.annotator_id = std::move(annotator_id);
  set.document_id = doc.id();

  struct PendingAttr {
    std::size_t line;
    std::string target;
    Sentiment value;
  };
  std::vector<PendingAttr> attrs;

  auto skip = [&](std::size_t line, std::string_view text, std::string reason) {
    if (unsupported) unsupported->push_back({line, std::string(text), std::move(reason)});
  };

  const auto all = lines(ann_text);
  for (std::size_t k = 0; k < all.size(); ++k) {
    const std::size_t lineno = k + 1;
    const auto raw = all[k];
    if (split_ws(raw).empty()) continue;
    const auto fields = split(raw, '\t');
    if (fields.size() < 2 || fields[0].empty()) {
      throw ParseError(lineno, "expected tab-separated id and body");
    }
    const auto id = fields[0];
    const char kind = id[0];
    const auto body = split_ws(fields[1]);
    if (body.empty()) throw ParseError(lineno, "empty annotation body");

    if (kind == 'T') {
      if (fields.size() < 3) throw ParseError(lineno, "text-bound line needs surface text");
      if (fields[1].find(';') != std::string_view::npos) {
        throw ParseError(lineno, "discontinuous spans are not supported");
      }
      if (body.size() != 3) throw ParseError(lineno, "expected 'Label start end'");
      const auto label = parse_label(body[0]);
      if (!label || *label == ComponentLabel::NA) {
        throw UnknownLabelError("line " + std::to_string(lineno) + ": unknown component label '" +
                                std::string(body[0]) + "'");
      }
      const CharSpan span{parse_offset(body[1], lineno), parse_offset(body[2], lineno)};
      if (span.start >= span.end) throw OffsetError(lineno, "empty or inverted span");
      if (span.end > doc.length()) {
        throw OffsetError(lineno, "span end " + std::to_string(span.end) +
                                      " exceeds document length " +
                                      std::to_string(doc.length()));
      }
      // Surface text may itself contain tabs; rejoin the remaining fields.
      std::string surface(fields[2]);
      for (std::size_t f = 3; f < fields.size(); ++f) {
        surface += '\t';
        surface += fields[f];
      }
      if (doc.slice(span) != surface) {
        throw OffsetError(lineno, "surface text '" + surface + "' does not match document slice '" +
                                      std::string(doc.slice(span)) + "'");
      }
      set.components.push_back({std::string(id), span, *label, std::nullopt});
    } else if (kind == 'A' || kind == 'M') {
      if (body[0] != "Sentiment") {
        skip(lineno, raw, "attribute '" + std::string(body[0]) + "' is not consumed");
        continue;
      }
      if (body.size() != 3) throw ParseError(lineno, "expected 'Sentiment Tid Value'");
      const auto value = parse_sentiment(body[2]);
      if (!value) {
        throw UnknownLabelError("line " + std::to_string(lineno) + ": unknown sentiment '" +
                                std::string(body[2]) + "'");
      }
      attrs.push_back({lineno, std::string(body[1]), *value});
    } else if (kind == 'R') {
      if (body.size() != 3) throw ParseError(lineno, "expected 'Kind Arg1:Tid Arg2:Tid'");
      const auto rk = parse_relation_kind(body[0]);
      if (!rk) {
        throw UnknownLabelError("line " + std::to_string(lineno) + ": unknown relation type '" +
                                std::string(body[0]) + "'");
      }
      auto arg = [&](std::string_view a, std::string_view name) {
        if (a.substr(0, name.size()) != name || a.size() <= name.size() ||
            a[name.size()] != ':') {
          throw ParseError(lineno, "expected " + std::string(name) + ":<id>");
        }
        return std::string(a.substr(name.size() + 1));
      };
      set.relations.push_back({std::string(id), *rk, arg(body[1], "Arg1"), arg(body[2], "Arg2")});
    } else if (kind == 'E' || kind == 'N' || kind == '#' || kind == '*') {
      skip(lineno, raw, "unsupported annotation type");
    } else {
      throw ParseError(lineno, "unknown line type '" + std::string(id) + "'");
    }
  }

  for (const auto& a : attrs) {
    auto it = std::find_if(set.components.begin(), set.components.end(),
                           [&](const ComponentAnnotation& c) { return c.id == a.target; });
    if (it == set.components.end()) {
      throw ParseError(a.line, "sentiment attached to unknown component " + a.target);
    }
    if (it->sentiment) throw ParseError(a.line, "second sentiment for " + a.target);
    it->sentiment = a.value;
  }
  return set;
}

/// Writes `set` with fresh ids: T-lines in span order, then A-lines, then
/// R-lines, each numbered from 1.
inline std::string write_ann(const AnnotationSet& set, const Document& doc) {
  std::vector<std::size_t> order(set.components.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return set.components[a].span < set.components[b].span;
  });

  std::map<std::string, std::string> renamed;
  std::ostringstream out;
  std::size_t t = 0;
  for (auto idx : order) {
    const auto& c = set.components[idx];
    const std::string tid = "T" + std::to_string(++t);
    renamed[c.id] = tid;
    out << tid << '\t' << to_string(c.label) << ' ' << c.span.start << ' ' << c.span.end << '\t'
        << doc.slice(c.span) << '\n';
  }
  std::size_t a = 0;
  for (auto idx : order) {
    const auto& c = set.components[idx];
    if (!c.sentiment) continue;
    out << 'A' << ++a << "\tSentiment " << renamed[c.id] << ' ' << to_string(*c.sentiment)
        << '\n';
  }
  std::size_t r = 0;
  for (const auto& rel : set.relations) {
    out << 'R' << ++r << '\t' << to_string(rel.kind) << " Arg1:" << renamed.at(rel.source)
        << " Arg2:" << renamed.at(rel.target) << '\n';
  }
  return out.str();
}

/// Order-and-id-independent form of a set, for comparing parse/write round trips.
inline AnnotationSet canonical(const AnnotationSet& set) {
  AnnotationSet out;
  out.annotator_id = set.annotator_id;
  out.document_id = set.document_id;
  std::vector<ComponentAnnotation> comps = set.components;
  std::stable_sort(comps.begin(), comps.end(),
                   [](const auto& a, const auto& b) { return a.span < b.span; });
  std::map<std::string, std::string> renamed;
  for (std::size_t i = 0; i < comps.size(); ++i) {
    renamed[comps[i].id] = "T" + std::to_string(i + 1);
    comps[i].id = renamed[comps[i].id];
  }
  out.components = std::move(comps);
  for (const auto& r : set.relations) {
    out.relations.push_back({"", r.kind, renamed[r.source], renamed[r.target]});
  }
  std::sort(out.relations.begin(), out.relations.end(), [](const auto& a, const auto& b) {
    return std::tie(a.source, a.target, a.kind) < std::tie(b.source, b.target, b.kind);
  });
  for (std::size_t i = 0; i < out.relations.size(); ++i) {
    out.relations[i].id = "R" + std::to_string(i + 1);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Campaign loading

struct LoadIssue {
  std::string doc_id;
  std::string annotator_id;
  std::string kind;  // "parse_error", "unsupported", "removed_set", "skipped_document", ...
  std::string message;
};

struct LoadReport {
  std::size_t documents_found = 0;
  std::size_t documents_loaded = 0;
  std::size_t sets_loaded = 0;
  std::size_t sets_removed = 0;
  std::vector<std::string> skipped_documents;
  std::vector<std::string> gold_only_documents;
  std::vector<LoadIssue> issues;
  std::vector<Violation> violations;
};

inline void to_json(nlohmann::json& j, const LoadReport& r) {
  nlohmann::json issues = nlohmann::json::array();
  for (const auto& i : r.issues) {
    issues.push_back({{"doc_id", i.doc_id},
                      {"annotator_id", i.annotator_id},
                      {"kind", i.kind},
                      {"message", i.message}});
  }
  j = nlohmann::json{{"documents_found", r.documents_found},
                     {"documents_loaded", r.documents_loaded},
                     {"sets_loaded", r.sets_loaded},
                     {"sets_removed", r.sets_removed},
                     {"skipped_documents", r.skipped_documents},
                     {"gold_only_documents", r.gold_only_documents},
                     {"violation_count", r.violations.size()},
                     {"issues", std::move(issues)}};
}

inline void to_json(nlohmann::json& j, const AnnotationBundle& b) {
  j = nlohmann::json{{"doc_id", b.document.id()}, {"text", b.document.text()}, {"sets", b.sets}};
  if (b.document.sentences()) {
    nlohmann::json s = nlohmann::json::array();
    for (const auto& span : *b.document.sentences()) s.push_back({span.start, span.end});
    j["sentences"] = std::move(s);
  }
  if (b.gold) j["gold"] = *b.gold;
}

inline void from_json(const nlohmann::json& j, AnnotationBundle& b) {
  b.document = Document(j.at("doc_id").get<std::string>(), j.at("text").get<std::string>());
  if (j.contains("sentences")) {
    std::vector<CharSpan> spans;
    for (const auto& s : j.at("sentences")) spans.push_back({s.at(0).get<std::size_t>(), s.at(1).get<std::size_t>()});
    b.document.set_sentences(std::move(spans));
  }
  b.sets = j.at("sets").get<std::vector<AnnotationSet>>();
  b.gold.reset();
  if (j.contains("gold")) b.gold = j.at("gold").get<AnnotationSet>();
}

struct LoadedCampaign {
  std::vector<AnnotationBundle> bundles;
  LoadReport report;
};

/// Reads every document directory under `root`. Sets with Error-severity
/// violations are dropped and logged; all violations (including warnings)
/// are kept in the report. Output is sorted by document id, sets by
/// annotator id.
inline LoadedCampaign load_campaign(const std::filesystem::path& root,
                                    const ValidationPolicy& policy = {}) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(root)) throw IoError("campaign root is not a directory: " + root.string());

  std::vector<fs::path> doc_dirs;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory()) doc_dirs.push_back(entry.path());
  }
  std::sort(doc_dirs.begin(), doc_dirs.end());

  LoadedCampaign out;
  auto& report = out.report;
  for (const auto& dir : doc_dirs) {
    const std::string doc_id = dir.filename().string();
    fs::path txt = dir / (doc_id + ".txt");
    if (!fs::exists(txt)) txt = root / (doc_id + ".txt");
    if (!fs::exists(txt)) continue;  // not a document directory
    ++report.documents_found;

    Document doc(doc_id, standoff_detail::read_file(txt));
    AnnotationBundle bundle{doc, {}, std::nullopt};

    std::vector<fs::path> anns;
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.is_regular_file() && entry.path().extension() == ".ann") {
        anns.push_back(entry.path());
      }
    }
    std::sort(anns.begin(), anns.end());

    for (const auto& ann : anns) {
      const std::string annotator = ann.stem().string();
      std::vector<UnsupportedLine> unsupported;
      AnnotationSet set;
      try {
        set = parse_ann(standoff_detail::read_file(ann), bundle.document, annotator, &unsupported);
      } catch (const Error& e) {
        report.issues.push_back({doc_id, annotator, "parse_error", e.what()});
        continue;
      }
      for (const auto& u : unsupported) {
        report.issues.push_back({doc_id, annotator, "unsupported",
                                 "line " + std::to_string(u.line) + ": " + u.reason});
      }
      auto violations = validate(set, bundle.document.length(), policy);
      const bool rejected = has_errors(violations);
      report.violations.insert(report.violations.end(), violations.begin(), violations.end());
      if (rejected) {
        ++report.sets_removed;
        report.issues.push_back({doc_id, annotator, "removed_set",
                                 std::to_string(violations.size()) +
                                     " violation(s), first: " + violations.front().message});
        continue;
      }
      ++report.sets_loaded;
      if (annotator == kGoldAnnotatorId) {
        bundle.gold = std::move(set);
      } else {
        bundle.sets.push_back(std::move(set));
      }
    }

    if (bundle.sets.empty() && !bundle.gold) {
      report.skipped_documents.push_back(doc_id);
      report.issues.push_back({doc_id, "", "skipped_document", "no parseable annotation set"});
      continue;
    }
    if (bundle.sets.empty()) report.gold_only_documents.push_back(doc_id);
    ++report.documents_loaded;
    out.bundles.push_back(std::move(bundle));
  }
  return out;
}

/// Writes bundles in the layout `load_campaign` reads.
inline void write_campaign(const std::filesystem::path& root,
                           const std::vector<AnnotationBundle>& bundles) {
  namespace fs = std::filesystem;
  fs::create_directories(root);
  for (const auto& b : bundles) {
    const auto dir = root / b.document.id();
    fs::create_directories(dir);
    auto write = [](const fs::path& p, const std::string& content) {
      std::ofstream out(p, std::ios::binary);
      if (!out) throw IoError("cannot write " + p.string());
      out << content;
    };
    write(dir / (b.document.id() + ".txt"), b.document.text());
    for (const auto& s : b.sets) write(dir / (s.annotator_id + ".ann"), write_ann(s, b.document));
    if (b.gold) write(dir / "gold.ann", write_ann(*b.gold, b.document));
  }
}

}  // namespace argcrowd

#endif  // ARGCROWD_STANDOFF_HPP
