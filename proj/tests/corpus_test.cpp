#include "argcrowd/corpus.hpp"

#include <gtest/gtest.h>

#include "argcrowd/simulate.hpp"
#include "test_support.hpp"

namespace argcrowd {
namespace {

using L = ComponentLabel;
using testing::comp;
using testing::rel;

TEST(Split, ThresholdBoundaries) {
  const std::vector<Score> s = {Score::of(0.60), Score::of(0.59), Score::undefined("x"), Score::of(1.0)};
  const auto r = split(s, {});
  EXPECT_EQ(r.easy, (std::vector<std::size_t>{0, 3}));
  EXPECT_EQ(r.controversial, (std::vector<std::size_t>{1, 2}));
  EXPECT_EQ(r.undefined, (std::vector<std::size_t>{2}));
  EXPECT_TRUE(reaches(Score::of(0.70), Thresholds{}.sentence));
  EXPECT_FALSE(reaches(Score::of(0.69), Thresholds{}.sentence));
}

TEST(Thresholds, OutOfRangeIsConfigError) {
  EXPECT_THROW((Thresholds{1.5, 0.7}.validate()), ConfigError);
  EXPECT_THROW((Thresholds{0.6, -2}.validate()), ConfigError);
}

TEST(Segmentation, Sentences) {
  EXPECT_EQ(segment_sentences_utf8("房间很好。服务不错！"), (std::vector<CharSpan>{{0, 5}, {5, 10}}));
  EXPECT_EQ(segment_sentences_utf8("房间很好服务不错"), (std::vector<CharSpan>{{0, 8}}));
  EXPECT_EQ(segment_sentences_utf8("房间很好。\n"), (std::vector<CharSpan>{{0, 6}}));
}

AnnotationSet set_of(std::string a, std::vector<ComponentAnnotation> c, std::vector<RelationAnnotation> r = {}) {
  return AnnotationSet{std::move(a), "d", std::move(c), std::move(r)};
}

TEST(Build, UnanimousBundleIsEasy) {
  const auto s = set_of("a", {comp("T1", 0, 4, L::Claim), comp("T2", 5, 9, L::Premise)}, {rel("R1", "T2", "T1")});
  auto b = s;
  b.annotator_id = "b";
  const std::vector<AnnotationBundle> bundles = {{Document("d", "房间很好。服务不错！"), {s, b}, std::nullopt}};
  const auto out = build(bundles);
  ASSERT_EQ(out.easy.size(), 1u);
  EXPECT_TRUE(out.sentences.empty());
  const auto& r = out.easy[0];
  ASSERT_EQ(r.components.size(), 2u);
  for (const auto& c : r.components) EXPECT_DOUBLE_EQ(c.confidence, 1.0);
  ASSERT_TRUE(r.relations);
  ASSERT_EQ(r.relations->size(), 1u);
  EXPECT_DOUBLE_EQ(r.relations->at(0).confidence, 1.0);
  EXPECT_EQ(out.easy_statistics.components[index_of(L::Claim)].total, 1u);
  EXPECT_DOUBLE_EQ(out.easy_statistics.components[index_of(L::Claim)].average, 1.0);
  EXPECT_EQ(out.easy_statistics.relations->at(0).total, 1u);
  EXPECT_EQ(out.easy_statistics.relations->at(0).records, 1u);
}

TEST(Build, ControversialDocumentKeepsItsUnanimousSentence) {
  // Sentence 0 is disputed, sentence 1 unanimous.
  const std::vector<AnnotationBundle> bundles = {
      {Document("d", "房间很好。服务不错！"),
       {set_of("a", {comp("T1", 0, 4, L::Claim), comp("T2", 5, 9, L::Premise)}),
        set_of("b", {comp("T1", 0, 2, L::Premise), comp("T2", 5, 9, L::Premise)}),
        set_of("c", {comp("T1", 2, 4, L::MajorClaim), comp("T2", 5, 9, L::Premise)})},
       std::nullopt}};
  const auto out = build(bundles);
  EXPECT_TRUE(out.easy.empty());
  EXPECT_EQ(out.counts.controversial, 1u);
  EXPECT_EQ(out.counts.sentences, 2u);
  ASSERT_EQ(out.sentences.size(), 1u);
  const auto& r = out.sentences[0];
  EXPECT_EQ(r.sentence_index, 1u);
  EXPECT_EQ(r.text, "服务不错！");
  EXPECT_FALSE(r.relations);
  ASSERT_EQ(r.components.size(), 1u);
  EXPECT_EQ(r.components[0].span, (CharSpan{0, 4}));  // sentence-local
  EXPECT_DOUBLE_EQ(r.alpha_u.value(), 1.0);
  EXPECT_FALSE(out.sentence_statistics.relations);
}

TEST(Build, UndefinedDocumentIsControversialAndFlagged) {
  const std::vector<AnnotationBundle> bundles = {
      {Document("d", "房间很好。"), {set_of("a", {}), set_of("b", {})}, std::nullopt}};
  const auto out = build(bundles);
  EXPECT_EQ(out.counts.controversial, 1u);
  EXPECT_EQ(out.undefined_documents, (std::vector<std::string>{"d"}));
  EXPECT_EQ(out.counts.sentences_undefined, 1u);
  EXPECT_TRUE(out.sentences.empty());
}

TEST(Build, GoldDocumentsExcluded) {
  const auto s = set_of("a", {comp("T1", 0, 4, L::Claim)});
  const std::vector<AnnotationBundle> bundles = {{Document("g", "房间很好。"), {s, s}, s}};
  EXPECT_EQ(build(bundles).counts.documents, 0u);
}

TEST(Build, PartitionTotalityAndStatisticsTotals) {
  CampaignConfig c;
  c.documents = 60;
  c.devoted.jitter = 2;
  c.devoted.label_flip = 0.15;
  c.spammer_share = 0.1;
  c.seed = 31;
  const auto sim = generate(c);
  BuildOptions opts;
  opts.threads = 3;
  const auto out = build(sim.bundles, opts);
  EXPECT_EQ(out.counts.documents, 60u);
  EXPECT_EQ(out.counts.easy + out.counts.controversial, out.counts.documents);
  EXPECT_EQ(out.easy.size(), out.counts.easy);
  EXPECT_GT(out.counts.easy, 0u);
  EXPECT_GT(out.counts.controversial, 0u);
  EXPECT_LE(out.counts.sentences_selected, out.counts.sentences);
  for (const auto& r : out.easy) EXPECT_GE(r.alpha_u.value(), 0.6);
  for (const auto& r : out.sentences) {
    EXPECT_GE(r.alpha_u.value(), 0.7);
    EXPECT_FALSE(r.relations);
  }
  for (auto label : kComponentLabels) {
    std::size_t total = 0;
    for (const auto& r : out.easy) {
      for (const auto& comp : r.components) total += comp.label == label;
    }
    const auto& row = out.easy_statistics.components[index_of(label)];
    EXPECT_EQ(row.total, total);
    EXPECT_DOUBLE_EQ(row.average, static_cast<double>(total) / static_cast<double>(out.easy.size()));
  }
  // Thread count does not change the output.
  opts.threads = 1;
  const auto serial = build(sim.bundles, opts);
  EXPECT_EQ(nlohmann::json(serial.easy).dump(), nlohmann::json(out.easy).dump());
  EXPECT_EQ(nlohmann::json(serial.easy_statistics).dump(), nlohmann::json(out.easy_statistics).dump());
  EXPECT_FALSE(render(out.easy_statistics).empty());
}

TEST(CorpusRecord, JsonShape) {
  CorpusRecord r{"d", 2, {5, 10}, "服务不错！", Score::of(0.8), {}, std::nullopt};
  const nlohmann::json j = r;
  EXPECT_EQ(j.at("doc_id"), "d");
  EXPECT_EQ(j.at("sentence_index"), 2);
  EXPECT_FALSE(j.contains("relations"));
  EXPECT_TRUE(j.at("components").is_array());
}

}  // namespace
}  // namespace argcrowd
