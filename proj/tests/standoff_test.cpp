#include "argcrowd/standoff.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "argcrowd/utf8.hpp"
#include "test_support.hpp"

namespace argcrowd {
namespace {

namespace fs = std::filesystem;
using testing::comp;
using testing::rel;
using L = ComponentLabel;

const Document kDoc("d1", "舒适的环境和周到的服务，房间设施也很齐全。");

TEST(ParseAnn, TextBoundLine) {
  const auto s = parse_ann("T1\tClaim 0 6\t舒适的环境和\n", kDoc);
  ASSERT_EQ(s.components.size(), 1u);
  EXPECT_EQ(s.components[0].id, "T1");
  EXPECT_EQ(s.components[0].label, L::Claim);
  EXPECT_EQ(s.components[0].span, (CharSpan{0, 6}));
  EXPECT_FALSE(s.components[0].sentiment);
}

TEST(ParseAnn, RelationAndAttribute) {
  const auto s = parse_ann(
      "T1\tClaim 0 5\t舒适的环境\nT2\tPremise 6 11\t周到的服务\n"
      "R1\tSupport Arg1:T2 Arg2:T1\nA1\tSentiment T1 Positive\n",
      kDoc);
  ASSERT_EQ(s.relations.size(), 1u);
  EXPECT_EQ(s.relations[0], (RelationAnnotation{"R1", RelationKind::Support, "T2", "T1"}));
  ASSERT_TRUE(s.components[0].sentiment);
  EXPECT_EQ(*s.components[0].sentiment, Sentiment::Positive);
}

TEST(ParseAnn, EmptyFile) {
  const auto s = parse_ann("", kDoc, "a1");
  EXPECT_TRUE(s.components.empty());
  EXPECT_TRUE(s.relations.empty());
  EXPECT_EQ(s.annotator_id, "a1");
  EXPECT_EQ(s.document_id, "d1");
}

TEST(ParseAnn, BomAndCrlfTolerated) {
  const auto s = parse_ann("\xEF\xBB\xBFT1\tClaim 0 6\t舒适的环境和\r\nA1\tSentiment T1 Negative\r\n", kDoc);
  ASSERT_EQ(s.components.size(), 1u);
  EXPECT_EQ(s.components[0].span, (CharSpan{0, 6}));
  EXPECT_EQ(*s.components[0].sentiment, Sentiment::Negative);
}

TEST(ParseAnn, Errors) {
  EXPECT_THROW(parse_ann("T1 Claim 0 6 舒适的环境和\n", kDoc), ParseError);
  EXPECT_THROW(parse_ann("T1\tClaim 0 x\t舒\n", kDoc), ParseError);
  EXPECT_THROW(parse_ann("T1\tClaim 0 2;3 4\t舒适\n", kDoc), ParseError);
  EXPECT_THROW(parse_ann("T1\tClaim 0 6\t舒适的环境\n", kDoc), OffsetError);
  EXPECT_THROW(parse_ann("T1\tClaim 15 99\tx\n", kDoc), OffsetError);
  EXPECT_THROW(parse_ann("T1\tOpinion 0 2\t舒适\n", kDoc), UnknownLabelError);
  EXPECT_THROW(parse_ann("T1\tClaim 0 2\t舒适\nA1\tSentiment T1 Happy\n", kDoc), UnknownLabelError);
  EXPECT_THROW(parse_ann("T1\tClaim 0 2\t舒适\nR1\tCauses Arg1:T1 Arg2:T1\n", kDoc), UnknownLabelError);
  EXPECT_THROW(parse_ann("T1\tClaim 0 2\t舒适\nA1\tSentiment T7 Positive\n", kDoc), ParseError);
  EXPECT_THROW(parse_ann("X1\tfoo\n", kDoc), ParseError);
}

TEST(ParseAnn, ParseErrorCarriesLineNumber) {
  try {
    parse_ann("T1\tClaim 0 2\t舒适\n\nR1\tSupport T1 T1\n", kDoc);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(ParseAnn, UnsupportedLinesReported) {
  std::vector<UnsupportedLine> skipped;
  const auto s = parse_ann(
      "T1\tClaim 0 2\t舒适\n#1\tAnnotatorNotes T1\tnote\nA1\tConfidence T1 High\n"
      "N1\tReference T1 Wiki:1\tx\n",
      kDoc, "a", &skipped);
  EXPECT_EQ(s.components.size(), 1u);
  ASSERT_EQ(skipped.size(), 3u);
  EXPECT_EQ(skipped[0].line, 2u);
  EXPECT_EQ(skipped[1].line, 3u);
}

TEST(WriteAnn, EmptySet) { EXPECT_EQ(write_ann(AnnotationSet{}, kDoc), ""); }

TEST(WriteAnn, SingleComponentQuotesSlice) {
  AnnotationSet s{"a", "d1", {comp("X", 6, 11, L::Premise)}, {}};
  EXPECT_EQ(write_ann(s, kDoc), "T1\tPremise 6 11\t周到的服务\n");
}

TEST(WriteAnn, SentimentAndRelationInIdOrder) {
  AnnotationSet s{"a", "d1",
                  {comp("c9", 12, 20, L::Premise), comp("c2", 0, 5, L::Claim, Sentiment::Neutral)},
                  {rel("r", "c9", "c2", RelationKind::Attack)}};
  const auto text = write_ann(s, kDoc);
  EXPECT_EQ(text,
            "T1\tClaim 0 5\t舒适的环境\nT2\tPremise 12 20\t房间设施也很齐全\n"
            "A1\tSentiment T1 Neutral\nR1\tAttack Arg1:T2 Arg2:T1\n");
  EXPECT_EQ(canonical(parse_ann(text, kDoc, "a")), canonical(s));
}

TEST(WriteAnn, RoundTripProperty) {
  rnd::Engine rng(3);
  for (int i = 0; i < 200; ++i) {
    std::u32string text;
    const auto len = 1 + rnd::index(rng, 90);
    for (std::size_t k = 0; k < len; ++k) text.push_back(U'一' + static_cast<char32_t>(rnd::index(rng, 500)));
    const Document doc("d", utf8::encode(text));
    auto s = testing::random_legal_set(rng, len);
    s.document_id = "d";
    const auto back = parse_ann(write_ann(s, doc), doc, s.annotator_id);
    EXPECT_EQ(canonical(back), canonical(s));
    EXPECT_EQ(write_ann(back, doc), write_ann(s, doc));
  }
}

class CampaignDir : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = fs::temp_directory_path() /
            ("argcrowd_standoff_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
             "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(root_);
    fs::create_directories(root_);
  }
  void TearDown() override { fs::remove_all(root_); }

  void write(const fs::path& rel_path, const std::string& content) {
    fs::create_directories((root_ / rel_path).parent_path());
    std::ofstream(root_ / rel_path, std::ios::binary) << content;
  }

  void add_doc(const std::string& id, const std::vector<std::string>& annotators) {
    write(id + "/" + id + ".txt", kDoc.text());
    for (const auto& a : annotators) {
      write(id + "/" + a + ".ann",
            "T1\tClaim 0 5\t舒适的环境\nT2\tPremise 6 11\t周到的服务\n"
            "A1\tSentiment T1 Positive\nR1\tSupport Arg1:T2 Arg2:T1\n");
    }
  }

  fs::path root_;
};

TEST_F(CampaignDir, LoadsBundlesInOrder) {
  add_doc("doc_b", {"s4", "s1", "s3", "s2"});
  add_doc("doc_a", {"s2", "s1", "s4", "s3"});
  const auto c = load_campaign(root_);
  ASSERT_EQ(c.bundles.size(), 2u);
  EXPECT_EQ(c.bundles[0].document.id(), "doc_a");
  EXPECT_EQ(c.bundles[1].document.id(), "doc_b");
  for (const auto& b : c.bundles) {
    ASSERT_EQ(b.sets.size(), 4u);
    EXPECT_EQ(b.sets[0].annotator_id, "s1");
    EXPECT_EQ(b.sets[3].annotator_id, "s4");
  }
  EXPECT_EQ(c.report.sets_removed, 0u);
}

TEST_F(CampaignDir, IllegalSetIsDropped) {
  add_doc("d", {"s1", "s2", "s3"});
  write("d/s4.ann",
        "T1\tClaim 0 5\t舒适的环境\nT2\tClaim 6 11\t周到的服务\nA1\tSentiment T1 Positive\n"
        "A2\tSentiment T2 Positive\nR1\tSupport Arg1:T2 Arg2:T1\n");
  const auto c = load_campaign(root_);
  ASSERT_EQ(c.bundles.size(), 1u);
  EXPECT_EQ(c.bundles[0].sets.size(), 3u);
  EXPECT_EQ(c.report.sets_removed, 1u);
  ASSERT_EQ(c.report.violations.size(), 1u);
  EXPECT_EQ(c.report.violations[0].rule, Rule::IllegalRelationEndpoints);
}

TEST_F(CampaignDir, GoldOnlyDocumentFlagged) {
  add_doc("g", {"gold"});
  add_doc("e", {});
  const auto c = load_campaign(root_);
  ASSERT_EQ(c.bundles.size(), 1u);
  EXPECT_TRUE(c.bundles[0].is_gold());
  EXPECT_TRUE(c.bundles[0].sets.empty());
  EXPECT_EQ(c.report.gold_only_documents, std::vector<std::string>{"g"});
  EXPECT_EQ(c.report.skipped_documents, std::vector<std::string>{"e"});
}

TEST_F(CampaignDir, ParseErrorsCollectedInReport) {
  add_doc("d", {"s1", "s2"});
  write("d/s3.ann", "T1\tClaim 0 5\twrong\n");
  const auto c = load_campaign(root_);
  EXPECT_EQ(c.bundles[0].sets.size(), 2u);
  ASSERT_EQ(c.report.issues.size(), 1u);
  EXPECT_EQ(c.report.issues[0].kind, "parse_error");
  EXPECT_EQ(c.report.issues[0].annotator_id, "s3");
}

TEST_F(CampaignDir, WriteThenLoad) {
  AnnotationBundle b{Document("x", kDoc.text()),
                     {AnnotationSet{"s1", "x", {comp("T1", 0, 5, L::MajorClaim)}, {}},
                      AnnotationSet{"s2", "x", {comp("T1", 1, 5, L::MajorClaim)}, {}}},
                     AnnotationSet{"gold", "x", {comp("T1", 0, 5, L::MajorClaim)}, {}}};
  write_campaign(root_, {b});
  const auto c = load_campaign(root_);
  ASSERT_EQ(c.bundles.size(), 1u);
  EXPECT_EQ(c.bundles[0].sets, b.sets);
  EXPECT_EQ(*c.bundles[0].gold, *b.gold);
}

TEST(LoadCampaign, MissingRootIsIoError) {
  EXPECT_THROW(load_campaign("/nonexistent/argcrowd/root"), IoError);
}

}  // namespace
}  // namespace argcrowd
