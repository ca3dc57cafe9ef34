#include "argcrowd/pipeline.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace argcrowd;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("argcrowd_pipeline_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t lines(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::size_t n = 0;
  for (std::string l; std::getline(in, l);) n += !l.empty();
  return n;
}

PipelineConfig small_config(const fs::path& root, std::size_t threads) {
  PipelineConfig c;
  c.input_root = root / "campaign";
  c.output_root = root / "out";
  c.seed = 11;
  c.threads = threads;
  c.simulate.documents = 30;
  c.simulate.annotators = 12;
  c.simulate.spammer_share = 0.25;
  c.simulate.devoted.jitter = 1;
  c.simulate.devoted.label_flip = 0.1;
  c.simulate.violation_rate = 0.1;
  return c;
}

const std::vector<const char*> kAllArtifacts = {
    artifacts::kLoadReport,     artifacts::kValidation,      artifacts::kCampaign,
    artifacts::kAgreement,      artifacts::kAgreementDocuments, artifacts::kAgreementSentences,
    artifacts::kDevotedness,    artifacts::kRemovalReport,   artifacts::kFilteredCampaign,
    artifacts::kAggregated,     artifacts::kEasyCorpus,      artifacts::kSentenceCorpus,
    artifacts::kStatistics,     artifacts::kStatisticsText,  artifacts::kCpm,
    artifacts::kCpmText,        artifacts::kSummary,         artifacts::kSummaryText};

}  // namespace

TEST(PipelineConfig, ParsesKeysAndComments) {
  const auto c = PipelineConfig::parse(
      "# thresholds\n"
      "easy_threshold = 0.55\n"
      "sentence_threshold=0.75  # inline\n"
      "\n"
      "quality_threshold = 3\n"
      "alpha_u_mode = randomization\n"
      "alpha_u_resamples = 500\n"
      "seed = 42\n"
      "cpm_granularity = clause\n"
      "allow_multiple_targets = false\n"
      "downgrade = MissingSentiment, UnattachedPremise\n"
      "simulate.documents = 12\n"
      "simulate.jitter = 2.5\n");
  EXPECT_DOUBLE_EQ(c.thresholds.easy, 0.55);
  EXPECT_DOUBLE_EQ(c.thresholds.sentence, 0.75);
  EXPECT_EQ(c.quality_threshold, 3u);
  EXPECT_EQ(c.alpha_mode, UnitizedAlphaOptions::Mode::Randomization);
  EXPECT_EQ(c.alpha_resamples, 500u);
  EXPECT_EQ(c.seed, 42u);
  EXPECT_EQ(c.cpm_granularity, CpmGranularity::Clause);
  EXPECT_FALSE(c.policy.allow_multiple_targets);
  EXPECT_EQ(c.policy.downgraded.size(), 2u);
  EXPECT_TRUE(c.policy.downgraded.contains(Rule::MissingSentiment));
  EXPECT_EQ(c.simulate.documents, 12u);
  EXPECT_DOUBLE_EQ(c.simulate.devoted.jitter, 2.5);
  EXPECT_EQ(c.alpha().mode, UnitizedAlphaOptions::Mode::Randomization);
}

TEST(PipelineConfig, ErrorsNameTheLine) {
  try {
    PipelineConfig::parse("seed = 1\n\nno_such_key = 1\n");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("no_such_key"), std::string::npos) << e.what();
  }
  EXPECT_THROW(PipelineConfig::parse("seed 1\n"), ConfigError);
  EXPECT_THROW(PipelineConfig::parse("min_sets = two\n"), ConfigError);
  EXPECT_THROW(PipelineConfig::parse("easy_threshold = 0.6x\n"), ConfigError);
  EXPECT_THROW(PipelineConfig::parse("allow_multiple_targets = maybe\n"), ConfigError);
  EXPECT_THROW(PipelineConfig::parse("downgrade = NotARule\n"), ConfigError);
  EXPECT_THROW(PipelineConfig::parse("alpha_u_mode = exact\n"), ConfigError);
  EXPECT_THROW(PipelineConfig::load("/nonexistent/argcrowd.conf"), ConfigError);
}

TEST(PipelineConfig, ValidationRejectsOutOfRange) {
  PipelineConfig c;
  c.thresholds.easy = 1.5;
  EXPECT_THROW(Pipeline{c}, ConfigError);
  c = {};
  c.tail_fraction = 0;
  EXPECT_THROW(Pipeline{c}, ConfigError);
  c = {};
  c.overlap_threshold = 0;
  EXPECT_THROW(Pipeline{c}, ConfigError);
}

TEST(Pipeline, StageBeforeItsInputsThrowsMissingStage) {
  const auto root = scratch("missing");
  PipelineConfig c;
  c.output_root = root / "out";
  Pipeline p(c);
  EXPECT_THROW(p.agreement(), MissingStage);
  EXPECT_THROW(p.filter(), MissingStage);
  EXPECT_THROW(p.aggregate(), MissingStage);
  EXPECT_THROW(p.build(), MissingStage);
  EXPECT_THROW(p.cpm(), MissingStage);
  EXPECT_THROW(p.report(), MissingStage);
  fs::remove_all(root);
}

TEST(Pipeline, SimulateRefusesNonEmptyTarget) {
  const auto root = scratch("nonempty");
  auto c = small_config(root, 1);
  fs::create_directories(c.input_root);
  std::ofstream(c.input_root / "keep.txt") << "x";
  EXPECT_THROW(Pipeline(c).simulate(), IoError);
  fs::remove_all(root);
}

TEST(Pipeline, SimulateRequiresSeed) {
  const auto root = scratch("noseed");
  auto c = small_config(root, 1);
  c.seed.reset();
  EXPECT_THROW(Pipeline(c).simulate(), ConfigError);
  fs::remove_all(root);
}

TEST(Pipeline, FullRunWritesEveryArtifact) {
  const auto root = scratch("full");
  const auto c = small_config(root, 2);
  Pipeline p(c);
  p.simulate();
  p.run_all();
  for (const auto* a : kAllArtifacts) EXPECT_TRUE(fs::exists(c.output_root / a)) << a;

  const auto truth = nlohmann::json::parse(slurp(c.input_root / "ground_truth.json"));
  const auto load = nlohmann::json::parse(slurp(c.output_root / artifacts::kLoadReport));
  // 30 documents plus one gold document.
  EXPECT_EQ(load.at("documents_loaded").get<std::size_t>(), 31u);
  EXPECT_EQ(lines(c.output_root / artifacts::kCampaign), 31u);
  EXPECT_EQ(lines(c.output_root / artifacts::kAgreementDocuments), 30u);
  // Every injected violation is reported.
  EXPECT_GE(load.at("violation_count").get<std::size_t>(), truth.at("injected_violations").size());
  EXPECT_GT(truth.at("injected_violations").size(), 0u);
  EXPECT_EQ(lines(c.output_root / artifacts::kValidation), load.at("violation_count").get<std::size_t>());

  const auto devotedness = nlohmann::json::parse(slurp(c.output_root / artifacts::kDevotedness));
  EXPECT_EQ(devotedness.size(), 12u);

  const auto summary = nlohmann::json::parse(slurp(c.output_root / artifacts::kSummary));
  const auto& counts = summary.at("corpus").at("counts");
  // Documents left with fewer than min_sets sets are pruned by the filter.
  const auto kept = 30u - summary.at("quality").at("removed_documents").size();
  EXPECT_EQ(counts.at("documents").get<std::size_t>(), kept);
  EXPECT_EQ(counts.at("easy").get<std::size_t>() + counts.at("controversial").get<std::size_t>(), kept);
  EXPECT_EQ(lines(c.output_root / artifacts::kEasyCorpus), counts.at("easy").get<std::size_t>());
  EXPECT_EQ(lines(c.output_root / artifacts::kSentenceCorpus), counts.at("sentences_selected").get<std::size_t>());
  EXPECT_FALSE(slurp(c.output_root / artifacts::kSummaryText).empty());
  fs::remove_all(root);
}

TEST(Pipeline, ArtifactsIndependentOfThreadCount) {
  const auto root1 = scratch("threads1");
  const auto root4 = scratch("threads4");
  const auto c1 = small_config(root1, 1);
  const auto c4 = small_config(root4, 4);
  Pipeline p1(c1);
  Pipeline p4(c4);
  p1.simulate();
  p4.simulate();
  EXPECT_EQ(slurp(c1.input_root / "ground_truth.json"), slurp(c4.input_root / "ground_truth.json"));
  p1.run_all();
  p4.run_all();
  for (const auto* a : kAllArtifacts) {
    EXPECT_EQ(slurp(c1.output_root / a), slurp(c4.output_root / a)) << a;
  }
  fs::remove_all(root1);
  fs::remove_all(root4);
}

TEST(Pipeline, ClauseGranularityCpmRowsSumToOne) {
  const auto root = scratch("clause");
  auto c = small_config(root, 2);
  c.cpm_granularity = CpmGranularity::Clause;
  Pipeline p(c);
  p.simulate();
  p.run_all();
  const auto cpm = nlohmann::json::parse(slurp(c.output_root / artifacts::kCpm));
  EXPECT_EQ(cpm.at("granularity"), "clause");
  const auto& easy = cpm.at("easy");
  ASSERT_FALSE(easy.contains("undefined"));
  for (std::size_t r = 0; r < kNumLabels; ++r) {
    if (!easy.at("row_defined")[r].get<bool>()) continue;
    double sum = 0;
    for (const auto& v : easy.at("probabilities")[r]) sum += v.get<double>();
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
  fs::remove_all(root);
}
