#include "argcrowd/simulate.hpp"

#include <gtest/gtest.h>

#include <filesystem>

#include "argcrowd/agreement_report.hpp"

namespace argcrowd {
namespace {

CampaignConfig small(std::uint64_t seed) {
  CampaignConfig c;
  c.documents = 12;
  c.annotators = 8;
  c.seed = seed;
  return c;
}

TEST(Simulate, RequiresSeed) {
  CampaignConfig c;
  EXPECT_THROW(generate(c), ConfigError);
}

TEST(Simulate, RejectsBadConfig) {
  auto c = small(1);
  c.annotators_per_doc = 1;
  EXPECT_THROW(generate(c), ConfigError);
  c = small(1);
  c.devoted.label_flip = 1.5;
  EXPECT_THROW(generate(c), ConfigError);
  c = small(1);
  c.annotators = 3;
  EXPECT_THROW(generate(c), ConfigError);
  c = small(1);
  c.gold_per_annotator = 2;
  EXPECT_THROW(generate(c), ConfigError);
  c = small(1);
  c.min_length = 300;
  EXPECT_THROW(generate(c), ConfigError);
}

TEST(Simulate, Shape) {
  const auto sim = generate(small(3));
  ASSERT_EQ(sim.bundles.size(), 13u);
  EXPECT_EQ(sim.bundles.front().document.id(), "doc-00");
  EXPECT_EQ(sim.bundles.back().document.id(), "gold-0");
  for (const auto& b : sim.bundles) {
    EXPECT_GE(b.document.length(), 80u);
    EXPECT_LE(b.document.length(), 200u);
    if (b.is_gold()) {
      EXPECT_EQ(b.sets.size(), 8u);
    } else {
      EXPECT_EQ(b.sets.size(), 4u);
    }
    for (std::size_t i = 1; i < b.sets.size(); ++i) EXPECT_LT(b.sets[i - 1].annotator_id, b.sets[i].annotator_id);
  }
}

TEST(Simulate, EverySetIsStructurallyValid) {
  auto c = small(5);
  c.devoted.jitter = 3;
  c.devoted.label_flip = 0.3;
  c.devoted.relation_drop = 0.3;
  c.devoted.sentiment_flip = 0.3;
  c.spammer_share = 0.25;
  const auto sim = generate(c);
  for (std::size_t d = 0; d < sim.bundles.size(); ++d) {
    const auto& b = sim.bundles[d];
    EXPECT_TRUE(validate(sim.truth.documents[d], b.document.length(), {}).empty());
    for (const auto& s : b.sets) {
      const auto v = validate(s, b.document.length(), {});
      EXPECT_TRUE(v.empty()) << b.document.id() << "/" << s.annotator_id << ": " << v.front().message;
    }
  }
}

TEST(Simulate, NoiseFreeCampaignIsUnanimous) {
  const auto sim = generate(small(7));
  for (std::size_t d = 0; d < sim.bundles.size(); ++d) {
    for (const auto& s : sim.bundles[d].sets) {
      EXPECT_EQ(s.components, sim.truth.documents[d].components);
      EXPECT_EQ(s.relations, sim.truth.documents[d].relations);
    }
    for (const auto& r : report(sim.bundles[d], ReportScope::Both)) {
      if (r.headline().defined()) {
        EXPECT_DOUBLE_EQ(r.headline().value(), 1.0);
      }
    }
  }
}

TEST(Simulate, SameSeedSameOutputAcrossThreads) {
  auto c = small(9);
  c.devoted.jitter = 2;
  c.devoted.label_flip = 0.1;
  c.spammer_share = 0.25;
  const auto a = generate(c);
  c.threads = 4;
  const auto b = generate(c);
  ASSERT_EQ(a.bundles.size(), b.bundles.size());
  for (std::size_t i = 0; i < a.bundles.size(); ++i) {
    EXPECT_EQ(a.bundles[i].document.text(), b.bundles[i].document.text());
    ASSERT_EQ(a.bundles[i].sets.size(), b.bundles[i].sets.size());
    for (std::size_t k = 0; k < a.bundles[i].sets.size(); ++k) {
      EXPECT_EQ(nlohmann::json(a.bundles[i].sets[k]), nlohmann::json(b.bundles[i].sets[k]));
    }
  }
  EXPECT_EQ(nlohmann::json(a.truth), nlohmann::json(b.truth));
  c.seed = 10;
  EXPECT_NE(nlohmann::json(generate(c).truth), nlohmann::json(a.truth));
}

TEST(Simulate, SpammerShare) {
  auto c = small(11);
  c.annotators = 50;
  c.spammer_share = 0.2;
  const auto sim = generate(c);
  std::size_t spammers = 0;
  for (const auto& a : sim.truth.annotators) spammers += a.kind == AnnotatorKind::Spammer;
  EXPECT_EQ(spammers, 10u);
}

TEST(Simulate, LabelAccuracyWithoutJitter) {
  // Per-character accuracy of a devoted copy is about 1 - label_flip.
  CampaignConfig c;
  c.documents = 300;
  c.annotators = 4;
  c.gold_documents = 0;
  c.gold_per_annotator = 0;
  c.devoted.label_flip = 0.2;
  c.seed = 13;
  const auto sim = generate(c);
  double correct = 0, total = 0;
  for (std::size_t d = 0; d < sim.bundles.size(); ++d) {
    const auto len = sim.bundles[d].document.length();
    const auto truth = to_char_labels(sim.truth.documents[d], len);
    for (const auto& s : sim.bundles[d].sets) {
      const auto got = to_char_labels(s, len);
      for (std::size_t i = 0; i < len; ++i) {
        if (truth[i] == ComponentLabel::NA) continue;
        total += 1;
        // Premises left without a relation become PSIC; count those as kept.
        const bool same = got[i] == truth[i] ||
                          (truth[i] == ComponentLabel::Premise && got[i] == ComponentLabel::PSIC);
        correct += same;
      }
    }
  }
  EXPECT_NEAR(correct / total, 0.8, 0.03);
}

TEST(Simulate, SpammersLowerAgreement) {
  auto c = small(17);
  c.documents = 60;
  c.annotators = 20;
  c.devoted.jitter = 1;
  c.devoted.label_flip = 0.05;
  auto mean_alpha = [](const SimulatedCampaign& sim) {
    double sum = 0, n = 0;
    for (const auto& b : sim.bundles) {
      if (b.is_gold()) continue;
      const auto r = report(b, ReportScope::Document)[0];
      if (r.headline().defined()) sum += r.headline().value(), n += 1;
    }
    return sum / n;
  };
  const double baseline = mean_alpha(generate(c));
  c.spammer_share = 0.2;
  EXPECT_LT(mean_alpha(generate(c)), baseline);
}

TEST(Simulate, InjectedViolationsAreRecordedAndDetected) {
  auto c = small(19);
  c.violation_rate = 0.5;
  const auto sim = generate(c);
  ASSERT_FALSE(sim.truth.injected.empty());
  for (const auto& inj : sim.truth.injected) {
    const AnnotationSet* set = nullptr;
    std::size_t len = 0;
    for (const auto& b : sim.bundles) {
      for (const auto& s : b.sets) {
        if (b.document.id() == inj.doc_id && s.annotator_id == inj.annotator_id) set = &s, len = b.document.length();
      }
    }
    ASSERT_NE(set, nullptr);
    const auto v = validate(*set, len, {});
    EXPECT_TRUE(std::any_of(v.begin(), v.end(), [&](const Violation& x) {
      return x.rule == inj.rule && x.target_id == inj.target_id;
    })) << inj.doc_id << "/" << inj.annotator_id << " " << to_string(inj.rule);
  }
}

TEST(Simulate, WritesLoadableCampaign) {
  const auto root = std::filesystem::temp_directory_path() / "argcrowd_simulate_test";
  std::filesystem::remove_all(root);
  auto c = small(23);
  c.devoted.jitter = 2;
  c.devoted.label_flip = 0.1;
  const auto sim = generate(c);
  write_simulation(root, sim);
  const auto loaded = load_campaign(root);
  ASSERT_EQ(loaded.bundles.size(), sim.bundles.size());
  EXPECT_EQ(loaded.report.sets_removed, 0u);
  for (std::size_t i = 0; i < sim.bundles.size(); ++i) {
    EXPECT_EQ(loaded.bundles[i].document.text(), sim.bundles[i].document.text());
    ASSERT_EQ(loaded.bundles[i].sets.size(), sim.bundles[i].sets.size());
    for (std::size_t k = 0; k < sim.bundles[i].sets.size(); ++k) {
      EXPECT_EQ(canonical(loaded.bundles[i].sets[k]), canonical(sim.bundles[i].sets[k]));
    }
    EXPECT_EQ(loaded.bundles[i].is_gold(), sim.bundles[i].is_gold());
  }
  std::ifstream in(root / "ground_truth.json");
  const auto truth = nlohmann::json::parse(in).get<GroundTruth>();
  EXPECT_EQ(nlohmann::json(truth), nlohmann::json(sim.truth));
  std::filesystem::remove_all(root);
}

}  // namespace
}  // namespace argcrowd
