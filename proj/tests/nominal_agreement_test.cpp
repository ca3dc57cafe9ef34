#include "argcrowd/nominal_agreement.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "argcrowd/random.hpp"
#include "nominal_oracle.hpp"

namespace argcrowd {
namespace {

using testing::Oracle;

LabelMatrix worked_instance() {
  // item 1: (A, A, B), item 2: (B, B, B) with A = 0, B = 1
  LabelMatrix m(2, 3, 2);
  m.set(0, 0, 0);
  m.set(0, 1, 0);
  m.set(0, 2, 1);
  for (std::size_t a = 0; a < 3; ++a) m.set(1, a, 1);
  return m;
}

TEST(Nominal, WorkedInstance) {
  const auto m = worked_instance();
  EXPECT_NEAR(percentage_agreement(m).value(), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(multi_pi(m).value(), 0.25, 1e-15);
  EXPECT_NEAR(kripp_alpha_nominal(m).value(), 0.375, 1e-15);
  const Oracle o{m};
  EXPECT_NEAR(o.pi(), 0.25, 1e-15);
  EXPECT_NEAR(o.alpha(), 0.375, 1e-15);
}

TEST(Nominal, IdenticalAnnotatorsScoreOne) {
  LabelMatrix m(6, 4, 3);
  for (std::size_t i = 0; i < 6; ++i) {
    for (std::size_t a = 0; a < 4; ++a) m.set(i, a, i % 3);
  }
  EXPECT_EQ(percentage_agreement(m).value(), 1.0);
  EXPECT_EQ(multi_pi(m).value(), 1.0);
  EXPECT_EQ(kripp_alpha_nominal(m).value(), 1.0);
}

TEST(Nominal, DisjointLabelsGiveZeroPercentage) {
  LabelMatrix m(5, 2, 2);
  for (std::size_t i = 0; i < 5; ++i) {
    m.set(i, 0, 0);
    m.set(i, 1, 1);
  }
  EXPECT_EQ(percentage_agreement(m).value(), 0.0);
}

TEST(Nominal, SingleCategoryEverywhereIsUndefined) {
  LabelMatrix m(4, 3, 2);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t a = 0; a < 3; ++a) m.set(i, a, 1);
  }
  EXPECT_EQ(percentage_agreement(m).value(), 1.0);
  EXPECT_FALSE(multi_pi(m).defined());
  EXPECT_FALSE(kripp_alpha_nominal(m).defined());
}

TEST(Nominal, SingleDisagreeingPairIsNotAboveChance) {
  LabelMatrix m(1, 2, 2);
  m.set(0, 0, 0);
  m.set(0, 1, 1);
  const auto a = kripp_alpha_nominal(m);
  ASSERT_TRUE(a.defined());
  // Do = 1 and, with the n(n-1) correction, De = 2/2 = 1.
  EXPECT_EQ(a.value(), 0.0);
  EXPECT_NEAR(Oracle{m}.alpha(), 0.0, 1e-15);
}

TEST(Nominal, FewerThanTwoAnnotatorsThrows) {
  LabelMatrix m(3, 1, 2);
  EXPECT_THROW(percentage_agreement(m), DegenerateInput);
  EXPECT_THROW(multi_pi(m), DegenerateInput);
  EXPECT_THROW(kripp_alpha_nominal(m), DegenerateInput);
}

TEST(Nominal, MatchesOracleOnRandomInstances) {
  rnd::Engine rng(20240611);
  int checked = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const auto m_ann = static_cast<std::size_t>(rnd::between(rng, 2, 5));
    const auto items = static_cast<std::size_t>(rnd::between(rng, 1, 20));
    const auto cats = static_cast<std::size_t>(rnd::between(rng, 2, 5));
    const bool with_missing = trial % 2 == 1;
    LabelMatrix m(items, m_ann, cats);
    for (std::size_t i = 0; i < items; ++i) {
      for (std::size_t a = 0; a < m_ann; ++a) {
        if (with_missing && rnd::bernoulli(rng, 0.15)) continue;
        m.set(i, a, rnd::index(rng, cats));
      }
    }
    const Oracle o{m};
    const auto pct = percentage_agreement(m);
    const auto pi = multi_pi(m);
    const auto alpha = kripp_alpha_nominal(m);
    if (!pct.defined()) continue;
    EXPECT_NEAR(pct.value(), o.percentage(), 1e-12);
    if (pi.defined()) {
      EXPECT_NEAR(pi.value(), o.pi(), 1e-12);
    }
    if (alpha.defined()) {
      EXPECT_NEAR(alpha.value(), o.alpha(), 1e-12);
      ++checked;
    }
  }
  EXPECT_GT(checked, 300);
}

TEST(Nominal, PermutationInvariant) {
  rnd::Engine rng(5);
  LabelMatrix m(15, 4, 3), p(15, 4, 3);
  const std::size_t perm[] = {2, 0, 3, 1};
  for (std::size_t i = 0; i < 15; ++i) {
    for (std::size_t a = 0; a < 4; ++a) {
      const auto c = rnd::index(rng, 3);
      m.set(i, a, c);
      p.set(i, perm[a], c);
    }
  }
  EXPECT_NEAR(multi_pi(m).value(), multi_pi(p).value(), 1e-15);
  EXPECT_NEAR(kripp_alpha_nominal(m).value(), kripp_alpha_nominal(p).value(), 1e-15);
}

TEST(Nominal, RandomLabelsNearChance) {
  rnd::Engine rng(99);
  LabelMatrix m(10000, 4, 2);
  for (std::size_t i = 0; i < m.items(); ++i) {
    for (std::size_t a = 0; a < 4; ++a) m.set(i, a, rnd::index(rng, 2));
  }
  EXPECT_LT(std::abs(multi_pi(m).value()), 0.05);
  EXPECT_LT(std::abs(kripp_alpha_nominal(m).value()), 0.05);
}

TEST(Nominal, BinarizedView) {
  const auto m = worked_instance();
  const auto b = m.binarized(0);
  EXPECT_EQ(*b.at(0, 0), 1u);
  EXPECT_EQ(*b.at(0, 2), 0u);
  EXPECT_EQ(*b.at(1, 1), 0u);
}

}  // namespace
}  // namespace argcrowd
