#ifndef ARGCROWD_NOMINAL_AGREEMENT_HPP
#define ARGCROWD_NOMINAL_AGREEMENT_HPP

// Categorical agreement over an items x annotators matrix: percentage
// agreement, Fleiss' multi-rater pi, and Krippendorff's alpha with the
// nominal distance. Missing cells are allowed; items with fewer than two
// values are not pairable and are skipped by all three statistics.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "argcrowd/argmodel.hpp"
#include "argcrowd/errors.hpp"
#include "argcrowd/score.hpp"

namespace argcrowd {

class LabelMatrix {
 public:
  LabelMatrix(std::size_t items, std::size_t annotators, std::size_t categories)
      : items_(items), annotators_(annotators), categories_(categories),
        cells_(items * annotators, kMissing) {}

  std::size_t items() const noexcept { return items_; }
  std::size_t annotators() const noexcept { return annotators_; }
  std::size_t categories() const noexcept { return categories_; }

  void set(std::size_t item, std::size_t annotator, std::size_t category) {
    if (category >= categories_) throw Error("category index out of range");
    cells_.at(item * annotators_ + annotator) = static_cast<std::int32_t>(category);
  }
  void clear(std::size_t item, std::size_t annotator) {
    cells_.at(item * annotators_ + annotator) = kMissing;
  }
  std::optional<std::size_t> at(std::size_t item, std::size_t annotator) const {
    const auto v = cells_[item * annotators_ + annotator];
    if (v == kMissing) return std::nullopt;
    return static_cast<std::size_t>(v);
  }

  /// Appends the rows of `other`; annotator columns beyond other's width are missing.
  void append(const LabelMatrix& other) {
    if (other.categories_ != categories_ || other.annotators_ > annotators_) {
      throw Error("cannot append label matrix of different shape");
    }
    const auto first = items_;
    items_ += other.items_;
    cells_.resize(items_ * annotators_, kMissing);
    for (std::size_t i = 0; i < other.items_; ++i) {
      for (std::size_t a = 0; a < other.annotators_; ++a) {
        cells_[(first + i) * annotators_ + a] = other.cells_[i * other.annotators_ + a];
      }
    }
  }

  /// One-vs-rest view: category 1 where the cell equals `category`, else 0.
  LabelMatrix binarized(std::size_t category) const {
    LabelMatrix out(items_, annotators_, 2);
    for (std::size_t k = 0; k < cells_.size(); ++k) {
      if (cells_[k] != kMissing) {
        out.cells_[k] = cells_[k] == static_cast<std::int32_t>(category) ? 1 : 0;
      }
    }
    return out;
  }

 private:
  static constexpr std::int32_t kMissing = -1;
  std::size_t items_;
  std::size_t annotators_;
  std::size_t categories_;
  std::vector<std::int32_t> cells_;
};

/// Items are characters; annotator a's cell is its label for that character.
inline LabelMatrix label_matrix(std::span<const std::vector<LabeledSpan>> annotators,
                                std::size_t length) {
  LabelMatrix m(length, annotators.size(), kNumLabels);
  for (std::size_t a = 0; a < annotators.size(); ++a) {
    const auto labels = to_char_labels(std::span<const LabeledSpan>(annotators[a]), length);
    for (std::size_t i = 0; i < length; ++i) m.set(i, a, index_of(labels[i]));
  }
  return m;
}

namespace nominal_detail {

struct Tally {
  double pairable_items = 0;
  double observed_agreement_sum = 0;  // sum over items of agreeing pairs / pairs
  double total_values = 0;            // n: values in pairable items
  double disagreement_coincidence = 0;  // sum_u sum_{c!=k} n_uc n_uk / (m_u - 1)
  std::vector<double> category_totals;
};

inline Tally tally(const LabelMatrix& m) {
  if (m.annotators() < 2) throw DegenerateInput("agreement needs at least two annotators");
  Tally t;
  t.category_totals.assign(m.categories(), 0.0);
  std::vector<double> counts(m.categories());
  for (std::size_t i = 0; i < m.items(); ++i) {
    std::fill(counts.begin(), counts.end(), 0.0);
    double mu = 0;
    for (std::size_t a = 0; a < m.annotators(); ++a) {
      if (const auto c = m.at(i, a)) {
        counts[*c] += 1;
        mu += 1;
      }
    }
    if (mu < 2) continue;
    double agreeing = 0;  // ordered pairs with equal values
    for (double n : counts) agreeing += n * (n - 1);
    const double pairs = mu * (mu - 1);
    t.pairable_items += 1;
    t.observed_agreement_sum += agreeing / pairs;
    t.total_values += mu;
    t.disagreement_coincidence += (pairs - agreeing) / (mu - 1);
    for (std::size_t c = 0; c < counts.size(); ++c) t.category_totals[c] += counts[c];
  }
  return t;
}

}  // namespace nominal_detail

/// Mean over pairable items of the share of agreeing annotator pairs.
inline Score percentage_agreement(const LabelMatrix& m) {
  const auto t = nominal_detail::tally(m);
  if (t.pairable_items == 0) return Score::undefined("no item has two or more values");
  return Score::of(t.observed_agreement_sum / t.pairable_items);
}

/// Fleiss' multi-rater pi: (P - Pe) / (1 - Pe) with Pe from pooled proportions.
inline Score multi_pi(const LabelMatrix& m) {
  const auto t = nominal_detail::tally(m);
  if (t.pairable_items == 0) return Score::undefined("no item has two or more values");
  const double p_bar = t.observed_agreement_sum / t.pairable_items;
  // Pe = squares / N^2, kept as integer sums until the final division.
  double squares = 0;
  std::size_t used = 0;
  for (double n : t.category_totals) {
    squares += n * n;
    if (n > 0) ++used;
  }
  if (used <= 1) return Score::undefined("expected agreement is 1: a single category is used");
  const double n2 = t.total_values * t.total_values;
  return Score::of((p_bar * n2 - squares) / (n2 - squares));
}

/// Krippendorff's alpha, nominal distance, coincidence-matrix form with the
/// n(n-1) small-sample correction in the expected disagreement.
inline Score kripp_alpha_nominal(const LabelMatrix& m) {
  const auto t = nominal_detail::tally(m);
  if (t.pairable_items == 0) return Score::undefined("no item has two or more values");
  const double n = t.total_values;
  double same = 0;
  for (double nc : t.category_totals) same += nc * (nc - 1);
  const double expected_pairs = n * (n - 1) - same;  // sum_{c != k} n_c n_k
  if (expected_pairs == 0) return Score::undefined("expected disagreement is 0");
  const double observed = t.disagreement_coincidence / n;
  const double expected = expected_pairs / (n * (n - 1));
  return Score::of(1.0 - observed / expected);
}

}  // namespace argcrowd

#endif  // ARGCROWD_NOMINAL_AGREEMENT_HPP
