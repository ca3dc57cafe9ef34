#ifndef ARGCROWD_UNITIZED_ALPHA_HPP
#define ARGCROWD_UNITIZED_ALPHA_HPP

// Unitized alpha: chance-corrected agreement for annotators who both segment
// a continuum into units and label them.
//
// For one category c each annotator partitions the continuum into c-units
// and gaps (every stretch not labelled c). Two sections g (annotator i) and
// h (annotator j) contribute
//
//   (b_g - b_h)^2 + (e_g - e_h)^2   both are c-units and they intersect
//   len(g)^2                        g is a c-unit lying inside a gap of j
//   len(h)^2                        h is a c-unit lying inside a gap of i
//   0                               otherwise
//
// Observed disagreement Do_c sums this over all ordered annotator pairs and
// divides by m(m-1)L^2. Expected disagreement De_c is the expectation of the
// same quantity when every annotator's c-units are independently relocated
// at random: the units keep their lengths, their order is a uniform
// permutation and the free characters are split among the k+1 gaps
// uniformly over all compositions. Equivalently, each annotator's continuum
// is a uniformly random sequence of k distinct unit blocks and L-U
// interchangeable one-character gap cells.
//
// De_c is available in closed form (exact expectation under that model) or as
// a seeded Monte-Carlo estimate with a standard error. The joint score is
// 1 - sum_c Do_c / sum_c De_c; per-category scores are 1 - Do_c / De_c.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "argcrowd/argmodel.hpp"
#include "argcrowd/errors.hpp"
#include "argcrowd/random.hpp"
#include "argcrowd/score.hpp"

namespace argcrowd {

struct UnitizedAlphaOptions {
  enum class Mode : std::uint8_t { ClosedForm, Randomization };
  Mode mode = Mode::ClosedForm;
  std::size_t resamples = 10000;
  std::uint64_t seed = 0;
};

struct CategoryDisagreement {
  double observed = 0;
  double expected = 0;
  /// Standard error of `expected`; zero in closed form.
  double expected_se = 0;
  std::size_t units = 0;  // over all annotators
  bool requested = false;
  Score alpha = Score::undefined("category not requested");
};

struct UnitizedAlpha {
  Score joint;
  std::array<CategoryDisagreement, kNumComponentLabels> categories;
  std::size_t annotators = 0;
  std::size_t length = 0;

  const Score& category(ComponentLabel label) const { return categories.at(index_of(label)).alpha; }
};

namespace unitized_detail {

struct Unit {
  std::size_t start = 0;
  std::size_t length = 0;
  std::size_t end() const noexcept { return start + length; }
};
using Units = std::vector<Unit>;

inline double sq(double x) noexcept { return x * x; }

/// Sum of section distances between the partitions of two annotators.
/// Both unit lists must be sorted and non-overlapping.
inline double observed_pair(const Units& a, const Units& b) {
  double d = 0;
  std::vector<char> b_hit(b.size(), 0);
  std::size_t lo = 0;
  for (const auto& g : a) {
    while (lo < b.size() && b[lo].end() <= g.start) ++lo;
    bool hit = false;
    for (std::size_t h = lo; h < b.size() && b[h].start < g.end(); ++h) {
      hit = true;
      b_hit[h] = 1;
      d += sq(static_cast<double>(g.start) - static_cast<double>(b[h].start)) +
           sq(static_cast<double>(g.end()) - static_cast<double>(b[h].end()));
    }
    if (!hit) d += sq(static_cast<double>(g.length));
  }
  for (std::size_t h = 0; h < b.size(); ++h) {
    if (!b_hit[h]) d += sq(static_cast<double>(b[h].length));
  }
  return d;
}

class LogFactorials {
 public:
  explicit LogFactorials(std::size_t n) : table_(n + 1, 0.0) {
    for (std::size_t i = 2; i <= n; ++i) table_[i] = table_[i - 1] + std::log(static_cast<double>(i));
  }
  double operator()(std::size_t n) const { return table_.at(n); }
  /// log of (r + a)! / a!: orderings of r distinct blocks among a identical cells.
  double arrangements(std::size_t r, std::size_t a) const { return table_.at(r + a) - table_.at(a); }

 private:
  std::vector<double> table_;
};

/// Exact positional statistics of one annotator's units under random relocation.
class ArrangementModel {
 public:
  ArrangementModel(const Units& units, std::size_t length, const LogFactorials& lf)
      : length_(length), lf_(&lf) {
    for (const auto& u : units) {
      lengths_.push_back(u.length);
      total_ += u.length;
    }
    if (total_ > length_) throw OverlapError("units exceed the continuum");
    gap_ = length_ - total_;
    log_total_ = lf.arrangements(lengths_.size(), gap_);
    full_ = subset_sums(lengths_.size());
    if (!lengths_.empty()) start_weights_ = weights(lengths_.size() - 1, 0);
    // Units of equal length share one start distribution.
    std::map<std::size_t, std::vector<double>> by_length;
    starts_.reserve(lengths_.size());
    for (std::size_t u = 0; u < lengths_.size(); ++u) {
      auto it = by_length.find(lengths_[u]);
      if (it == by_length.end()) it = by_length.emplace(lengths_[u], start_distribution(u)).first;
      starts_.push_back(it->second);
    }
  }

  std::size_t units() const noexcept { return lengths_.size(); }
  std::size_t unit_length(std::size_t u) const { return lengths_[u]; }
  /// P(unit u starts at x), x in [0, L - len(u)].
  const std::vector<double>& starts(std::size_t u) const { return starts_[u]; }

  /// P([x, x + window) contains no unit character), x in [0, L - window].
  const std::vector<double>& free_probability(std::size_t window) {
    auto it = free_cache_.find(window);
    if (it != free_cache_.end()) return it->second;
    std::vector<double> f(length_ - window + 1, 0.0);
    if (window <= gap_) {
      const auto w = weights(lengths_.size(), window);
      for (const auto& e : full_) {
        const double c = std::exp(e.log_count + w.log_scale[e.r]);
        const auto& row = w.rows[e.r];
        for (std::size_t a = 0; a < row.size(); ++a) f[e.sum + a] += c * row[a];
      }
    }
    return free_cache_.emplace(window, std::move(f)).first->second;
  }

 private:
  struct Entry {
    std::size_t r;    // subset size
    std::size_t sum;  // total length of the subset
    double log_count;
  };

  /// rows[r][a] * exp(log_scale[r]) is the probability that r given blocks
  /// and a gap cells precede a free window of `window` cells, the remaining
  /// `rest - r` blocks following it. Rows are scaled to a maximum of 1.
  struct Weights {
    std::vector<double> log_scale;
    std::vector<std::vector<double>> rows;
  };

  Weights weights(std::size_t rest, std::size_t window) const {
    Weights w;
    const std::size_t n = gap_ - window + 1;
    w.log_scale.resize(rest + 1);
    w.rows.assign(rest + 1, std::vector<double>(n));
    for (std::size_t r = 0; r <= rest; ++r) {
      auto& row = w.rows[r];
      double top = -INFINITY;
      for (std::size_t a = 0; a < n; ++a) {
        row[a] = lf_->arrangements(r, a) + lf_->arrangements(rest - r, gap_ - a - window) - log_total_;
        top = std::max(top, row[a]);
      }
      for (auto& v : row) v = std::exp(v - top);
      w.log_scale[r] = top;
    }
    return w;
  }

  /// Subsets of the units, excluding `skip` (pass units() to exclude none),
  /// grouped by (size, total length).
  std::vector<Entry> subset_sums(std::size_t skip) const {
    const std::size_t k = lengths_.size();
    std::vector<std::vector<double>> count(k + 1, std::vector<double>(total_ + 1, 0.0));
    count[0][0] = 1.0;
    std::size_t used = 0;
    std::size_t reach = 0;
    for (std::size_t i = 0; i < k; ++i) {
      if (i == skip) continue;
      const auto l = lengths_[i];
      for (std::size_t r = used + 1; r-- > 0;) {
        for (std::size_t s = reach + 1; s-- > 0;) {
          if (count[r][s] != 0.0) count[r + 1][s + l] += count[r][s];
        }
      }
      ++used;
      reach += l;
    }
    std::vector<Entry> out;
    for (std::size_t r = 0; r <= used; ++r) {
      for (std::size_t s = 0; s <= reach; ++s) {
        if (count[r][s] != 0.0) out.push_back({r, s, std::log(count[r][s])});
      }
    }
    return out;
  }

  std::vector<double> start_distribution(std::size_t u) const {
    const auto l = lengths_[u];
    std::vector<double> p(length_ - l + 1, 0.0);
    for (const auto& e : subset_sums(u)) {
      const double c = std::exp(e.log_count + start_weights_.log_scale[e.r]);
      const auto& row = start_weights_.rows[e.r];
      for (std::size_t a = 0; a < row.size(); ++a) p[e.sum + a] += c * row[a];
    }
    return p;
  }

  std::size_t length_;
  const LogFactorials* lf_;
  std::vector<std::size_t> lengths_;
  std::size_t total_ = 0;
  std::size_t gap_ = 0;
  double log_total_ = 0;
  std::vector<Entry> full_;
  Weights start_weights_;
  std::vector<std::vector<double>> starts_;
  std::map<std::size_t, std::vector<double>> free_cache_;
};

/// E[(b_u - b_v)^2 + (e_u - e_v)^2 ; u and v intersect] for independent starts.
inline double expected_overlap(const std::vector<double>& pu, std::size_t lu,
                               const std::vector<double>& pv, std::size_t lv) {
  // Prefix sums of P(y), y P(y), y^2 P(y).
  const std::size_t n = pv.size();
  std::vector<double> s0(n + 1, 0.0), s1(n + 1, 0.0), s2(n + 1, 0.0);
  for (std::size_t y = 0; y < n; ++y) {
    const double yy = static_cast<double>(y);
    s0[y + 1] = s0[y] + pv[y];
    s1[y + 1] = s1[y] + yy * pv[y];
    s2[y + 1] = s2[y] + yy * yy * pv[y];
  }
  double total = 0;
  for (std::size_t x = 0; x < pu.size(); ++x) {
    if (pu[x] == 0.0) continue;
    // v intersects u iff x - lv < y < x + lu.
    const std::size_t y_lo = x + 1 > lv ? x + 1 - lv : 0;
    const std::size_t y_hi = std::min(n, x + lu);  // exclusive
    if (y_lo >= y_hi) continue;
    const double a0 = s0[y_hi] - s0[y_lo];
    const double a1 = s1[y_hi] - s1[y_lo];
    const double a2 = s2[y_hi] - s2[y_lo];
    const double xx = static_cast<double>(x);
    const double c = xx + static_cast<double>(lu) - static_cast<double>(lv);
    // (x - y)^2 + (c - y)^2 summed against P(y).
    total += pu[x] * ((xx * xx + c * c) * a0 - 2.0 * (xx + c) * a1 + 2.0 * a2);
  }
  return total;
}

/// E[observed_pair(a, b)] with both annotators relocated independently.
inline double expected_pair(ArrangementModel& a, ArrangementModel& b) {
  double e = 0;
  for (std::size_t u = 0; u < a.units(); ++u) {
    for (std::size_t v = 0; v < b.units(); ++v) {
      e += expected_overlap(a.starts(u), a.unit_length(u), b.starts(v), b.unit_length(v));
    }
  }
  auto contained = [](ArrangementModel& unit_side, ArrangementModel& gap_side) {
    double s = 0;
    for (std::size_t u = 0; u < unit_side.units(); ++u) {
      const auto l = unit_side.unit_length(u);
      const auto& p = unit_side.starts(u);
      const auto& f = gap_side.free_probability(l);
      double hit = 0;
      for (std::size_t x = 0; x < p.size(); ++x) hit += p[x] * f[x];
      s += sq(static_cast<double>(l)) * hit;
    }
    return s;
  };
  return e + contained(a, b) + contained(b, a);
}

/// A uniformly random relocation of `units` on [0, length).
inline Units arrange(const Units& units, std::size_t length, rnd::Engine& rng) {
  std::size_t total = 0;
  for (const auto& u : units) total += u.length;
  const std::size_t k = units.size();
  const std::size_t gap = length - total;
  std::vector<std::size_t> order(k);
  for (std::size_t i = 0; i < k; ++i) order[i] = units[i].length;
  rnd::shuffle(rng, order);

  Units out;
  out.reserve(k);
  std::size_t pos = 0;
  std::size_t need = k;
  std::size_t next = 0;
  for (std::size_t slot = 0, slots = k + gap; slot < slots; ++slot) {
    if (need > 0 && rnd::index(rng, slots - slot) < need) {
      out.push_back({pos, order[next]});
      pos += order[next++];
      --need;
    } else {
      pos += 1;
    }
  }
  return out;
}

inline std::vector<Units> category_units(std::span<const std::vector<LabeledSpan>> annotators,
                                         CharSpan continuum, ComponentLabel category) {
  std::vector<Units> out(annotators.size());
  for (std::size_t a = 0; a < annotators.size(); ++a) {
    for (const auto& s : annotators[a]) {
      if (s.label != category) continue;
      const auto lo = std::max(s.span.start, continuum.start);
      const auto hi = std::min(s.span.end, continuum.end);
      if (lo < hi) out[a].push_back({lo - continuum.start, hi - lo});
    }
    std::sort(out[a].begin(), out[a].end(),
              [](const Unit& x, const Unit& y) { return x.start < y.start; });
  }
  return out;
}

inline void check_no_overlap(std::span<const std::vector<LabeledSpan>> annotators) {
  for (std::size_t a = 0; a < annotators.size(); ++a) {
    std::vector<CharSpan> spans;
    for (const auto& s : annotators[a]) spans.push_back(s.span);
    std::sort(spans.begin(), spans.end());
    for (std::size_t i = 1; i < spans.size(); ++i) {
      if (spans[i].start < spans[i - 1].end) {
        throw OverlapError("annotator " + std::to_string(a) + " has overlapping units");
      }
    }
  }
}

}  // namespace unitized_detail

/// Unitized alpha over `continuum` for the given categories. Spans are clipped
/// to the continuum; NA stretches are gaps.
inline UnitizedAlpha alpha_u(std::span<const std::vector<LabeledSpan>> annotators,
                             CharSpan continuum,
                             std::span<const ComponentLabel> categories = kComponentLabels,
                             const UnitizedAlphaOptions& opts = {}) {
  using namespace unitized_detail;
  const std::size_t m = annotators.size();
  if (m < 2) throw DegenerateInput("unitized alpha needs at least two annotators");
  check_no_overlap(annotators);

  UnitizedAlpha result;
  result.annotators = m;
  result.length = continuum.length();
  const std::size_t L = result.length;

  std::vector<std::size_t> active;
  std::vector<std::vector<Units>> units_by_cat(kNumComponentLabels);
  std::size_t total_units = 0;
  for (auto label : categories) {
    if (label == ComponentLabel::NA) throw Error("NA is a gap, not a unitized category");
    const auto c = index_of(label);
    auto& cd = result.categories[c];
    if (cd.requested) continue;
    cd.requested = true;
    units_by_cat[c] = category_units(annotators, continuum, label);
    for (const auto& u : units_by_cat[c]) cd.units += u.size();
    total_units += cd.units;
    if (cd.units == 0) {
      cd.alpha = Score::undefined("no unit of category " + std::string(to_string(label)));
    } else {
      active.push_back(c);
    }
  }
  if (L == 0) {
    result.joint = Score::undefined("empty continuum");
    for (auto c : active) result.categories[c].alpha = Score::undefined("empty continuum");
    return result;
  }
  if (total_units == 0) {
    result.joint = Score::undefined("no categorized unit by any annotator");
    return result;
  }

  const double norm = static_cast<double>(m) * static_cast<double>(m - 1) * sq(static_cast<double>(L));

  for (auto c : active) {
    const auto& units = units_by_cat[c];
    double d = 0;
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = i + 1; j < m; ++j) d += 2.0 * observed_pair(units[i], units[j]);
    }
    result.categories[c].observed = d / norm;
  }

  if (opts.mode == UnitizedAlphaOptions::Mode::ClosedForm) {
    std::size_t max_units = 0;
    for (auto c : active) {
      for (const auto& u : units_by_cat[c]) max_units = std::max(max_units, u.size());
    }
    const LogFactorials lf(L + max_units + 1);
    for (auto c : active) {
      std::vector<ArrangementModel> models;
      models.reserve(m);
      for (const auto& u : units_by_cat[c]) models.emplace_back(u, L, lf);
      double e = 0;
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) e += 2.0 * expected_pair(models[i], models[j]);
      }
      result.categories[c].expected = e / norm;
    }
  } else {
    if (opts.resamples < 2) throw Error("randomization needs at least two resamples");
    rnd::Engine rng(opts.seed);
    std::array<double, kNumComponentLabels> sum{}, sum_sq{};
    std::vector<Units> placed(m);
    for (std::size_t r = 0; r < opts.resamples; ++r) {
      for (auto c : active) {
        for (std::size_t a = 0; a < m; ++a) placed[a] = arrange(units_by_cat[c][a], L, rng);
        double d = 0;
        for (std::size_t i = 0; i < m; ++i) {
          for (std::size_t j = i + 1; j < m; ++j) d += 2.0 * observed_pair(placed[i], placed[j]);
        }
        d /= norm;
        sum[c] += d;
        sum_sq[c] += d * d;
      }
    }
    const double n = static_cast<double>(opts.resamples);
    for (auto c : active) {
      const double mean = sum[c] / n;
      const double var = std::max(0.0, (sum_sq[c] - n * mean * mean) / (n - 1));
      result.categories[c].expected = mean;
      result.categories[c].expected_se = std::sqrt(var / n);
    }
  }

  double do_sum = 0, de_sum = 0;
  for (auto c : active) {
    auto& cd = result.categories[c];
    do_sum += cd.observed;
    de_sum += cd.expected;
    cd.alpha = cd.expected > 0 ? Score::of(1.0 - cd.observed / cd.expected)
                               : Score::undefined("expected disagreement is 0");
  }
  result.joint = de_sum > 0 ? Score::of(1.0 - do_sum / de_sum)
                            : Score::undefined("expected disagreement is 0");
  return result;
}

/// Unitized alpha of complete annotation sets.
inline UnitizedAlpha alpha_u(std::span<const AnnotationSet> sets, CharSpan continuum,
                             const UnitizedAlphaOptions& opts = {}) {
  std::vector<std::vector<LabeledSpan>> spans;
  spans.reserve(sets.size());
  for (const auto& s : sets) spans.push_back(labeled_spans(s));
  return alpha_u(std::span<const std::vector<LabeledSpan>>(spans), continuum, kComponentLabels,
                 opts);
}

}  // namespace argcrowd

#endif  // ARGCROWD_UNITIZED_ALPHA_HPP
