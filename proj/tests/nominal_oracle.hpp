#ifndef ARGCROWD_TESTS_NOMINAL_ORACLE_HPP
#define ARGCROWD_TESTS_NOMINAL_ORACLE_HPP

#include <cstddef>
#include <vector>

#include "argcrowd/nominal_agreement.hpp"

namespace argcrowd::testing {

// Independent oracles: literal pair enumeration of the defining formulas.
struct Oracle {
  const LabelMatrix& m;

  std::vector<std::vector<std::size_t>> pairable_values() const {
    std::vector<std::vector<std::size_t>> out;
    for (std::size_t i = 0; i < m.items(); ++i) {
      std::vector<std::size_t> v;
      for (std::size_t a = 0; a < m.annotators(); ++a) {
        if (auto c = m.at(i, a)) v.push_back(*c);
      }
      if (v.size() >= 2) out.push_back(v);
    }
    return out;
  }

  double percentage() const {
    const auto items = pairable_values();
    double total = 0;
    for (const auto& v : items) {
      double agree = 0, pairs = 0;
      for (std::size_t x = 0; x < v.size(); ++x) {
        for (std::size_t y = x + 1; y < v.size(); ++y) {
          pairs += 1;
          agree += v[x] == v[y];
        }
      }
      total += agree / pairs;
    }
    return total / static_cast<double>(items.size());
  }

  double pi() const {
    const auto items = pairable_values();
    std::vector<double> counts(m.categories(), 0);
    double n = 0;
    for (const auto& v : items) {
      for (auto c : v) {
        counts[c] += 1;
        n += 1;
      }
    }
    double pe = 0;
    for (double c : counts) pe += (c / n) * (c / n);
    return (percentage() - pe) / (1 - pe);
  }

  double alpha() const {
    const auto items = pairable_values();
    std::vector<std::size_t> pooled;
    double observed = 0;
    for (const auto& v : items) {
      for (std::size_t x = 0; x < v.size(); ++x) {
        pooled.push_back(v[x]);
        for (std::size_t y = 0; y < v.size(); ++y) {
          if (x != y && v[x] != v[y]) observed += 1.0 / static_cast<double>(v.size() - 1);
        }
      }
    }
    const double n = static_cast<double>(pooled.size());
    double expected = 0;
    for (std::size_t x = 0; x < pooled.size(); ++x) {
      for (std::size_t y = 0; y < pooled.size(); ++y) {
        if (x != y && pooled[x] != pooled[y]) expected += 1;
      }
    }
    return 1.0 - (observed / n) / (expected / (n * (n - 1)));
  }
};

}  // namespace argcrowd::testing

#endif  // ARGCROWD_TESTS_NOMINAL_ORACLE_HPP
