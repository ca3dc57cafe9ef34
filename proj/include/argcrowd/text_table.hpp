#ifndef ARGCROWD_TEXT_TABLE_HPP
#define ARGCROWD_TEXT_TABLE_HPP

// Plain-text tables with pipe separators, sized to their widest cell.

#include <algorithm>
#include <cstdio>
#include <string>
#include <vector>

#include "argcrowd/score.hpp"
#include "argcrowd/utf8.hpp"

namespace argcrowd {

inline std::string fixed(double v, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

inline std::string fixed(const Score& s, int digits = 3) {
  return s.defined() ? fixed(s.value(), digits) : "n/a";
}

class TextTable {
 public:
  explicit TextTable(std::vector<std::string> header) : header_(std::move(header)) {}

  void add(std::vector<std::string> row) {
    row.resize(header_.size());
    rows_.push_back(std::move(row));
  }

  /// First column left-aligned, the rest right-aligned.
  std::string render() const {
    std::vector<std::size_t> width(header_.size(), 0);
    auto measure = [&](const std::vector<std::string>& row) {
      for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], display_width(row[c]));
    };
    measure(header_);
    for (const auto& r : rows_) measure(r);

    auto line = [&](const std::vector<std::string>& row) {
      std::string out = "|";
      for (std::size_t c = 0; c < row.size(); ++c) {
        const std::string pad(width[c] - display_width(row[c]), ' ');
        out += ' ';
        out += c == 0 ? row[c] + pad : pad + row[c];
        out += " |";
      }
      return out + '\n';
    };
    std::string rule = "|";
    for (auto w : width) rule += std::string(w + 2, '-') + "|";
    rule += '\n';

    std::string out = line(header_) + rule;
    for (const auto& r : rows_) out += line(r);
    return out;
  }

 private:
  static std::size_t display_width(const std::string& s) {
    return utf8::codepoint_offsets(s).size() - 1;
  }

  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace argcrowd

#endif  // ARGCROWD_TEXT_TABLE_HPP
