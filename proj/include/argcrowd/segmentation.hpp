#ifndef ARGCROWD_SEGMENTATION_HPP
#define ARGCROWD_SEGMENTATION_HPP

#include <string_view>
#include <vector>

#include "argcrowd/argmodel.hpp"
#include "argcrowd/utf8.hpp"

namespace argcrowd {

/// Sentence terminators: 。！？；… and ASCII ? ! ; plus newline.
constexpr bool is_sentence_terminator(char32_t c) noexcept {
  switch (c) {
    case U'。': case U'！': case U'？': case U'；': case U'…':
    case U'?': case U'!': case U';': case U'\n':
      return true;
    default:
      return false;
  }
}

namespace segmentation_detail {
constexpr bool is_filler(char32_t c) noexcept {
  return is_sentence_terminator(c) || c == U' ' || c == U'\t' || c == U'\r' || c == U'　';
}
}  // namespace segmentation_detail

/// Splits after each maximal run of terminators, so "！！" or "。\n" stay with
/// the sentence they close. A piece made only of terminators or whitespace
/// is merged into the following sentence (or the preceding one at the end of
/// the text). The result partitions [0, text.size()).
inline std::vector<CharSpan> segment_sentences(std::u32string_view text) {
  std::vector<CharSpan> raw;
  std::size_t start = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    if (is_sentence_terminator(text[i])) {
      while (i < text.size() && is_sentence_terminator(text[i])) ++i;
      raw.push_back({start, i});
      start = i;
    } else {
      ++i;
    }
  }
  if (start < text.size()) raw.push_back({start, text.size()});

  auto substantive = [&](CharSpan s) {
    for (auto k = s.start; k < s.end; ++k) {
      if (!segmentation_detail::is_filler(text[k])) return true;
    }
    return false;
  };

  std::vector<CharSpan> out;
  std::size_t pending_start = 0;
  bool pending = false;
  for (const auto& s : raw) {
    if (!substantive(s)) {
      if (!pending) pending_start = s.start;
      pending = true;
      continue;
    }
    out.push_back({pending ? pending_start : s.start, s.end});
    pending = false;
  }
  if (pending) {
    if (out.empty()) {
      out.push_back({pending_start, text.size()});
    } else {
      out.back().end = text.size();
    }
  }
  return out;
}

inline std::vector<CharSpan> segment_sentences_utf8(std::string_view text) {
  const auto cps = utf8::decode(text);
  return segment_sentences(cps);
}

}  // namespace argcrowd

#endif  // ARGCROWD_SEGMENTATION_HPP
