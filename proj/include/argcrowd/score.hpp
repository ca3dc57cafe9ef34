#ifndef ARGCROWD_SCORE_HPP
#define ARGCROWD_SCORE_HPP

#include <cmath>
#include <limits>
#include <string>

#include "json.hpp"

namespace argcrowd {

/// An agreement score, or an explicit reason why it is undefined.
class Score {
 public:
  Score() : reason_("not computed") {}

  static Score of(double v) {
    Score s;
    s.value_ = v;
    s.reason_.clear();
    return s;
  }
  static Score undefined(std::string reason) {
    Score s;
    s.reason_ = std::move(reason);
    return s;
  }

  bool defined() const noexcept { return reason_.empty(); }
  explicit operator bool() const noexcept { return defined(); }
  double value() const noexcept { return value_; }
  double value_or(double fallback) const noexcept { return defined() ? value_ : fallback; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  double value_ = std::numeric_limits<double>::quiet_NaN();
  std::string reason_;
};

/// A defined score serializes as a number; an undefined one as
/// {"undefined": "<reason>"}.
inline void to_json(nlohmann::json& j, const Score& s) {
  if (s.defined()) {
    j = s.value();
  } else {
    j = nlohmann::json{{"undefined", s.reason()}};
  }
}

inline void from_json(const nlohmann::json& j, Score& s) {
  if (j.is_number()) {
    s = Score::of(j.get<double>());
  } else {
    s = Score::undefined(j.at("undefined").get<std::string>());
  }
}

}  // namespace argcrowd

#endif  // ARGCROWD_SCORE_HPP
