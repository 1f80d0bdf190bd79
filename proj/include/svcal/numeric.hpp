#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <string>

namespace svcal {

// Binary outcome; index 1 is "violation" everywhere outside VoteDistribution.
using Probs2 = std::array<double, 2>;
using Logits2 = std::array<double, 2>;

inline constexpr double kProbClamp = 1e-12;

inline double clamp_prob(double p) { return p < kProbClamp ? kProbClamp : (p > 1.0 ? 1.0 : p); }

inline double safe_log(double p) { return std::log(clamp_prob(p)); }

// Ties go to class 0 (non-violation).
inline int argmax(const std::array<double, 2>& v) { return v[1] > v[0] ? 1 : 0; }

// Shortest representation that parses back to the same double.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace svcal
