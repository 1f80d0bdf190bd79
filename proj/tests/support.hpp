#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "svcal/metrics.hpp"

namespace svcal::testing {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo = 0.0, double hi = 1.0) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int uniform_int(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

// A point on the 2-simplex, computed without touching library code.
inline Probs2 random_simplex(Rng& rng) {
  const double a = uniform(rng);
  return {a, 1.0 - a};
}

// Record whose class-1 logit is `z` (class-0 logit fixed at 0).
inline PredictionRecord record(std::string case_id, int article, double z, int gold, bool alleged = true) {
  PredictionRecord r;
  r.case_id = std::move(case_id);
  r.article = article;
  r.logits = {0.0, z};
  r.gold = gold;
  r.alleged = alleged;
  return r;
}

// Record predicting `pred` (0/1) with a fixed margin.
inline PredictionRecord hard_record(std::string case_id, int article, int gold, int pred, bool alleged = true) {
  return record(std::move(case_id), article, pred == 1 ? 2.0 : -2.0, gold, alleged);
}

inline double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace svcal::testing
