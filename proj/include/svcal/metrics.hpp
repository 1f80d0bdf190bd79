#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "svcal/distributions.hpp"
#include "svcal/numeric.hpp"
#include "svcal/pair_key.hpp"

namespace svcal {

enum class Split { Train, Dev, Test };

std::string_view to_string(Split split);
Split parse_split(std::string_view name);

// One case-article pair as scored by a classifier. Class 1 is "violation".
struct PredictionRecord {
  std::string case_id;
  int article = 0;
  Logits2 logits{};
  int gold = 0;
  bool alleged = true;
  std::optional<SoftLabel> human;  // judge vote shares, indexed by class
  Split split = Split::Test;
  double temperature = 1.0;  // set by `apply`; probabilities use logits / temperature

  PairKey key() const { return {case_id, article}; }
};

Probs2 probabilities(const PredictionRecord& r);

// Taken from the logits so the temperature can never move it.
inline int predicted_class(const PredictionRecord& r) { return argmax(r.logits); }

struct ConfidencePoint {
  double confidence = 0.0;
  bool correct = false;
};

ConfidencePoint confidence_point(const PredictionRecord& r);

struct EceBin {
  double lower = 0.0;
  double upper = 0.0;
  std::size_t count = 0;
  double mean_confidence = 0.0;
  double accuracy = 0.0;
};

struct EceReport {
  double ece = 0.0;
  std::vector<EceBin> bins;
  std::size_t n = 0;
  int m = 0;
};

inline constexpr int kDefaultEceBins = 10;

/// Expected calibration error over m equal-width bins on (0, 1].
/// Bin k holds confidences in (k/m, (k+1)/m]; a confidence of exactly 0 lands in bin 0.
EceReport ece(const std::vector<PredictionRecord>& records, int m = kDefaultEceBins);
EceReport ece(std::span<const ConfidencePoint> points, int m = kDefaultEceBins);

// Recomputes the scalar from emitted bins.
double ece_from_bins(const std::vector<EceBin>& bins, std::size_t n);

/// Total variation distance 1/2 * sum_c |q_c - p_c|.
double dist_ce(const SoftLabel& q, const Probs2& p);

/// Mean dist_ce; throws MissingHumanLabel naming the first record without votes.
double mean_dist_ce(const std::vector<PredictionRecord>& records);

struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
};

// 2tp / (2tp + fp + fn), or 0 when there are no positives at all.
double f1_score(const ConfusionCounts& c);

struct ArticleScores {
  ConfusionCounts all;      // every pair of the article
  ConfusionCounts alleged;  // alleged pairs only
  double f1 = 0.0;
  double hard_f1 = 0.0;
  bool degenerate = false;       // no gold or predicted positives among all pairs
  bool hard_degenerate = false;  // same, among alleged pairs
};

struct F1Report {
  double micro_f1 = 0.0;
  double macro_f1 = 0.0;
  double hard_macro_f1 = 0.0;
  std::map<int, ArticleScores> per_article;
};

/// Micro F1 pools every pair; macro averages per-article F1; hard-macro
/// averages per-article F1 computed on alleged pairs only. Degenerate articles
/// report F1 = 0 and are left out of the averages.
F1Report f1_suite(const std::vector<PredictionRecord>& records);

struct ProbabilityHistograms {
  std::vector<double> edges;  // m + 1 edges over [0, 1]
  std::vector<std::size_t> model_p1;
  std::vector<std::size_t> human_q1;
  std::vector<std::size_t> dist_ce;
};

/// Aligned histograms of model P(violation), human q(violation) and per-pair DistCE.
/// Bins are [k/m, (k+1)/m) with the last one closed.
ProbabilityHistograms confidence_histogram(const std::vector<PredictionRecord>& records, int m = kDefaultEceBins);

}  // namespace svcal
