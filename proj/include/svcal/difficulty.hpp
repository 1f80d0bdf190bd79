#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "svcal/pair_key.hpp"
#include "svcal/stats.hpp"

namespace svcal {

struct PredictionRecord;

// Higher PVI means the input made the gold label easier to predict.
inline constexpr std::string_view kPviConvention = "pvi = log2 p_cond(gold) - log2 p_null(gold); higher is easier";

struct PviRecord {
  std::string case_id;
  int article = 0;
  double p_cond = 1.0;  // gold-class probability given the input
  double p_null = 1.0;  // gold-class probability from the null-input model
  double pvi = 0.0;     // bits

  PairKey key() const { return {case_id, article}; }
};

/// log2(p_cond) - log2(p_null) in bits, probabilities clamped at 1e-12.
/// Throws InvalidProbability outside [0, 1].
double pvi(double p_cond, double p_null);

PviRecord make_pvi_record(std::string case_id, int article, double p_cond, double p_null);

/// Pairs conditional and null predictions by key and scores the gold class of
/// the conditional record. Throws MisalignedKeys when a key has no partner.
std::vector<PviRecord> pvi_records(const std::vector<PredictionRecord>& conditional,
                                   const std::vector<PredictionRecord>& null_input);

struct PviGroup {
  std::string label;
  std::size_t count = 0;
  double mean_pvi = 0.0;
};

struct PviGroupReport {
  PviGroup first;
  PviGroup second;
  TTestResult test;  // mean_0 = first, mean_1 = second
  std::string convention{kPviConvention};
};

/// Mean PVI per group and an independent t-test between them. Records for
/// which `in_first` holds form the first group. Throws DegenerateGroup when a
/// group has fewer than 2 members.
PviGroupReport dataset_pvi(const std::vector<PviRecord>& records,
                           const std::function<bool(const PviRecord&)>& in_first,
                           std::string first_label = "unanimous", std::string second_label = "split_vote",
                           TTestVariant variant = TTestVariant::Welch);

struct KeyedValue {
  PairKey key;
  double value = 0.0;
};

/// Pearson correlation between PVI and vote entropy; `entropies` must list the
/// same keys in the same order as `records`.
CorrResult pvi_entropy_correlation(const std::vector<PviRecord>& records, const std::vector<KeyedValue>& entropies);

}  // namespace svcal
