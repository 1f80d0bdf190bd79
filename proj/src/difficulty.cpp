#include "svcal/difficulty.hpp"

#include <cmath>
#include <map>

#include "svcal/error.hpp"
#include "svcal/metrics.hpp"
#include "svcal/numeric.hpp"

namespace svcal {

namespace {

void require_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    fail(ErrorCode::InvalidProbability, std::string(what) + " = " + format_double(p) + " is not a probability");
  }
}

}  // namespace

double pvi(double p_cond, double p_null) {
  require_probability(p_cond, "p_cond");
  require_probability(p_null, "p_null");
  return std::log2(clamp_prob(p_cond)) - std::log2(clamp_prob(p_null));
}

PviRecord make_pvi_record(std::string case_id, int article, double p_cond, double p_null) {
  const double score = pvi(p_cond, p_null);
  return {std::move(case_id), article, p_cond, p_null, score};
}

std::vector<PviRecord> pvi_records(const std::vector<PredictionRecord>& conditional,
                                   const std::vector<PredictionRecord>& null_input) {
  std::map<PairKey, const PredictionRecord*> null_by_key;
  for (const auto& r : null_input) null_by_key.emplace(r.key(), &r);
  if (null_by_key.size() != conditional.size()) {
    fail(ErrorCode::MisalignedKeys, std::to_string(conditional.size()) + " conditional predictions but " +
                                        std::to_string(null_by_key.size()) + " null-input predictions");
  }

  std::vector<PviRecord> out;
  out.reserve(conditional.size());
  for (const auto& r : conditional) {
    auto it = null_by_key.find(r.key());
    if (it == null_by_key.end()) fail(ErrorCode::MisalignedKeys, "no null-input prediction for " + r.key().str());
    const auto gold = static_cast<std::size_t>(r.gold);
    out.push_back(make_pvi_record(r.case_id, r.article, probabilities(r)[gold], probabilities(*it->second)[gold]));
  }
  return out;
}

PviGroupReport dataset_pvi(const std::vector<PviRecord>& records,
                           const std::function<bool(const PviRecord&)>& in_first, std::string first_label,
                           std::string second_label, TTestVariant variant) {
  std::vector<double> first;
  std::vector<double> second;
  for (const auto& r : records) (in_first(r) ? first : second).push_back(r.pvi);
  if (first.size() < 2 || second.size() < 2) {
    fail(ErrorCode::DegenerateGroup, "PVI groups '" + first_label + "' (" + std::to_string(first.size()) +
                                         ") and '" + second_label + "' (" + std::to_string(second.size()) +
                                         ") need at least 2 pairs each");
  }

  PviGroupReport report;
  report.test = t_test(first, second, variant);
  report.first = {std::move(first_label), first.size(), report.test.mean_0};
  report.second = {std::move(second_label), second.size(), report.test.mean_1};
  return report;
}

CorrResult pvi_entropy_correlation(const std::vector<PviRecord>& records, const std::vector<KeyedValue>& entropies) {
  if (records.size() != entropies.size()) {
    fail(ErrorCode::MisalignedKeys, std::to_string(records.size()) + " PVI records but " +
                                        std::to_string(entropies.size()) + " entropies");
  }
  std::vector<double> x;
  std::vector<double> y;
  x.reserve(records.size());
  y.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].key() != entropies[i].key) {
      fail(ErrorCode::MisalignedKeys, "row " + std::to_string(i) + ": " + records[i].key().str() + " vs " +
                                          entropies[i].key.str());
    }
    x.push_back(records[i].pvi);
    y.push_back(entropies[i].value);
  }
  return pearson(x, y);
}

}  // namespace svcal
