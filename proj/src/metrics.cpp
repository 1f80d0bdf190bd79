#include "svcal/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "svcal/calibration.hpp"
#include "svcal/error.hpp"

namespace svcal {

namespace {

void require_bins(int m) {
  if (m < 1) fail(ErrorCode::InvalidArgument, "bin count must be at least 1, got " + std::to_string(m));
}

std::size_t unit_bin(double v, int m) {
  const double scaled = std::floor(std::clamp(v, 0.0, 1.0) * m);
  return std::min(static_cast<std::size_t>(scaled), static_cast<std::size_t>(m - 1));
}

const SoftLabel& human_of(const PredictionRecord& r) {
  if (!r.human) fail(ErrorCode::MissingHumanLabel, "no judge vote distribution for " + r.key().str());
  return *r.human;
}

}  // namespace

std::string_view to_string(Split split) {
  switch (split) {
    case Split::Train: return "train";
    case Split::Dev: return "dev";
    case Split::Test: return "test";
  }
  return "";
}

Split parse_split(std::string_view name) {
  if (name == "train") return Split::Train;
  if (name == "dev" || name == "validation") return Split::Dev;
  if (name == "test") return Split::Test;
  fail(ErrorCode::InvalidArgument, "unknown split '" + std::string(name) + "'");
}

Probs2 probabilities(const PredictionRecord& r) { return apply_temperature(r.logits, r.temperature); }

ConfidencePoint confidence_point(const PredictionRecord& r) {
  const int pred = predicted_class(r);
  return {probabilities(r)[static_cast<std::size_t>(pred)], pred == r.gold};
}

EceReport ece(const std::vector<PredictionRecord>& records, int m) {
  std::vector<ConfidencePoint> points;
  points.reserve(records.size());
  for (const auto& r : records) points.push_back(confidence_point(r));
  return ece(points, m);
}

EceReport ece(std::span<const ConfidencePoint> points, int m) {
  require_bins(m);
  if (points.empty()) fail(ErrorCode::EmptyInput, "ECE needs at least one prediction");

  EceReport report;
  report.n = points.size();
  report.m = m;
  report.bins.resize(static_cast<std::size_t>(m));
  std::vector<double> conf_sum(report.bins.size(), 0.0);
  std::vector<std::size_t> correct(report.bins.size(), 0);

  for (const auto& p : points) {
    const double c = std::clamp(p.confidence, 0.0, 1.0);
    const double raised = std::ceil(c * m) - 1.0;
    const auto k = static_cast<std::size_t>(std::clamp(raised, 0.0, static_cast<double>(m - 1)));
    report.bins[k].count += 1;
    conf_sum[k] += c;
    correct[k] += p.correct ? 1 : 0;
  }
  for (std::size_t k = 0; k < report.bins.size(); ++k) {
    EceBin& b = report.bins[k];
    b.lower = static_cast<double>(k) / m;
    b.upper = static_cast<double>(k + 1) / m;
    if (b.count > 0) {
      b.mean_confidence = conf_sum[k] / static_cast<double>(b.count);
      b.accuracy = static_cast<double>(correct[k]) / static_cast<double>(b.count);
    }
  }
  report.ece = ece_from_bins(report.bins, report.n);
  return report;
}

double ece_from_bins(const std::vector<EceBin>& bins, std::size_t n) {
  double total = 0.0;
  for (const auto& b : bins) {
    if (b.count == 0) continue;
    total += static_cast<double>(b.count) / static_cast<double>(n) * std::abs(b.accuracy - b.mean_confidence);
  }
  return total;
}

double dist_ce(const SoftLabel& q, const Probs2& p) {
  return 0.5 * (std::abs(q.probs[0] - p[0]) + std::abs(q.probs[1] - p[1]));
}

double mean_dist_ce(const std::vector<PredictionRecord>& records) {
  if (records.empty()) fail(ErrorCode::EmptyInput, "DistCE needs at least one prediction");
  double total = 0.0;
  for (const auto& r : records) total += dist_ce(human_of(r), probabilities(r));
  return total / static_cast<double>(records.size());
}

double f1_score(const ConfusionCounts& c) {
  const auto denom = 2 * c.tp + c.fp + c.fn;
  return denom == 0 ? 0.0 : 2.0 * static_cast<double>(c.tp) / static_cast<double>(denom);
}

F1Report f1_suite(const std::vector<PredictionRecord>& records) {
  F1Report report;
  ConfusionCounts pooled;

  auto tally = [](ConfusionCounts& c, int gold, int pred) {
    if (gold == 1 && pred == 1) ++c.tp;
    else if (gold == 0 && pred == 1) ++c.fp;
    else if (gold == 1 && pred == 0) ++c.fn;
  };

  for (const auto& r : records) {
    const int pred = predicted_class(r);
    ArticleScores& a = report.per_article[r.article];
    tally(a.all, r.gold, pred);
    if (r.alleged) tally(a.alleged, r.gold, pred);
    tally(pooled, r.gold, pred);
  }

  double macro_sum = 0.0;
  double hard_sum = 0.0;
  std::size_t macro_n = 0;
  std::size_t hard_n = 0;
  for (auto& [article, a] : report.per_article) {
    a.degenerate = a.all.tp + a.all.fp + a.all.fn == 0;
    a.hard_degenerate = a.alleged.tp + a.alleged.fp + a.alleged.fn == 0;
    a.f1 = f1_score(a.all);
    a.hard_f1 = f1_score(a.alleged);
    if (!a.degenerate) {
      macro_sum += a.f1;
      ++macro_n;
    }
    if (!a.hard_degenerate) {
      hard_sum += a.hard_f1;
      ++hard_n;
    }
  }
  report.micro_f1 = f1_score(pooled);
  report.macro_f1 = macro_n ? macro_sum / static_cast<double>(macro_n) : 0.0;
  report.hard_macro_f1 = hard_n ? hard_sum / static_cast<double>(hard_n) : 0.0;
  return report;
}

ProbabilityHistograms confidence_histogram(const std::vector<PredictionRecord>& records, int m) {
  require_bins(m);
  ProbabilityHistograms h;
  const auto bins = static_cast<std::size_t>(m);
  h.edges.resize(bins + 1);
  for (std::size_t k = 0; k <= bins; ++k) h.edges[k] = static_cast<double>(k) / m;
  h.model_p1.assign(bins, 0);
  h.human_q1.assign(bins, 0);
  h.dist_ce.assign(bins, 0);
  for (const auto& r : records) {
    const SoftLabel& q = human_of(r);
    const Probs2 p = probabilities(r);
    h.model_p1[unit_bin(p[1], m)] += 1;
    h.human_q1[unit_bin(q.probs[1], m)] += 1;
    h.dist_ce[unit_bin(dist_ce(q, p), m)] += 1;
  }
  return h;
}

}  // namespace svcal
