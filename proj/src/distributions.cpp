#include "svcal/distributions.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "svcal/error.hpp"

namespace svcal {

namespace {

double plogp(double p) { return p > 0.0 ? p * std::log(p) : 0.0; }

}  // namespace

VoteDistribution::VoteDistribution(int violation, int noviolation) : counts_{violation, noviolation} {
  if (violation < 0 || noviolation < 0 || violation + noviolation < 1) {
    fail(ErrorCode::InvalidArgument, "vote counts [" + std::to_string(violation) + ", " +
                                         std::to_string(noviolation) + "] do not form a distribution");
  }
}

SoftLabel SoftLabel::checked(const Probs2& probs) {
  for (double p : probs) {
    if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
      fail(ErrorCode::InvalidProbability, "soft label component " + format_double(p) + " outside [0, 1]");
    }
  }
  if (std::abs(probs[0] + probs[1] - 1.0) > kSoftLabelTolerance) {
    fail(ErrorCode::InvalidProbability,
         "soft label sums to " + format_double(probs[0] + probs[1]) + ", expected 1");
  }
  return SoftLabel{probs};
}

double entropy(const Probs2& p) {
  // Summing the smaller term first makes entropy exactly symmetric.
  const double lo = std::min(p[0], p[1]);
  const double hi = std::max(p[0], p[1]);
  const double h = -(plogp(lo) + plogp(hi));
  return h > 0.0 ? h : 0.0;
}

double entropy(const VoteDistribution& d) { return entropy(soft_label(d).probs); }

SoftLabel soft_label(const VoteDistribution& d) {
  const auto total = static_cast<double>(d.total());
  return SoftLabel{{d.violation() / total, d.noviolation() / total}};
}

SoftLabel class_ordered_label(const VoteDistribution& d) {
  const auto total = static_cast<double>(d.total());
  return SoftLabel{{d.noviolation() / total, d.violation() / total}};
}

bool is_single_dissent(const VoteDistribution& d) { return std::min(d.violation(), d.noviolation()) == 1; }

std::vector<HistogramBin> entropy_histogram(const std::vector<VoteDistribution>& dists, double bin_width) {
  if (!(bin_width > 0.0) || !std::isfinite(bin_width)) {
    fail(ErrorCode::InvalidArgument, "entropy bin width must be positive");
  }
  const double top = std::numbers::ln2;
  const auto n_bins = static_cast<std::size_t>(std::ceil(top / bin_width));
  std::vector<HistogramBin> bins(n_bins);
  for (std::size_t i = 0; i < n_bins; ++i) {
    bins[i].lower = static_cast<double>(i) * bin_width;
    bins[i].upper = std::min(static_cast<double>(i + 1) * bin_width, top);
  }
  for (const auto& d : dists) {
    auto idx = static_cast<std::size_t>(std::floor(entropy(d) / bin_width));
    bins[std::min(idx, n_bins - 1)].count += 1;
  }
  return bins;
}

}  // namespace svcal
