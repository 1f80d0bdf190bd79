#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "svcal/numeric.hpp"

namespace svcal {

// Judge vote counts for one case-article pair, ordered [violation, non-violation].
class VoteDistribution {
 public:
  VoteDistribution(int violation, int noviolation);

  int violation() const { return counts_[0]; }
  int noviolation() const { return counts_[1]; }
  const std::array<int, 2>& counts() const { return counts_; }
  int total() const { return counts_[0] + counts_[1]; }

 private:
  std::array<int, 2> counts_;
};

// Normalised vote shares. The order is whatever the producer states: soft_label()
// keeps the VoteDistribution order, while PredictionRecord::human is indexed by
// predicted class (1 = violation).
struct SoftLabel {
  Probs2 probs{};

  static SoftLabel checked(const Probs2& probs);  // throws InvalidProbability
  bool operator==(const SoftLabel&) const = default;
};

inline constexpr double kSoftLabelTolerance = 1e-12;

/// Shannon entropy in nats, with 0 log 0 = 0. Lies in [0, ln 2].
double entropy(const VoteDistribution& d);
double entropy(const Probs2& p);

SoftLabel soft_label(const VoteDistribution& d);

// The same shares re-indexed by predicted class: (non-violation, violation).
SoftLabel class_ordered_label(const VoteDistribution& d);

bool is_single_dissent(const VoteDistribution& d);

struct HistogramBin {
  double lower = 0.0;
  double upper = 0.0;
  std::size_t count = 0;
};

inline constexpr double kDefaultEntropyBinWidth = 0.05;

/// Equal-width bins tiling [0, ln 2]; the last bin is closed on the right.
std::vector<HistogramBin> entropy_histogram(const std::vector<VoteDistribution>& dists,
                                            double bin_width = kDefaultEntropyBinWidth);

}  // namespace svcal
