#pragma once

#include <cstddef>
#include <map>
#include <span>

#include "svcal/pair_key.hpp"

namespace svcal {

enum class TTestVariant { Welch, Student };

struct TTestResult {
  double mean_0 = 0.0;  // "absent" group
  double mean_1 = 0.0;  // "present" group
  double t_value = 0.0;
  double df = 0.0;
  double p_value = 1.0;  // two-sided
  std::size_t n_0 = 0;
  std::size_t n_1 = 0;
  // Both groups constant with different means: t is infinite and p is reported as 0.
  bool zero_variance = false;
};

/// Independent two-sample t-test (Welch by default). Each group needs >= 2 values.
TTestResult t_test(std::span<const double> group_0, std::span<const double> group_1,
                   TTestVariant variant = TTestVariant::Welch);

/// CDF of Student's t distribution with df degrees of freedom (df > 0).
double t_cdf(double t, double df);

// 2 * (1 - t_cdf(|t|, df)), computed without cancellation.
double two_sided_p(double t, double df);

/// Regularised incomplete beta I_x(a, b) by continued fraction.
double incomplete_beta(double a, double b, double x);

struct CorrResult {
  double r = 0.0;
  double p_value = 1.0;
  std::size_t n = 0;
};

/// Sample Pearson correlation with a two-sided t-based p-value (df = n - 2).
CorrResult pearson(std::span<const double> x, std::span<const double> y);

struct ProxyAssociation {
  TTestResult test;  // group 0 = proxy absent, group 1 = present
};

/// Splits entropies by the proxy flag and compares the group means. Both maps
/// must have the same key set.
ProxyAssociation proxy_association(const std::map<PairKey, double>& entropies,
                                   const std::map<PairKey, bool>& proxy_flags,
                                   TTestVariant variant = TTestVariant::Welch);

}  // namespace svcal
