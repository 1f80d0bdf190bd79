#include "svcal/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "svcal/error.hpp"

namespace svcal {

namespace {

struct Moments {
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  std::size_t n = 0;
};

Moments moments(std::span<const double> xs) {
  Moments m;
  m.n = xs.size();
  double sum = 0.0;
  for (double x : xs) sum += x;
  m.mean = sum / static_cast<double>(m.n);
  double ss = 0.0;
  for (double x : xs) ss += (x - m.mean) * (x - m.mean);
  m.variance = m.n > 1 ? ss / static_cast<double>(m.n - 1) : 0.0;
  return m;
}

// Modified Lentz evaluation of the incomplete beta continued fraction.
double beta_fraction(double a, double b, double x) {
  constexpr double kTiny = 1e-300;
  constexpr double kEps = 1e-15;
  constexpr int kMaxIter = 200000;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

// I_x(a, b) with y = 1 - x supplied separately to keep precision near x = 1.
double incomplete_beta(double a, double b, double x, double y) {
  if (x <= 0.0) return 0.0;
  if (y <= 0.0) return 1.0;
  const double log_front =
      a * std::log(x) + b * std::log(y) - (std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_fraction(a, b, x) / a;
  return 1.0 - front * beta_fraction(b, a, y) / b;
}

void require_df(double df) {
  if (!(df > 0.0)) fail(ErrorCode::InvalidArgument, "degrees of freedom must be positive");
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0) || !(x >= 0.0 && x <= 1.0)) {
    fail(ErrorCode::InvalidArgument, "incomplete beta needs a, b > 0 and x in [0, 1]");
  }
  return incomplete_beta(a, b, x, 1.0 - x);
}

double two_sided_p(double t, double df) {
  require_df(df);
  if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
  if (std::isinf(t)) return 0.0;
  const double t2 = t * t;
  return incomplete_beta(0.5 * df, 0.5, df / (df + t2), t2 / (df + t2));
}

double t_cdf(double t, double df) {
  const double tail = 0.5 * two_sided_p(t, df);
  return t > 0.0 ? 1.0 - tail : tail;
}

TTestResult t_test(std::span<const double> group_0, std::span<const double> group_1, TTestVariant variant) {
  if (group_0.size() < 2 || group_1.size() < 2) {
    fail(ErrorCode::DegenerateGroup, "t-test needs at least 2 values per group (got " +
                                         std::to_string(group_0.size()) + " and " +
                                         std::to_string(group_1.size()) + ")");
  }
  const Moments m0 = moments(group_0);
  const Moments m1 = moments(group_1);
  const auto n0 = static_cast<double>(m0.n);
  const auto n1 = static_cast<double>(m1.n);

  TTestResult r;
  r.mean_0 = m0.mean;
  r.mean_1 = m1.mean;
  r.n_0 = m0.n;
  r.n_1 = m1.n;

  double se2 = 0.0;
  if (variant == TTestVariant::Welch) {
    const double a = m0.variance / n0;
    const double b = m1.variance / n1;
    se2 = a + b;
    r.df = se2 > 0.0 ? se2 * se2 / (a * a / (n0 - 1.0) + b * b / (n1 - 1.0)) : n0 + n1 - 2.0;
  } else {
    const double pooled = ((n0 - 1.0) * m0.variance + (n1 - 1.0) * m1.variance) / (n0 + n1 - 2.0);
    se2 = pooled * (1.0 / n0 + 1.0 / n1);
    r.df = n0 + n1 - 2.0;
  }

  const double diff = m0.mean - m1.mean;
  if (se2 == 0.0) {
    if (diff == 0.0) {
      r.t_value = 0.0;
      r.p_value = 1.0;
    } else {
      r.zero_variance = true;
      r.t_value = diff > 0.0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
      r.p_value = 0.0;
    }
    return r;
  }
  r.t_value = diff / std::sqrt(se2);
  r.p_value = two_sided_p(r.t_value, r.df);
  return r;
}

CorrResult pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    fail(ErrorCode::DimensionMismatch, "pearson needs equal-length samples (" + std::to_string(x.size()) +
                                           " vs " + std::to_string(y.size()) + ")");
  }
  if (x.size() < 3) fail(ErrorCode::DegenerateGroup, "pearson needs at least 3 pairs");
  const Moments mx = moments(x);
  const Moments my = moments(y);
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx.mean;
    const double dy = y[i] - my.mean;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) fail(ErrorCode::ZeroVariance, "pearson is undefined for a constant sample");

  CorrResult c;
  c.n = x.size();
  c.r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  const double df = static_cast<double>(c.n) - 2.0;
  if (std::abs(c.r) >= 1.0) {
    c.p_value = 0.0;
  } else {
    c.p_value = two_sided_p(c.r * std::sqrt(df / (1.0 - c.r * c.r)), df);
  }
  return c;
}

ProxyAssociation proxy_association(const std::map<PairKey, double>& entropies,
                                   const std::map<PairKey, bool>& proxy_flags, TTestVariant variant) {
  if (entropies.size() != proxy_flags.size()) {
    fail(ErrorCode::MisalignedKeys, std::to_string(entropies.size()) + " entropies but " +
                                        std::to_string(proxy_flags.size()) + " proxy flags");
  }
  std::vector<double> absent;
  std::vector<double> present;
  auto flag = proxy_flags.begin();
  for (const auto& [key, h] : entropies) {
    if (flag->first != key) fail(ErrorCode::MisalignedKeys, "no proxy flag for " + key.str());
    (flag->second ? present : absent).push_back(h);
    ++flag;
  }
  if (absent.empty() || present.empty()) {
    fail(ErrorCode::DegenerateGroup, "proxy is " + std::string(absent.empty() ? "present" : "absent") +
                                         " for every pair");
  }
  return {t_test(absent, present, variant)};
}

}  // namespace svcal
