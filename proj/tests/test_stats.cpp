#include <doctest.h>

#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <cmath>

#include "support.hpp"
#include "svcal/error.hpp"
#include "svcal/stats.hpp"

using namespace svcal;
using namespace svcal::testing;

namespace {

std::vector<double> sample(Rng& rng, int n, double mean, double sd) {
  std::normal_distribution<double> d(mean, sd);
  std::vector<double> out(static_cast<std::size_t>(n));
  for (auto& v : out) v = d(rng);
  return out;
}

}  // namespace

TEST_CASE("t-test example") {
  const std::vector<double> a = {0.4, 0.5, 0.6}, b = {0.6, 0.7, 0.8};
  const auto r = t_test(a, b);
  CHECK(std::abs(r.t_value + 2.449) <= 0.001);
  CHECK(r.df == doctest::Approx(4.0));
  CHECK(std::abs(r.p_value - 0.0705) <= 0.002);
  CHECK(r.mean_0 == doctest::Approx(0.5));
  CHECK(r.mean_1 == doctest::Approx(0.7));
  CHECK(r.n_0 == 3);

  const auto student = t_test(a, b, TTestVariant::Student);
  CHECK(student.t_value == doctest::Approx(r.t_value));
  CHECK(student.df == 4.0);
}

TEST_CASE("t-test edge cases") {
  const std::vector<double> a = {0.1, 0.2, 0.4};
  const auto same = t_test(a, a);
  CHECK(same.t_value == 0.0);
  CHECK(same.p_value == 1.0);

  const std::vector<double> zeros(5, 0.0), ones(5, 0.41);
  const auto zv = t_test(zeros, ones);
  CHECK(zv.zero_variance);
  CHECK(zv.p_value == 0.0);
  CHECK(std::isinf(zv.t_value));
  CHECK(zv.t_value < 0.0);

  const auto flat = t_test(zeros, zeros);
  CHECK(flat.t_value == 0.0);
  CHECK(flat.p_value == 1.0);

  const std::vector<double> one = {1.0};
  CHECK_THROWS_AS(t_test(one, a), Error);
}

TEST_CASE("t distribution checkpoints") {
  CHECK(t_cdf(0.0, 3.0) == 0.5);
  CHECK(t_cdf(0.0, 0.7) == 0.5);
  CHECK(std::abs(two_sided_p(12.706, 1.0) - 0.05) <= 0.001);
  CHECK(std::abs(two_sided_p(2.776, 4.0) - 0.05) <= 0.001);
  CHECK(two_sided_p(-2.776, 4.0) == two_sided_p(2.776, 4.0));
}

TEST_CASE("property: t_cdf and incomplete beta against Boost") {
  Rng rng(71);
  for (int i = 0; i < 2000; ++i) {
    const double df = std::exp(uniform(rng, std::log(0.5), std::log(500.0)));
    const double t = uniform(rng, -12.0, 12.0);
    const boost::math::students_t dist(df);
    const double expect = boost::math::cdf(dist, t);
    CHECK(t_cdf(t, df) == doctest::Approx(expect).epsilon(1e-10));
    CHECK(std::abs(t_cdf(t, df) + t_cdf(-t, df) - 1.0) <= 1e-14);

    const double a = uniform(rng, 0.1, 50.0), b = uniform(rng, 0.1, 50.0), x = uniform(rng);
    CHECK(incomplete_beta(a, b, x) == doctest::Approx(boost::math::ibeta(a, b, x)).epsilon(1e-10));
  }
  // Large df approaches the standard normal.
  for (double t : {-3.0, -1.0, 0.5, 1.96, 2.5}) {
    const double phi = 0.5 * std::erfc(-t / std::sqrt(2.0));
    CHECK(std::abs(t_cdf(t, 1e6) - phi) <= 1e-6);
  }
}

TEST_CASE("pearson") {
  const std::vector<double> x = {1, 2, 3, 4}, y = {1, 3, 2, 4};
  CHECK(std::abs(pearson(x, y).r - 0.8) <= 1e-12);
  CHECK(pearson(x, x).r == doctest::Approx(1.0));
  CHECK(pearson(std::vector<double>{1, 2, 3}, std::vector<double>{6, 4, 2}).r == doctest::Approx(-1.0));
  // r = 0.8 with n = 4: t = 0.8 * sqrt(2 / 0.36), df 2.
  CHECK(pearson(x, y).p_value == doctest::Approx(two_sided_p(0.8 * std::sqrt(2.0 / 0.36), 2.0)));

  CHECK_THROWS_AS(pearson(x, std::vector<double>{1, 2, 3}), Error);
  CHECK_THROWS_AS(pearson(std::vector<double>{1, 2}, std::vector<double>{1, 2}), Error);
  CHECK_THROWS_AS(pearson(x, std::vector<double>{2, 2, 2, 2}), Error);
}

TEST_CASE("proxy association") {
  std::map<PairKey, double> ent;
  std::map<PairKey, bool> flags;
  for (int i = 0; i < 100; ++i) {
    PairKey k{"c" + std::to_string(i), 3};
    const bool present = i % 2 == 0;
    ent[k] = present ? 0.41 : 0.0;
    flags[k] = present;
  }
  const auto r = proxy_association(ent, flags);
  CHECK(r.test.mean_0 == 0.0);
  CHECK(r.test.mean_1 == doctest::Approx(0.41));
  CHECK(r.test.p_value < 1e-6);
  CHECK(r.test.n_0 == 50);

  auto all_false = flags;
  for (auto& [k, v] : all_false) v = false;
  CHECK_THROWS_AS(proxy_association(ent, all_false), Error);

  auto missing = flags;
  missing.erase(missing.begin());
  CHECK_THROWS_AS(proxy_association(ent, missing), Error);
}

TEST_CASE("property: t-test and pearson invariances") {
  Rng rng(72);
  for (int trial = 0; trial < 300; ++trial) {
    const auto a = sample(rng, uniform_int(rng, 2, 40), 0.0, 1.0);
    const auto b = sample(rng, uniform_int(rng, 2, 40), uniform(rng, -1.0, 1.0), uniform(rng, 0.2, 3.0));
    const auto base = t_test(a, b);
    const double shift = uniform(rng, -5.0, 5.0), scale = uniform(rng, 0.1, 10.0);
    auto a2 = a, b2 = b;
    for (auto& v : a2) v = scale * v + shift;
    for (auto& v : b2) v = scale * v + shift;
    const auto moved = t_test(a2, b2);
    CHECK(moved.t_value == doctest::Approx(base.t_value).epsilon(1e-8));
    CHECK(moved.df == doctest::Approx(base.df).epsilon(1e-8));
    CHECK(moved.p_value == doctest::Approx(base.p_value).epsilon(1e-7));
    // Swapping the groups flips the sign only.
    CHECK(t_test(b, a).t_value == doctest::Approx(-base.t_value).epsilon(1e-12));
    CHECK(base.p_value >= 0.0);
    CHECK(base.p_value <= 1.0);

    const int n = uniform_int(rng, 3, 50);
    const auto x = sample(rng, n, 0.0, 1.0);
    auto y = sample(rng, n, 0.0, 1.0);
    for (int i = 0; i < n; ++i) y[i] += 0.5 * x[i];
    const auto c = pearson(x, y);
    CHECK(c.r >= -1.0);
    CHECK(c.r <= 1.0);
    auto x2 = x;
    for (auto& v : x2) v = scale * v + shift;
    CHECK(pearson(x2, y).r == doctest::Approx(c.r).epsilon(1e-10));
    CHECK(pearson(y, x).r == doctest::Approx(c.r).epsilon(1e-14));
  }
}
