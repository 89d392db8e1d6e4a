#include "doctest.h"

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <random>

#include "airkit/errors.hpp"
#include "airkit/hypothesis_test.hpp"

using namespace airkit;
using boost::multiprecision::cpp_rational;
using Big = boost::multiprecision::cpp_bin_float_50;

namespace {

cpp_rational power(const cpp_rational& x, int e) {
  cpp_rational r = 1;
  for (int i = 0; i < e; ++i) r *= x;
  return r;
}

// Exact P(X >= k) for X ~ Binomial(n, num/den).
cpp_rational exact_upper_tail(int k, int n, int num, int den) {
  const cpp_rational p(num, den), q = 1 - p;
  cpp_rational sum = 0, choose = 1;
  for (int j = 0; j <= n; ++j) {
    if (j > 0) choose = choose * (n - j + 1) / j;
    if (j >= k) sum += choose * power(p, j) * power(q, n - j);
  }
  return sum;
}

// 50-digit tail P(X >= k), summing pmf terms by recurrence from j = 0.
Big big_upper_tail(std::int64_t k, std::int64_t n, double p_double) {
  const Big p = p_double, q = Big(1) - p;
  Big term = boost::multiprecision::pow(q, n);
  Big sum = 0;
  for (std::int64_t j = 0; j <= n; ++j) {
    if (j >= k) sum += term;
    term = term * Big(n - j) / Big(j + 1) * p / q;
  }
  return sum;
}

double to_double(const cpp_rational& r) { return static_cast<double>(r); }

}  // namespace

TEST_CASE("exact-rational oracle values") {
  CHECK(exact_upper_tail(15, 20, 1, 2) == cpp_rational(21700, 1 << 20));
  CHECK(exact_upper_tail(10, 20, 1, 2) == cpp_rational(616666, 1 << 20));
}

TEST_CASE("ump test examples") {
  CHECK(ump_poisson_test({0, 0, 1.0, 1.0}).p_value == 1.0);
  CHECK(ump_poisson_test({0, 0, 3.0, 9.0, Alternative::two_sided}).p_value == 1.0);

  const auto a = ump_poisson_test({15, 5, 1.0, 1.0});
  CHECK(std::abs(a.p_value - 21700.0 / 1048576.0) < 1e-12);
  CHECK(a.conditional_total == 20);
  CHECK(a.success_probability_h0 == 0.5);
  CHECK(a.effective_n1 == 15);

  CHECK(std::abs(ump_poisson_test({10, 10, 1.0, 1.0}).p_value - 616666.0 / 1048576.0) < 1e-12);
  CHECK(ump_poisson_test({15, 5, 1.0, 1.0}).p_value == doctest::Approx(0.020694732));
}

TEST_CASE("alternatives") {
  const double greater = ump_poisson_test({12, 4, 2.0, 1.0, Alternative::greater}).p_value;
  const double less = ump_poisson_test({12, 4, 2.0, 1.0, Alternative::less}).p_value;
  const double two = ump_poisson_test({12, 4, 2.0, 1.0, Alternative::two_sided}).p_value;
  CHECK(greater == doctest::Approx(to_double(exact_upper_tail(12, 16, 2, 3))).epsilon(1e-13));
  CHECK(less == doctest::Approx(to_double(1 - exact_upper_tail(13, 16, 2, 3))).epsilon(1e-13));
  CHECK(two == doctest::Approx(std::min(1.0, 2.0 * std::min(greater, less))));
  CHECK(ump_poisson_test({5, 5, 1.0, 1.0, Alternative::two_sided}).p_value == 1.0);
  CHECK(parse_alternative("two-sided") == Alternative::two_sided);
  CHECK(parse_alternative("two_sided") == Alternative::two_sided);
  CHECK(std::string(to_string(Alternative::two_sided)) == "two-sided");
  CHECK_THROWS_AS(parse_alternative("sideways"), InvalidArgument);
}

TEST_CASE("input rejection") {
  CHECK_THROWS_AS(ump_poisson_test({1, 1, 0.0, 1.0}), InvalidArgument);
  CHECK_THROWS_AS(ump_poisson_test({1, 1, 1.0, -1.0}), InvalidArgument);
  CHECK_THROWS_AS(ump_poisson_test({1, 1, 1.0, 1.0, Alternative::greater, 0.0}), InvalidArgument);
  CHECK_THROWS_AS(ump_poisson_test({-1, 1, 1.0, 1.0}), InvalidArgument);
  CHECK_THROWS_AS(binomial_tail(21, 20, 0.5, TailDirection::ge), InvalidArgument);
  CHECK_THROWS_AS(binomial_tail(-1, 20, 0.5, TailDirection::ge), InvalidArgument);
}

TEST_CASE("binomial tail edges") {
  CHECK(binomial_tail(0, 37, 0.3, TailDirection::ge) == 1.0);
  CHECK(binomial_tail(37, 37, 0.3, TailDirection::le) == 1.0);
  CHECK(binomial_tail(37, 37, 0.3, TailDirection::ge) == doctest::Approx(std::pow(0.3, 37)).epsilon(1e-13));
  CHECK(binomial_tail(0, 37, 0.3, TailDirection::le) == doctest::Approx(std::pow(0.7, 37)).epsilon(1e-13));
  CHECK(binomial_tail(15, 20, 0.5, TailDirection::ge) == doctest::Approx(0.020694732).epsilon(1e-8));
  CHECK(binomial_tail(1000000, 1000000, 0.5, TailDirection::ge) > 0.0);
}

TEST_CASE("binomial tail against the exact rational oracle") {
  const std::pair<int, int> probs[] = {{1, 2}, {1, 3}, {3, 10}, {9, 10}, {1, 100}};
  for (int n : {1, 2, 7, 20, 63, 150}) {
    for (const auto& [num, den] : probs) {
      const double p = double(num) / den;
      for (int k = 0; k <= n; ++k) {
        const double ge = to_double(exact_upper_tail(k, n, num, den));
        const double le = to_double(1 - exact_upper_tail(k + 1, n, num, den));
        CHECK(std::abs(binomial_tail(k, n, p, TailDirection::ge) - ge) <= 1e-13);
        CHECK(std::abs(binomial_tail(k, n, p, TailDirection::le) - le) <= 1e-13);
      }
    }
  }
}

TEST_CASE("binomial tail within 1e-12 for n up to 1e4 (50-digit oracle)") {
  std::mt19937_64 rng(17);
  for (std::int64_t n : {500, 3000, 10000}) {
    for (double p : {0.5, 0.137, 0.92}) {
      const auto mode = static_cast<std::int64_t>(std::floor((n + 1) * p));
      const std::int64_t spread = static_cast<std::int64_t>(6 * std::sqrt(n * p * (1 - p))) + 2;
      for (int trial = 0; trial < 6; ++trial) {
        std::int64_t k = mode - spread + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(2 * spread));
        k = std::clamp<std::int64_t>(k, 0, n);
        const double oracle = static_cast<double>(big_upper_tail(k, n, p));
        CHECK(std::abs(binomial_tail(k, n, p, TailDirection::ge) - oracle) <= 1e-12);
      }
    }
  }
}

TEST_CASE("binomial tail relative accuracy deep in the tail") {
  const double oracle = static_cast<double>(big_upper_tail(700, 1000, 0.5));
  CHECK(binomial_tail(700, 1000, 0.5, TailDirection::ge) == doctest::Approx(oracle).epsilon(1e-11));
}

TEST_CASE("binomial tail scales to n = 1e6") {
  const std::int64_t n = 1000000;
  // Symmetric case: P(X >= n/2) = 1/2 + pmf(n/2)/2.
  const double half = 0.5 + 0.5 * binomial_pmf(n / 2, n, 0.5);
  CHECK(binomial_tail(n / 2, n, 0.5, TailDirection::ge) == doctest::Approx(half).epsilon(1e-12));
  const double ge = binomial_tail(300500, n, 0.3, TailDirection::ge);
  const double lt = binomial_tail(300499, n, 0.3, TailDirection::le);
  CHECK(ge + lt == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("binomial pmf matches the oracle") {
  for (int k : {0, 3, 10, 19, 20}) {
    const double oracle = to_double(exact_upper_tail(k, 20, 3, 10) - exact_upper_tail(k + 1, 20, 3, 10));
    CHECK(binomial_pmf(k, 20, 0.3) == doctest::Approx(oracle).epsilon(1e-13));
  }
}

TEST_CASE("round half to even") {
  CHECK(round_half_even(0.5) == 0);
  CHECK(round_half_even(1.5) == 2);
  CHECK(round_half_even(2.5) == 2);
  CHECK(round_half_even(2.5000001) == 3);
  CHECK(round_half_even(3.49) == 3);
  CHECK(round_half_even(0.0) == 0);
}

TEST_CASE("property: swap anti-symmetry") {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 500; ++i) {
    const std::int64_t n1 = static_cast<std::int64_t>(rng() % 200), n2 = static_cast<std::int64_t>(rng() % 200);
    const double t1 = 0.1 + static_cast<double>(rng() % 1000) / 10.0;
    const double t2 = 0.1 + static_cast<double>(rng() % 1000) / 10.0;
    CHECK(ump_poisson_test({n1, n2, t1, t2, Alternative::greater}).p_value ==
          ump_poisson_test({n2, n1, t2, t1, Alternative::less}).p_value);
  }
}

TEST_CASE("property: GREATER p-value is non-increasing in n1") {
  for (double t1 : {0.5, 1.0, 3.0})
    for (std::int64_t n2 : {0, 3, 40}) {
      double prev = 2.0;
      for (std::int64_t n1 = 0; n1 <= 150; ++n1) {
        const double p = ump_poisson_test({n1, n2, t1, 1.0}).p_value;
        CHECK(p <= prev);
        CHECK(p >= 0.0);
        CHECK(p <= 1.0);
        prev = p;
      }
    }
}

TEST_CASE("scaling changes p-values") {
  const auto base = ump_poisson_test({8, 3, 1.0, 1.0});
  const auto scaled = ump_poisson_test({8, 3, 1.0, 1.0, Alternative::greater, 25.0});
  CHECK(scaled.effective_n1 == 200);
  CHECK(scaled.conditional_total == 275);
  CHECK(scaled.p_value < base.p_value / 100.0);
  const auto down = ump_poisson_test({5, 3, 1.0, 1.0, Alternative::greater, 0.1});
  CHECK(down.effective_n1 == 0);  // 0.5 rounds to even
  CHECK(down.conditional_total == 0);
  CHECK(down.p_value == 1.0);
}
