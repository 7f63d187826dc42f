#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "purecert/errors.hpp"
#include "purecert/stats.hpp"

using namespace purecert;

namespace {

// brute-force binomial upper tail at extended precision
long double tail_oracle(std::size_t k, std::size_t n, long double p) {
    long double total = 0.0L;
    for (std::size_t i = k; i <= n; ++i) {
        long double logc = std::lgamma(static_cast<long double>(n) + 1.0L) -
                           std::lgamma(static_cast<long double>(i) + 1.0L) -
                           std::lgamma(static_cast<long double>(n - i) + 1.0L);
        total += std::exp(logc + i * std::log(p) + (n - i) * std::log1p(-p));
    }
    return total;
}

}  // namespace

TEST_CASE("clopper_pearson_lower: zero successes") {
    CHECK(clopper_pearson_lower(0, 100, 0.001) == 0.0);
}

TEST_CASE("clopper_pearson_lower: all successes matches alpha^(1/n)") {
    const double expected = std::pow(0.001, 1.0 / 100.0);  // 0.93325...
    CHECK(std::abs(clopper_pearson_lower(100, 100, 0.001) - expected) <= 1e-5);
    CHECK(std::abs(clopper_pearson_lower(1000, 1000, 0.01) - std::pow(0.01, 1e-3)) <= 1e-8);
}

TEST_CASE("clopper_pearson_lower: 50/100 at alpha 0.05 vs tail oracle") {
    const double p = clopper_pearson_lower(50, 100, 0.05);
    CHECK(p > 0.40);
    CHECK(p < 0.50);
    // the bound is exactly where the tail equals alpha
    CHECK(std::abs(static_cast<double>(tail_oracle(50, 100, p)) - 0.05) <= 1e-9);
}

TEST_CASE("clopper_pearson_lower: monotone in successes and alpha") {
    double prev = -1.0;
    for (std::size_t k : {10, 30, 50, 70, 90}) {
        const double v = clopper_pearson_lower(k, 100, 0.05);
        CHECK(v > prev);
        prev = v;
    }
    CHECK(clopper_pearson_lower(50, 100, 0.01) < clopper_pearson_lower(50, 100, 0.10));
}

TEST_CASE("clopper_pearson_lower: invalid inputs") {
    CHECK_THROWS_AS(clopper_pearson_lower(5, 0, 0.05), InvalidCounts);
    CHECK_THROWS_AS(clopper_pearson_lower(5, 4, 0.05), InvalidCounts);
    CHECK_THROWS_AS(clopper_pearson_lower(1, 4, 0.0), InvalidCounts);
}

TEST_CASE("normal quantile against published values") {
    CHECK(normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-10));
    CHECK(normal_quantile(0.99) == doctest::Approx(2.326347874040841).epsilon(1e-10));
    CHECK(normal_quantile(0.001) == doctest::Approx(-3.090232306167814).epsilon(1e-10));
    CHECK(normal_quantile(0.93325) == doctest::Approx(1.5006).epsilon(1e-4));
}

TEST_CASE("normal quantile inverts the CDF") {
    for (double p = 0.001; p < 1.0; p += 0.013) {
        CHECK(normal_cdf(normal_quantile(p)) == doctest::Approx(p).epsilon(1e-11));
    }
}
