#include <cmath>
#include <limits>

#include <doctest.h>

#include "arqmc/rng.hpp"
#include "arqmc/sampling.hpp"
#include "support/oracles.hpp"

using namespace arqmc;

TEST_CASE("poisson inverse: small means by hand")
{
    // F(0) = e^-1 = 0.3679, F(1) = 0.7358, F(2) = 0.9197 for lambda = 1.
    CHECK(poisson_inverse(1.0, 0.3) == 0);
    CHECK(poisson_inverse(1.0, 0.36787944117144) == 0);
    CHECK(poisson_inverse(1.0, 0.5) == 1);
    CHECK(poisson_inverse(1.0, 0.9) == 2);
    CHECK(poisson_inverse(1.0, 0.95) == 3);
    CHECK(poisson_inverse(0.0, 0.999) == 0);
    CHECK(poisson_inverse(0.0, 1e-300) == 0);
}

TEST_CASE("poisson inverse: rejects bad arguments")
{
    CHECK_THROWS_AS(poisson_inverse(-1.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(poisson_inverse(std::numeric_limits<double>::quiet_NaN(), 0.5), std::invalid_argument);
    CHECK_THROWS_AS(poisson_inverse(std::numeric_limits<double>::infinity(), 0.5), std::invalid_argument);
    CHECK_THROWS_AS(poisson_inverse(3.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(poisson_inverse(3.0, 1.0), std::invalid_argument);
}

TEST_CASE("poisson inverse: monotone in u and agrees with oracle around the regime switch")
{
    for (double lambda : {0.5, 20.0, 49.99, 50.0, 50.01, 500.0}) {
        std::int64_t prev = 0;
        for (int i = 1; i < 400; ++i) {
            const double u = i / 400.0;
            const auto k = poisson_inverse(lambda, u);
            CHECK(k >= prev);
            prev = k;
            if (i % 37 == 0)
                CHECK(k == oracle::poisson_quantile(lambda, u));
        }
    }
}

TEST_CASE("poisson inverse: extreme lower tail of a large mean")
{
    for (double lambda : {60.0, 1000.0, 2.5e4})
        for (double u : {1e-300, 1e-250, 1e-199, 1e-40})
            CHECK(poisson_inverse(lambda, u) == oracle::poisson_quantile(lambda, u));
}

TEST_CASE("poisson inverse: empirical mean and variance")
{
    Mrg32k3a rng;
    for (double lambda : {2.5, 80.0}) {
        const int n = 200000;
        double s = 0, s2 = 0;
        for (int i = 0; i < n; ++i) {
            const double k = static_cast<double>(poisson_inverse(lambda, rng.next()));
            s += k;
            s2 += k * k;
        }
        const double mean = s / n, var = s2 / n - mean * mean;
        CHECK(std::fabs(mean - lambda) < 5 * std::sqrt(lambda / n));
        CHECK(var == doctest::Approx(lambda).epsilon(0.02));
    }
}

TEST_CASE("poisson log pmf")
{
    for (double lambda : {0.3, 7.0, 120.0, 5000.0})
        for (std::int64_t k : {0, 1, 5, 100, 4900})
            CHECK(poisson_log_pmf(k, lambda)
                  == doctest::Approx(k * std::log(lambda) - lambda - std::lgamma(k + 1.0)).epsilon(1e-11));
}

TEST_CASE("normal cdf and inverse")
{
    CHECK(normal_cdf(0) == 0.5);
    CHECK(normal_cdf(1.96) == doctest::Approx(0.9750021048517795).epsilon(1e-14));
    CHECK(normal_cdf(-8) == doctest::Approx(6.22096057427178e-16).epsilon(1e-12));
    CHECK(normal_inverse(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-14));
    CHECK(normal_inverse(0.5) == doctest::Approx(0.0).epsilon(1e-15));
    for (double u : {1e-300, 1e-20, 1e-5, 0.02425, 0.3, 0.7, 0.97575, 1 - 1e-10}) {
        const double z = normal_inverse(u);
        const double back = u < 0.5 ? normal_cdf(z) : 1 - normal_cdf(-z);
        CHECK(back == doctest::Approx(u).epsilon(1e-13));
        if (1 - u < 1)
            CHECK(normal_inverse(1 - u) == doctest::Approx(-z).epsilon(1e-9));
    }
    CHECK_THROWS_AS(normal_inverse(0.0), std::invalid_argument);
    CHECK_THROWS_AS(normal_inverse(1.0), std::invalid_argument);
}

TEST_CASE("count variate in both modes")
{
    CHECK(count_variate(4.0, 0.5, StateMode::integer) == 4.0);  // median of Poisson(4)
    CHECK(count_variate(4.0, 0.5, StateMode::real) == doctest::Approx(4.0));
    CHECK(count_variate(9.0, 0.975, StateMode::real) == doctest::Approx(9 + 3 * 1.959963984540054));
    CHECK(count_variate(0.0, 0.3, StateMode::real) == 0.0);
    CHECK(count_variate(0.0, 0.3, StateMode::integer) == 0.0);
}
