#include "arqmc/sampling.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

namespace arqmc {

namespace {

using Policy = boost::math::policies::policy<boost::math::policies::promote_double<false>>;

constexpr double small_lambda = 50.0;
// Above this u a double running sum loses the digits needed to resolve 1 - u.
constexpr double summation_u_limit = 0.9;
constexpr double log_sqrt_2pi = 0.91893853320467274178;

// Stirling error: log(k!) - [(k + 1/2) log k - k + log sqrt(2 pi)].
double stirling_error(std::int64_t k)
{
    static const std::array<double, 16> table = [] {
        std::array<double, 16> t{};
        t[0] = 0.0;  // unused, k = 0 handled by caller
        for (int i = 1; i < 16; ++i) {
            long double n = i;
            t[i] = static_cast<double>(std::lgamma(n + 1.0L) - (n + 0.5L) * std::log(n) + n
                                       - static_cast<long double>(log_sqrt_2pi));
        }
        return t;
    }();
    if (k < 16)
        return table[static_cast<std::size_t>(k)];
    const double n = static_cast<double>(k);
    const double nn = n * n;
    constexpr double s0 = 1.0 / 12, s1 = 1.0 / 360, s2 = 1.0 / 1260, s3 = 1.0 / 1680, s4 = 1.0 / 1188;
    if (k > 500)
        return (s0 - s1 / nn) / n;
    if (k > 80)
        return (s0 - (s1 - s2 / nn) / nn) / n;
    if (k > 35)
        return (s0 - (s1 - (s2 - s3 / nn) / nn) / nn) / n;
    return (s0 - (s1 - (s2 - (s3 - s4 / nn) / nn) / nn) / nn) / n;
}

// Deviance term x log(x/m) + m - x, without cancellation near x = m.
double deviance(double x, double m)
{
    if (std::fabs(x - m) < 0.1 * (x + m)) {
        double v = (x - m) / (x + m);
        double s = (x - m) * v;
        double ej = 2 * x * v;
        v *= v;
        for (int j = 1; j < 1000; ++j) {
            ej *= v;
            const double next = s + ej / (2 * j + 1);
            if (next == s)
                return next;
            s = next;
        }
        return s;
    }
    return x * std::log(x / m) + m - x;
}

template <class Real>
std::int64_t bottom_up(double lambda, double u)
{
    Real p = std::exp(-static_cast<Real>(lambda));
    Real f = p;
    std::int64_t x = 0;
    while (f < u) {
        ++x;
        p *= lambda / static_cast<Real>(x);
        const Real next = f + p;
        if (next == f)
            break;  // remaining mass below rounding: the cdf has saturated
        f = next;
    }
    return x;
}

struct Tails {
    double lower;  // F(x) = P[N <= x]
    double upper;  // 1 - F(x)
};

// Both tails of the Poisson cdf at x; the smaller one is computed directly.
Tails poisson_tails(std::int64_t x, double lambda)
{
    const double a = static_cast<double>(x) + 1.0;
    const double sigma = std::fabs((lambda - a) / a);
    const bool temme = (a > 200 && 20 / a > sigma * sigma) || (a > 20 && a <= 200 && sigma < 0.4);
    if (temme) {
        // Uniform asymptotic expansion: returns the smaller of P(a, lambda), Q(a, lambda).
        const double t = boost::math::detail::igamma_temme_large(
            a, lambda, Policy(), static_cast<boost::integral_constant<int, 53> const*>(nullptr));
        if (lambda >= a)
            return {t, 1.0 - t};
        return {1.0 - t, t};
    }
    if (lambda >= a) {
        const double f = boost::math::gamma_q(a, lambda, Policy());
        return {f, 1.0 - f};
    }
    const double s = boost::math::gamma_p(a, lambda, Policy());
    return {1.0 - s, s};
}

// log F(x) for x < lambda: log pmf(x) + log sum_j prod_{i<j} (x - i) / lambda.
double log_lower_tail(std::int64_t x, double lambda)
{
    double sum = 1, term = 1;
    for (std::int64_t j = x; j > 0; --j) {
        term *= static_cast<double>(j) / lambda;
        sum += term;
        if (term < 1e-17 * sum)
            break;
    }
    return poisson_log_pmf(x, lambda) + std::log(sum);
}

// Below this u the pmf near the quantile can underflow a double.
constexpr double log_space_u = 1e-200;

std::int64_t seeded_search(double lambda, double u)
{
    const double z = normal_inverse(u);
    const double guess = lambda + std::sqrt(lambda) * z + (z * z - 1.0) / 6.0;
    std::int64_t x = guess > 0 ? static_cast<std::int64_t>(std::floor(guess)) : 0;

    if (u < log_space_u) {
        const double log_u = std::log(u);
        while (log_lower_tail(x, lambda) < log_u)
            ++x;
        while (x > 0 && log_lower_tail(x - 1, lambda) >= log_u)
            --x;
        return x;
    }

    // Compare in whichever tail is small so that u near 1 keeps full precision.
    const bool use_upper = u > 0.5;
    const double v = 1.0 - u;
    auto reached = [&](const Tails& t) { return use_upper ? t.upper <= v : t.lower >= u; };

    Tails t = poisson_tails(x, lambda);
    double p = std::exp(poisson_log_pmf(x, lambda));
    if (reached(t)) {
        while (x > 0) {
            const Tails below{t.lower - p, t.upper + p};
            if (!reached(below))
                break;
            t = below;
            p *= static_cast<double>(x) / lambda;
            --x;
        }
        return x;
    }
    for (;;) {
        ++x;
        p *= lambda / static_cast<double>(x);
        t.lower += p;
        t.upper -= p;
        if (reached(t) || p == 0.0)
            return x;
    }
}

// Acklam's rational approximation, relative error ~1e-9 before refinement.
double acklam_lower(double p)
{
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;
    if (p < p_low) {
        const double q = std::sqrt(-2 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5])
               / ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
    }
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q
           / (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
}

}  // namespace

double poisson_log_pmf(std::int64_t k, double lambda)
{
    if (k < 0)
        return -std::numeric_limits<double>::infinity();
    if (lambda == 0)
        return k == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
    if (k == 0)
        return -lambda;
    const double x = static_cast<double>(k);
    return -stirling_error(k) - deviance(x, lambda) - 0.5 * std::log(x) - log_sqrt_2pi;
}

std::int64_t poisson_inverse(double lambda, double u)
{
    if (!(lambda >= 0) || !std::isfinite(lambda))
        throw std::invalid_argument("poisson_inverse: mean must be finite and nonnegative");
    if (!(u > 0 && u < 1))
        throw std::invalid_argument("poisson_inverse: u must lie in (0,1)");
    if (lambda == 0)
        return 0;
    if (lambda <= small_lambda)
        return u <= summation_u_limit ? bottom_up<double>(lambda, u) : bottom_up<long double>(lambda, u);
    return seeded_search(lambda, u);
}

double normal_cdf(double z)
{
    return 0.5 * std::erfc(-z * M_SQRT1_2);
}

double normal_inverse(double u)
{
    if (!(u > 0 && u < 1))
        throw std::invalid_argument("normal_inverse: u must lie in (0,1)");
    if (u == 0.5)
        return 0.0;
    // Work in the lower tail; the upper tail follows by symmetry.
    const bool upper = u > 0.5;
    const double p = upper ? 1.0 - u : u;
    double x = acklam_lower(p);
    // One Halley step against the erfc-based cdf.
    const double e = 0.5 * std::erfc(-x * M_SQRT1_2) - p;
    const double g = e * std::sqrt(2 * M_PI) * std::exp(0.5 * x * x);
    x -= g / (1 + 0.5 * x * g);
    return upper ? -x : x;
}

double count_variate(double lambda, double u, StateMode mode)
{
    if (mode == StateMode::integer)
        return static_cast<double>(poisson_inverse(lambda, u));
    if (!(lambda >= 0))
        throw std::invalid_argument("count_variate: mean must be nonnegative");
    if (lambda == 0)
        return 0.0;
    return lambda + std::sqrt(lambda) * normal_inverse(u);
}

}  // namespace arqmc
