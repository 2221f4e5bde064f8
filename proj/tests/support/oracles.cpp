#include "oracles.hpp"

#include <cmath>
#include <stdexcept>

namespace oracle {

namespace {

long double pmf(std::int64_t k, long double lambda)
{
    if (lambda == 0)
        return k == 0 ? 1.0L : 0.0L;
    return std::exp(static_cast<long double>(k) * std::log(lambda) - lambda - std::lgamma(static_cast<long double>(k) + 1));
}

}  // namespace

std::int64_t poisson_quantile(double lambda_d, double u)
{
    const long double lambda = lambda_d;
    const auto top = static_cast<std::int64_t>(lambda + 60 * std::sqrt(lambda) + 100);
    if (u <= 0.5) {
        long double cdf = 0;
        for (std::int64_t k = 0; k <= top; ++k) {
            cdf += pmf(k, lambda);
            if (cdf >= u)
                return k;
        }
        throw std::runtime_error("poisson oracle: lower sum did not reach u");
    }
    // tail[k] = P(X > k), accumulated from the far end.
    std::vector<long double> tail(static_cast<std::size_t>(top) + 1, 0.0L);
    long double acc = 0;
    for (std::int64_t k = top; k >= 0; --k) {
        tail[static_cast<std::size_t>(k)] = acc;
        acc += pmf(k, lambda);
    }
    const long double target = 1.0L - static_cast<long double>(u);
    for (std::int64_t k = 0; k <= top; ++k)
        if (tail[static_cast<std::size_t>(k)] <= target)
            return k;
    return top;
}

double PlainMrg::next()
{
    constexpr double m1 = 4294967087.0, m2 = 4294944443.0;
    constexpr double norm = 2.328306549295727688e-10;
    constexpr double a12 = 1403580.0, a13n = 810728.0, a21 = 527612.0, a23n = 1370589.0;

    double p1 = a12 * s_[1] - a13n * s_[0];
    auto k = static_cast<long long>(p1 / m1);
    p1 -= static_cast<double>(k) * m1;
    if (p1 < 0)
        p1 += m1;
    s_[0] = s_[1];
    s_[1] = s_[2];
    s_[2] = p1;

    double p2 = a21 * s_[5] - a23n * s_[3];
    k = static_cast<long long>(p2 / m2);
    p2 -= static_cast<double>(k) * m2;
    if (p2 < 0)
        p2 += m2;
    s_[3] = s_[4];
    s_[4] = s_[5];
    s_[5] = p2;

    return p1 > p2 ? (p1 - p2) * norm : (p1 - p2 + m1) * norm;
}

const Matrix3 a1p76{{{82758667u, 1871391091u, 4127413238u},
                     {3672831523u, 69195019u, 1871391091u},
                     {3672091415u, 3528743235u, 69195019u}}};
const Matrix3 a2p76{{{1511326704u, 3759209742u, 1610795712u},
                     {4292754251u, 1511326704u, 3889917532u},
                     {3859662829u, 4292754251u, 3708466080u}}};
const Matrix3 a1p127{{{2427906178u, 3580155704u, 949770784u},
                      {226153695u, 1230515664u, 3580155704u},
                      {1988835001u, 986791581u, 1230515664u}}};
const Matrix3 a2p127{{{1464411153u, 277697599u, 1610723613u},
                      {32183930u, 1464411153u, 1022607788u},
                      {2824425944u, 32183930u, 2093834863u}}};

std::array<std::uint64_t, 6> jump(const std::array<std::uint64_t, 6>& s, const Matrix3& a1, const Matrix3& a2)
{
    constexpr std::uint64_t m1 = 4294967087u, m2 = 4294944443u;
    std::array<std::uint64_t, 6> out{};
    for (int r = 0; r < 3; ++r) {
        unsigned __int128 v1 = 0, v2 = 0;
        for (int c = 0; c < 3; ++c) {
            v1 += static_cast<unsigned __int128>(a1[r][c]) * s[c];
            v2 += static_cast<unsigned __int128>(a2[r][c]) * s[3 + c];
        }
        out[r] = static_cast<std::uint64_t>(v1 % m1);
        out[3 + r] = static_cast<std::uint64_t>(v2 % m2);
    }
    return out;
}

double p2_subset_sum(std::uint64_t n, const std::vector<std::uint64_t>& a, double rho)
{
    const std::size_t s = a.size();
    const double pi = std::acos(-1.0);
    auto phi = [pi](double u) { return 2 * pi * pi * (u * u - u + 1.0 / 6.0); };
    double total = 0;
    for (std::uint64_t mask = 1; mask < (std::uint64_t(1) << s); ++mask) {
        double inner = 0;
        for (std::uint64_t i = 0; i < n; ++i) {
            double prod = 1;
            for (std::size_t j = 0; j < s; ++j)
                if (mask >> j & 1)
                    prod *= phi(static_cast<double>((i * a[j]) % n) / static_cast<double>(n));
            inner += prod;
        }
        total += std::pow(rho, __builtin_popcountll(mask)) * inner / static_cast<double>(n);
    }
    return total;
}

double poisson_pair_expectation(double x, double l1, double l2, const std::function<double(double)>& f)
{
    auto support = [](double l) {
        std::vector<long double> p;
        long double mass = 0;
        for (std::int64_t k = 0; mass < 1 - 1e-13L; ++k) {
            p.push_back(pmf(k, l));
            mass += p.back();
        }
        return p;
    };
    const auto p1 = support(l1), p2 = support(l2);
    long double e = 0;
    for (std::size_t k1 = 0; k1 < p1.size(); ++k1)
        for (std::size_t k2 = 0; k2 < p2.size(); ++k2)
            e += p1[k1] * p2[k2] * f(x - static_cast<double>(k1) + static_cast<double>(k2));
    return static_cast<double>(e);
}

std::array<double, 2> rev_iso_mean(double x1, double x2, double c1, double c2, double tau, int steps)
{
    for (int j = 0; j < steps; ++j) {
        const double flow = tau * (c1 * x1 - c2 * x2);
        x1 -= flow;
        x2 += flow;
    }
    return {x1, x2};
}

}  // namespace oracle
