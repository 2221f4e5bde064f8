#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "arqmc/points.hpp"

namespace arqmc {

void LatticeRule::validate() const
{
    if (n < 1)
        throw std::invalid_argument("LatticeRule: n must be positive");
    for (std::uint64_t aj : a)
        if (std::gcd(aj, n) != 1 || (n > 1 && aj >= n))
            throw std::invalid_argument("LatticeRule: components must be coprime to n and below n");
}

LatticeRule korobov_rule(std::uint64_t n, std::size_t dim, std::uint64_t base)
{
    LatticeRule r{n, {}};
    std::uint64_t a = 1 % n;
    for (std::size_t j = 0; j < dim; ++j) {
        r.a.push_back(a);
        a = static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * base % n);
    }
    return r;
}

void WeightsSpec::validate() const
{
    if (!(rho > 0 && rho < 1))
        throw std::invalid_argument("WeightsSpec: rho must lie in (0,1)");
    if (alpha != 2)
        throw std::invalid_argument("WeightsSpec: only alpha = 2 is supported");
}

double p_alpha_discrepancy(const LatticeRule& rule, const WeightsSpec& weights)
{
    double sum = 0;
    for (std::uint64_t i = 0; i < rule.n; ++i) {
        double prod = 1;
        for (std::size_t j = 0; j < rule.dimension(); ++j)
            prod *= 1 + weights.rho * bernoulli_kernel(rule.coordinate(i, j));
        sum += prod;
    }
    return sum / static_cast<double>(rule.n) - 1;
}

namespace {

// Extends `rule` component by component up to `dim`.
void cbc_extend(LatticeRule& rule, std::size_t dim, const WeightsSpec& weights)
{
    const std::uint64_t n = rule.n;
    std::vector<double> table(n);
    for (std::uint64_t r = 0; r < n; ++r)
        table[r] = 1 + weights.rho * bernoulli_kernel(static_cast<double>(r) / static_cast<double>(n));

    // Running products over the components fixed so far.
    std::vector<double> q(n, 1.0);
    for (std::uint64_t aj : rule.a) {
        std::uint64_t r = 0;
        for (std::uint64_t i = 0; i < n; ++i) {
            q[i] *= table[r];
            r += aj;
            if (r >= n)
                r -= n;
        }
    }

    // phi(1 - u) = phi(u), so the products are symmetric under i -> n - i and
    // candidates a and n - a score the same: half of each range suffices.
    const std::uint64_t half = n / 2;
    const std::uint64_t upper_i = (n + 1) / 2;  // indices 1 .. upper_i - 1 appear twice
    while (rule.a.size() < dim) {
        double best = std::numeric_limits<double>::infinity();
        std::uint64_t best_a = 1;
        for (std::uint64_t a = 1; a <= std::max<std::uint64_t>(half, 1); ++a) {
            if (std::gcd(a, n) != 1)
                continue;
            double s = 0;
            std::uint64_t r = a;
            for (std::uint64_t i = 1; i < upper_i; ++i) {
                s += q[i] * table[r];
                r += a;
                if (r >= n)
                    r -= n;
            }
            s = q[0] * table[0] + 2 * s;
            if (n % 2 == 0)
                s += q[half] * table[(half * a) % n];
            if (s < best) {
                best = s;
                best_a = a;
            }
        }
        rule.a.push_back(best_a);
        std::uint64_t r = 0;
        for (std::uint64_t i = 0; i < n; ++i) {
            q[i] *= table[r];
            r += best_a;
            if (r >= n)
                r -= n;
        }
    }
}

std::string cache_file(const std::string& dir, std::uint64_t n, const WeightsSpec& w)
{
    char name[96];
    std::snprintf(name, sizeof name, "lattice_n%llu_rho%.6g.json", static_cast<unsigned long long>(n),
                  w.rho);
    return (std::filesystem::path(dir) / name).string();
}

}  // namespace

LatticeRule lattice_search(std::uint64_t n, std::size_t dim, const WeightsSpec& weights)
{
    if (n < 2)
        throw std::invalid_argument("lattice_search: n must be at least 2");
    if (dim < 1)
        throw std::invalid_argument("lattice_search: dimension must be at least 1");
    weights.validate();
    LatticeRule rule{n, {1}};
    cbc_extend(rule, dim, weights);
    return rule;
}

std::string lattice_cache_dir()
{
    const char* env = std::getenv("ARQMC_LATTICE_CACHE");
    return env ? env : "";
}

LatticeRule cached_lattice(std::uint64_t n, std::size_t dim, const WeightsSpec& weights,
                           const std::string& dir_arg)
{
    const std::string dir = dir_arg.empty() ? lattice_cache_dir() : dir_arg;
    if (dir.empty())
        return lattice_search(n, dim, weights);
    weights.validate();

    const std::string path = cache_file(dir, n, weights);
    LatticeRule rule{n, {1}};
    if (std::ifstream in(path); in) {
        try {
            const auto doc = nlohmann::json::parse(in);
            if (doc.at("n").get<std::uint64_t>() == n
                && std::fabs(doc.at("rho").get<double>() - weights.rho) < 1e-12)
                rule.a = doc.at("a").get<std::vector<std::uint64_t>>();
        } catch (const std::exception&) {
            rule.a = {1};  // unreadable cache entry: recompute
        }
        if (rule.a.empty() || rule.a[0] != 1)
            rule.a = {1};
    }
    if (rule.a.size() >= dim) {
        rule.a.resize(dim);
        return rule;
    }
    // CBC is prefix consistent, so a shorter cached rule can be extended.
    cbc_extend(rule, dim, weights);

    std::filesystem::create_directories(dir);
    nlohmann::json doc{{"n", n}, {"dim", rule.a.size()}, {"rho", weights.rho}, {"a", rule.a}};
    const std::string tmp = path + ".tmp" + std::to_string(reinterpret_cast<std::uintptr_t>(&doc));
    {
        std::ofstream out(tmp);
        out << doc.dump() << "\n";
    }
    std::filesystem::rename(tmp, path);
    return rule;
}

}  // namespace arqmc
