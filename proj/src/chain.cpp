#include "arqmc/chain.hpp"

#include <bit>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "arqmc/parallel.hpp"
#include "arqmc/sampling.hpp"

namespace arqmc {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Streaming mean / sum of squared deviations, mergeable in a fixed order.
struct Moments {
    std::uint64_t count = 0;
    double mean = 0;
    double m2 = 0;

    void add(double v)
    {
        ++count;
        const double d = v - mean;
        mean += d / static_cast<double>(count);
        m2 += d * (v - mean);
    }

    void merge(const Moments& o)
    {
        if (o.count == 0)
            return;
        const double n = static_cast<double>(count + o.count);
        const double d = o.mean - mean;
        mean += d * static_cast<double>(o.count) / n;
        m2 += o.m2 + d * d * static_cast<double>(count) * static_cast<double>(o.count) / n;
        count += o.count;
    }
};

constexpr std::uint64_t mc_chunk = 4096;

void check_inputs(const ReactionNetwork& net, std::span<const double> x0, const SimConfig& config,
                  const std::vector<Functional>& g)
{
    config.validate();
    if (x0.size() != net.species_count())
        throw std::invalid_argument("initial state length differs from species count");
    if (g.empty())
        throw std::invalid_argument("at least one functional is required");
    for (const Functional& f : g)
        if (f.index >= net.species_count())
            throw std::invalid_argument("functional refers to a species outside the state");
}

}  // namespace

Stepper::Stepper(const ReactionNetwork& net, const SimConfig& config)
    : net_(&net),
      tau_(config.tau()),
      mode_(config.mode),
      policy_(config.negative_policy),
      rates_(net.reaction_count()),
      counts_(net.reaction_count())
{
}

bool Stepper::advance(std::span<double> x, std::span<const double> u)
{
    const std::size_t d = rates_.size();
    net_->propensities(x, rates_);
    for (std::size_t k = 0; k < d; ++k)
        counts_[k] = rates_[k] > 0 ? count_variate(rates_[k] * tau_, open_unit(u[k]), mode_) : 0.0;
    const bool ok = net_->apply(x, counts_);
    if (!ok && policy_ == NegativePolicy::abort_replication)
        throw NegativeStateError("negative copy number reached; replication aborted");
    return ok;
}

StateVector step(const ReactionNetwork& net, const StateVector& x, std::span<const double> u, double tau,
                 StateMode mode)
{
    if (u.size() != net.reaction_count())
        throw std::invalid_argument("step: one uniform per reaction required");
    SimConfig c;
    c.horizon = tau;
    c.steps = 1;
    c.mode = mode;
    Stepper s(net, c);
    StateVector out = x;
    s.advance(out.x, u);
    return out;
}

PathResult simulate_path(const ReactionNetwork& net, std::span<const double> x0, const SimConfig& config,
                         const CoordinateSource& coords)
{
    PathResult r;
    r.x.x.assign(x0.begin(), x0.end());
    Stepper stepper(net, config);
    std::vector<double> u(net.reaction_count());
    for (int j = 0; j < config.steps; ++j) {
        coords(j, u);
        if (!stepper.advance(r.x.x, u))
            ++r.negative_events;
    }
    return r;
}

PathResult simulate_path(const ReactionNetwork& net, std::span<const double> x0, const SimConfig& config,
                         Mrg32k3a& rng)
{
    return simulate_path(net, x0, config, [&rng](int, std::span<double> u) {
        for (double& v : u)
            v = rng.next();
    });
}

void sample_moments(std::span<const double> v, double& mean, double& var)
{
    Moments m;
    for (double x : v)
        m.add(x);
    mean = m.mean;
    var = m.count > 1 ? m.m2 / static_cast<double>(m.count - 1) : 0.0;
}

EstimatorOutput mc_estimate(const ReactionNetwork& net, std::span<const double> x0, const SimConfig& config,
                            const std::vector<Functional>& g, std::uint64_t n, std::uint64_t seed,
                            const RunOptions& options)
{
    check_inputs(net, x0, config, g);
    if (n < 2)
        throw std::invalid_argument("mc_estimate: n must be at least 2");
    const auto t0 = Clock::now();
    const std::size_t chunks = static_cast<std::size_t>((n + mc_chunk - 1) / mc_chunk);
    std::vector<std::vector<Moments>> partial(chunks, std::vector<Moments>(g.size()));
    std::vector<std::uint64_t> negatives(chunks, 0);
    const Mrg32k3a root = Mrg32k3a::stream(seed, 0);

    parallel_for(chunks, options.threads, [&](std::size_t c) {
        const std::uint64_t first = c * mc_chunk;
        const std::uint64_t last = std::min<std::uint64_t>(n, first + mc_chunk);
        Mrg32k3a rng = root.substream(first);
        Stepper stepper(net, config);
        std::vector<double> x(x0.size());
        std::vector<double> u(net.reaction_count());
        for (std::uint64_t i = first; i < last; ++i) {
            std::copy(x0.begin(), x0.end(), x.begin());
            for (int j = 0; j < config.steps; ++j) {
                for (double& v : u)
                    v = rng.next();
                if (!stepper.advance(x, u))
                    ++negatives[c];
            }
            for (std::size_t q = 0; q < g.size(); ++q)
                partial[c][q].add(g[q](x));
            rng.next_substream();
        }
    });

    EstimatorOutput out;
    out.n = n;
    out.m = 1;
    for (std::size_t q = 0; q < g.size(); ++q) {
        Moments total;
        for (std::size_t c = 0; c < chunks; ++c)
            total.merge(partial[c][q]);
        const double var = total.m2 / static_cast<double>(n - 1);
        out.mean.push_back(total.mean);
        out.var_per_run.push_back(var);
        out.var_mu_hat.push_back(var / static_cast<double>(n));
    }
    for (auto v : negatives)
        out.negative_events += v;
    out.elapsed = seconds_since(t0);
    return out;
}

EstimatorOutput crqmc_estimate(const ReactionNetwork& net, std::span<const double> x0, const SimConfig& config,
                               const std::vector<Functional>& g, const PointSet& points, std::uint64_t m,
                               std::uint64_t seed, const RunOptions& options)
{
    check_inputs(net, x0, config, g);
    if (m < 2)
        throw std::invalid_argument("crqmc_estimate: m must be at least 2");
    const std::size_t d = net.reaction_count();
    const std::size_t dims = static_cast<std::size_t>(config.steps) * d;
    if (points.dimension() < dims)
        throw std::invalid_argument("crqmc_estimate: point set has " + std::to_string(points.dimension())
                                    + " dimensions, " + std::to_string(dims) + " required");
    const std::uint64_t n = points.size();

    std::vector<double> estimates(m * g.size());
    std::vector<double> times(m);
    std::vector<std::uint64_t> negatives(m, 0);

    parallel_for(static_cast<std::size_t>(m), options.threads, [&](std::size_t r) {
        const auto t0 = Clock::now();
        Mrg32k3a rng = Mrg32k3a::stream(seed, options.common_randomization ? 1 : r + 1);
        const Randomization rand = points.draw(dims, rng);
        Stepper stepper(net, config);
        std::vector<double> x(x0.size()), u(dims);
        std::vector<double> sums(g.size(), 0.0);

        auto run_path = [&] {
            std::copy(x0.begin(), x0.end(), x.begin());
            for (int j = 0; j < config.steps; ++j)
                if (!stepper.advance(x, std::span<const double>(u).subspan(static_cast<std::size_t>(j) * d, d)))
                    ++negatives[r];
            for (std::size_t q = 0; q < g.size(); ++q)
                sums[q] += g[q](x);
        };

        if (points.is_lattice()) {
            const LatticeRule& rule = points.lattice();
            const bool fold = rand.kind == Randomization::Kind::shift_baker;
            std::vector<std::uint64_t> residue(dims, 0);
            for (std::uint64_t i = 0; i < n; ++i) {
                for (std::size_t c = 0; c < dims; ++c) {
                    double v = static_cast<double>(residue[c]) / static_cast<double>(n) + rand.shift[c];
                    if (v >= 1)
                        v -= 1;
                    u[c] = fold ? baker(v) : v;
                    residue[c] += rule.a[c];
                    if (residue[c] >= n)
                        residue[c] -= n;
                }
                run_path();
            }
        } else {
            // Gray-code enumeration of the scrambled net: one XOR per coordinate.
            const DigitalNetB2 net_s = scramble(points.net().slice(0, dims), rand);
            std::vector<std::uint32_t> word(rand.digital.begin(), rand.digital.begin() + static_cast<std::ptrdiff_t>(dims));
            for (std::uint64_t i = 0; i < n; ++i) {
                if (i > 0) {
                    const int bit = std::countr_zero(i);
                    for (std::size_t c = 0; c < dims; ++c)
                        word[c] ^= net_s.columns(c)[static_cast<std::size_t>(bit)];
                }
                for (std::size_t c = 0; c < dims; ++c)
                    u[c] = (word[c] + 0.5) * DigitalNetB2::scale;
                run_path();
            }
        }
        for (std::size_t q = 0; q < g.size(); ++q)
            estimates[r * g.size() + q] = sums[q] / static_cast<double>(n);
        times[r] = seconds_since(t0);
    });

    EstimatorOutput out;
    out.n = n;
    out.m = m;
    out.replicates = estimates;
    for (std::size_t q = 0; q < g.size(); ++q) {
        std::vector<double> col(m);
        for (std::uint64_t r = 0; r < m; ++r)
            col[r] = estimates[r * g.size() + q];
        double mean = 0, var = 0;
        sample_moments(col, mean, var);
        out.mean.push_back(mean);
        out.var_mu_hat.push_back(var);
        out.var_per_run.push_back(var * static_cast<double>(n));
    }
    double total = 0;
    for (double t : times)
        total += t;
    out.elapsed = total / static_cast<double>(m);
    for (auto v : negatives)
        out.negative_events += v;
    return out;
}

}  // namespace arqmc
