#include "arqmc/array_rqmc.hpp"

#include <chrono>
#include <numeric>
#include <stdexcept>

#include "arqmc/parallel.hpp"

namespace arqmc {

namespace {

using Clock = std::chrono::steady_clock;

constexpr std::size_t chain_block = 2048;

// Replication-independent part of a plan: point order and the fixed coordinates.
struct Prepared {
    std::size_t n = 0, l = 0, d = 0;
    std::vector<std::uint32_t> order;
    std::vector<double> sort_coords;    // n x l, never randomized
    std::vector<double> lattice_base;   // n x d, lattice only
};

Prepared prepare(const ArrayRqmcPlan& plan)
{
    plan.validate();
    Prepared p;
    p.n = static_cast<std::size_t>(plan.points.size());
    p.l = plan.sort_dimension();
    p.d = plan.net.reaction_count();
    p.order = presort_points(plan.points, *plan.sorter, p.d);
    p.sort_coords.resize(p.n * p.l);
    for (std::size_t i = 0; i < p.n; ++i)
        for (std::size_t c = 0; c < p.l; ++c)
            p.sort_coords[i * p.l + c] = plan.points.coordinate(p.order[i], c);
    if (plan.points.is_lattice()) {
        p.lattice_base.resize(p.n * p.d);
        for (std::size_t i = 0; i < p.n; ++i)
            for (std::size_t c = 0; c < p.d; ++c)
                p.lattice_base[i * p.d + c] = plan.points.coordinate(p.order[i], p.l + c);
    }
    return p;
}

ReplicationResult run_prepared(const ArrayRqmcPlan& plan, const Prepared& p, std::uint64_t replication,
                               const StepObserver& observer)
{
    const auto t0 = Clock::now();
    const std::size_t n = p.n, d = p.d, width = plan.x0.size();
    Mrg32k3a rng = Mrg32k3a::stream(plan.seed, plan.common_randomization ? 1 : replication + 1);

    // Nets: LMS on the last d coordinates once per replication; XOR shift per step.
    std::vector<std::uint32_t> words;
    if (!plan.points.is_lattice()) {
        const Randomization lms = random_lms_shift(d, rng);
        const DigitalNetB2 scrambled = scramble(plan.points.net().slice(p.l, d), lms);
        words.resize(n * d);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t c = 0; c < d; ++c)
                words[i * d + c] = scrambled.word(p.order[i], c);
    }
    const bool fold = plan.points.family() == PointFamily::lattice_baker;

    std::vector<double> states(n * width), next(n * width), u(n * d);
    for (std::size_t i = 0; i < n; ++i)
        std::copy(plan.x0.begin(), plan.x0.end(), states.begin() + static_cast<std::ptrdiff_t>(i * width));

    const std::size_t blocks = (n + chain_block - 1) / chain_block;
    std::vector<std::uint64_t> negatives(blocks, 0);
    std::vector<std::uint32_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0u);

    for (std::size_t step = 0; step < static_cast<std::size_t>(plan.config.steps); ++step) {
        if (n > 1)
            perm = plan.sorter->order(states, width, step);
        if (plan.points.is_lattice()) {
            const Randomization r = random_shift(d, rng);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t c = 0; c < d; ++c) {
                    double v = p.lattice_base[i * d + c] + r.shift[c];
                    if (v >= 1)
                        v -= 1;
                    u[i * d + c] = fold ? baker(v) : v;
                }
        } else {
            const Randomization r = random_digital_shift(d, rng);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t c = 0; c < d; ++c)
                    u[i * d + c] = ((words[i * d + c] ^ r.digital[c]) + 0.5) * DigitalNetB2::scale;
        }
        if (observer)
            observer(StepView{step, width, states, perm, p.sort_coords, u});

        parallel_for(blocks, plan.threads, [&](std::size_t b) {
            Stepper stepper(plan.net, plan.config);
            const std::size_t hi = std::min(n, (b + 1) * chain_block);
            for (std::size_t i = b * chain_block; i < hi; ++i) {
                const auto from = states.begin() + static_cast<std::ptrdiff_t>(perm[i] * width);
                std::copy(from, from + static_cast<std::ptrdiff_t>(width),
                          next.begin() + static_cast<std::ptrdiff_t>(i * width));
                if (!stepper.advance(std::span<double>(next).subspan(i * width, width),
                                     std::span<const double>(u).subspan(i * d, d)))
                    ++negatives[b];
            }
        });
        states.swap(next);
    }

    ReplicationResult out;
    out.estimate.assign(plan.g.size(), 0.0);
    for (std::size_t q = 0; q < plan.g.size(); ++q) {
        double s = 0;
        for (std::size_t i = 0; i < n; ++i)
            s += plan.g[q](std::span<const double>(states).subspan(i * width, width));
        out.estimate[q] = s / static_cast<double>(n);
    }
    for (auto v : negatives)
        out.negative_events += v;
    out.elapsed = std::chrono::duration<double>(Clock::now() - t0).count();
    return out;
}

}  // namespace

void ArrayRqmcPlan::validate() const
{
    config.validate();
    if (!sorter)
        throw std::invalid_argument("array-rqmc: no sorter given");
    if (x0.size() != net.species_count())
        throw std::invalid_argument("array-rqmc: initial state length differs from species count");
    if (g.empty())
        throw std::invalid_argument("array-rqmc: at least one functional is required");
    for (const Functional& f : g)
        if (f.index >= net.species_count())
            throw std::invalid_argument("array-rqmc: functional refers to a species outside the state");
    const std::size_t need = sort_dimension() + net.reaction_count();
    if (points.dimension() < need)
        throw std::invalid_argument("array-rqmc: point set has " + std::to_string(points.dimension())
                                    + " dimensions, sorter and reactions need " + std::to_string(need));
    if (points.size() < 1 || points.size() > (std::uint64_t(1) << 32))
        throw std::invalid_argument("array-rqmc: unsupported number of chains");
}

std::vector<std::uint32_t> presort_points(const PointSet& points, const Sorter& sorter, std::size_t d)
{
    const std::size_t l = sorter.sort_dimension();
    if (l + d > points.dimension())
        throw std::invalid_argument("presort_points: l + d = " + std::to_string(l + d)
                                    + " exceeds the point dimension " + std::to_string(points.dimension()));
    const std::size_t n = static_cast<std::size_t>(points.size());
    std::vector<double> coords(n * l);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < l; ++c)
            coords[i * l + c] = points.coordinate(i, c);
    return presort_points(coords, n, l, sorter);
}

ReplicationResult run_once(const ArrayRqmcPlan& plan, std::uint64_t replication, const StepObserver& observer)
{
    return run_prepared(plan, prepare(plan), replication, observer);
}

EstimatorOutput run_replicated(const ArrayRqmcPlan& plan)
{
    if (plan.m < 2)
        throw std::invalid_argument("array-rqmc: m must be at least 2");
    const Prepared p = prepare(plan);
    const std::size_t q_count = plan.g.size();

    EstimatorOutput out;
    out.n = p.n;
    out.m = plan.m;
    out.replicates.resize(plan.m * q_count);
    double total_time = 0;
    for (std::uint64_t r = 0; r < plan.m; ++r) {
        const ReplicationResult res = run_prepared(plan, p, r, {});
        for (std::size_t q = 0; q < q_count; ++q)
            out.replicates[r * q_count + q] = res.estimate[q];
        out.negative_events += res.negative_events;
        total_time += res.elapsed;
    }
    for (std::size_t q = 0; q < q_count; ++q) {
        std::vector<double> col(plan.m);
        for (std::uint64_t r = 0; r < plan.m; ++r)
            col[r] = out.replicates[r * q_count + q];
        double mean = 0, var = 0;
        sample_moments(col, mean, var);
        out.mean.push_back(mean);
        out.var_mu_hat.push_back(var);
        out.var_per_run.push_back(var * static_cast<double>(p.n));
    }
    out.elapsed = total_time / static_cast<double>(plan.m);
    return out;
}

}  // namespace arqmc
