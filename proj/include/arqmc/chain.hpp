#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "arqmc/config.hpp"
#include "arqmc/network.hpp"
#include "arqmc/points.hpp"
#include "arqmc/rng.hpp"

namespace arqmc {

// Keeps a uniform strictly inside (0,1) before inversion.
inline double open_unit(double u)
{
    constexpr double lo = 0x1p-54;
    constexpr double hi = 1.0 - 0x1p-53;
    return u < lo ? lo : (u > hi ? hi : u);
}

// One tau-leap transition x <- x + sum_k F^{-1}(u_k) zeta_k, reusing buffers.
class Stepper {
  public:
    Stepper(const ReactionNetwork& net, const SimConfig& config);

    // Advances x in place; returns false if the new state has a negative entry
    // (throws NegativeStateError under abort_replication).
    bool advance(std::span<double> x, std::span<const double> u);

    std::size_t dimension() const { return net_->reaction_count(); }

  private:
    const ReactionNetwork* net_;
    double tau_;
    StateMode mode_;
    NegativePolicy policy_;
    std::vector<double> rates_;
    std::vector<double> counts_;
};

StateVector step(const ReactionNetwork& net, const StateVector& x, std::span<const double> u, double tau,
                 StateMode mode = StateMode::integer);

struct PathResult {
    StateVector x;
    std::uint64_t negative_events = 0;
};

// Supplies the d uniforms of each step in order.
using CoordinateSource = std::function<void(int step, std::span<double> u)>;

PathResult simulate_path(const ReactionNetwork& net, std::span<const double> x0, const SimConfig& config,
                         const CoordinateSource& coords);
PathResult simulate_path(const ReactionNetwork& net, std::span<const double> x0, const SimConfig& config,
                         Mrg32k3a& rng);

struct EstimatorOutput {
    std::vector<double> mean;         // one entry per functional
    std::vector<double> var_per_run;  // Var[g(X_s)]
    std::vector<double> var_mu_hat;   // Var[mu_hat_n]
    std::uint64_t n = 0;
    std::uint64_t m = 1;
    double elapsed = 0;  // MC: total seconds; RQMC: mean seconds per replication
    std::uint64_t negative_events = 0;
    std::vector<double> replicates;  // RQMC: the m estimates, replication-major
};

struct RunOptions {
    unsigned threads = 1;
    // Every replication reuses the first randomization (determinism probe).
    bool common_randomization = false;
};

// Plain Monte Carlo; path i uses substream i of stream 0 of `seed`.
EstimatorOutput mc_estimate(const ReactionNetwork& net, std::span<const double> x0, const SimConfig& config,
                            const std::vector<Functional>& g, std::uint64_t n, std::uint64_t seed,
                            const RunOptions& options = {});

// Classical RQMC: an (s*d)-dimensional point set, coordinates consumed
// time-major and reaction-minor; m independent randomizations.
EstimatorOutput crqmc_estimate(const ReactionNetwork& net, std::span<const double> x0, const SimConfig& config,
                               const std::vector<Functional>& g, const PointSet& points, std::uint64_t m,
                               std::uint64_t seed, const RunOptions& options = {});

// Mean and unbiased variance of a sample.
void sample_moments(std::span<const double> v, double& mean, double& var);

}  // namespace arqmc
