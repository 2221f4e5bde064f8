#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "arqmc/chain.hpp"
#include "arqmc/config.hpp"
#include "arqmc/network.hpp"
#include "arqmc/points.hpp"
#include "arqmc/sort.hpp"

namespace arqmc {

struct ArrayRqmcPlan {
    ReactionNetwork net;
    std::vector<double> x0;
    SimConfig config;
    std::vector<Functional> g;
    std::shared_ptr<const Sorter> sorter;
    PointSet points;  // n points, at least l + d dimensions
    std::uint64_t m = 2;
    std::uint64_t seed = 0;
    unsigned threads = 1;
    // Every replication reuses the first randomization (determinism probe).
    bool common_randomization = false;

    std::size_t sort_dimension() const { return sorter ? sorter->sort_dimension() : 1; }
    void validate() const;
};

// What one sort-randomize-advance round looked like; handed to observers.
struct StepView {
    std::size_t step = 0;
    std::size_t width = 0;                  // state length
    std::span<const double> states;         // X_{., step} before the move, n rows
    std::span<const std::uint32_t> perm;    // chain paired with ordered point i
    std::span<const double> sort_coords;    // first l coordinates of ordered point i
    std::span<const double> uniforms;       // last d randomized coordinates of point i
};

using StepObserver = std::function<void(const StepView&)>;

struct ReplicationResult {
    std::vector<double> estimate;  // one per functional
    std::uint64_t negative_events = 0;
    double elapsed = 0;
};

// Point order matching the sorter; points have at least l + d coordinates.
std::vector<std::uint32_t> presort_points(const PointSet& points, const Sorter& sorter, std::size_t d);

// One run of the array algorithm using randomization stream `replication + 1`.
ReplicationResult run_once(const ArrayRqmcPlan& plan, std::uint64_t replication,
                           const StepObserver& observer = {});

// m independent replications; variance is the sample variance of the estimates.
EstimatorOutput run_replicated(const ArrayRqmcPlan& plan);

}  // namespace arqmc
