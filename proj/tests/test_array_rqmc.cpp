#include <algorithm>
#include <cmath>
#include <vector>

#include <doctest.h>

#include "arqmc/array_rqmc.hpp"
#include "arqmc/model.hpp"

using namespace arqmc;

namespace {

ArrayRqmcPlan plan_for(const std::string& model, const std::string& sorter, PointFamily family, std::uint64_t n)
{
    const ModelSpec spec = builtin_model(model);
    ArrayRqmcPlan plan;
    plan.net = spec.network;
    plan.x0 = spec.x0;
    plan.config = spec.config;
    plan.g = {spec.g};
    SorterContext ctx{&plan.net, plan.x0, plan.config, plan.g, 3};
    plan.sorter = make_sorter(sorter_json_from_short(sorter), ctx);
    plan.points = make_point_set(family, n, plan.sort_dimension() + plan.net.reaction_count());
    plan.m = 4;
    plan.seed = 17;
    return plan;
}

}  // namespace

TEST_CASE("each step pairs sorted chains with sorted points")
{
    for (PointFamily f : {PointFamily::lattice_shift, PointFamily::net_lms}) {
        ArrayRqmcPlan plan = plan_for("rev-iso", "oslaif", f, 256);
        const auto h = oslaif(plan.net, plan.g[0], plan.config.tau());
        std::size_t steps = 0;
        run_once(plan, 0, [&](const StepView& v) {
            ++steps;
            CHECK(v.width == 2);
            std::vector<std::uint32_t> p(v.perm.begin(), v.perm.end());
            std::sort(p.begin(), p.end());
            for (std::uint32_t i = 0; i < p.size(); ++i)
                REQUIRE(p[i] == i);
            for (std::size_t i = 1; i < v.perm.size(); ++i) {
                REQUIRE(h(v.states.subspan(v.perm[i - 1] * 2, 2)) <= h(v.states.subspan(v.perm[i] * 2, 2)));
                REQUIRE(v.sort_coords[i - 1] < v.sort_coords[i]);
            }
            for (double u : v.uniforms)
                REQUIRE((u > 0 && u < 1));
        });
        CHECK(steps == 8);
    }
}

TEST_CASE("batch sorter pairs blocks of states with blocks of points")
{
    ArrayRqmcPlan plan = plan_for("schloegl-2d", "batch:1,2", PointFamily::net_lms, 256);
    const BatchSpec spec{{0, 1}, {0.5, 0.5}};
    run_once(plan, 1, [&](const StepView& v) {
        CHECK(v.sort_coords.size() == 2 * 256);
        std::vector<double> c(v.sort_coords.begin(), v.sort_coords.end());
        // Points arrive already batch-sorted.
        std::vector<std::uint32_t> id(256);
        for (std::uint32_t i = 0; i < 256; ++i)
            id[i] = i;
        CHECK(batch_sort(c, 2, spec) == id);
    });
}

TEST_CASE("common randomization gives identical replicates")
{
    ArrayRqmcPlan plan = plan_for("rev-iso", "oslaif", PointFamily::lattice_baker, 128);
    plan.common_randomization = true;
    const EstimatorOutput out = run_replicated(plan);
    CHECK(out.var_mu_hat[0] == 0);
    CHECK(out.replicates.size() == 4);
    plan.common_randomization = false;
    CHECK(run_replicated(plan).var_mu_hat[0] > 0);
}

TEST_CASE("single chain")
{
    ArrayRqmcPlan plan = plan_for("rev-iso", "oslaif", PointFamily::net_lms, 1);
    const EstimatorOutput out = run_replicated(plan);
    CHECK(out.n == 1);
    CHECK(std::isfinite(out.mean[0]));
}

TEST_CASE("plan validation")
{
    ArrayRqmcPlan plan = plan_for("rev-iso", "oslaif", PointFamily::lattice_shift, 64);
    plan.points = make_point_set(PointFamily::lattice_shift, 64, 2);
    CHECK_THROWS_AS(run_replicated(plan), std::invalid_argument);
    plan = plan_for("rev-iso", "oslaif", PointFamily::lattice_shift, 64);
    plan.m = 1;
    CHECK_THROWS_AS(run_replicated(plan), std::invalid_argument);
    plan.m = 2;
    plan.x0 = {1};
    CHECK_THROWS_AS(run_replicated(plan), std::invalid_argument);
    plan = plan_for("rev-iso", "oslaif", PointFamily::lattice_shift, 64);
    CHECK_THROWS_AS(presort_points(plan.points, *plan.sorter, 3), std::invalid_argument);
}

TEST_CASE("replications are reproducible")
{
    ArrayRqmcPlan plan = plan_for("schloegl-1d", "oslaif", PointFamily::net_lms, 512);
    const auto a = run_replicated(plan);
    const auto b = run_replicated(plan);
    CHECK(a.replicates == b.replicates);
    plan.threads = 3;
    CHECK(run_replicated(plan).replicates == a.replicates);
    CHECK(run_once(plan, 2).estimate[0] == a.replicates[2]);
}
