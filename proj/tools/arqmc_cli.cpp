// Command-line front end: simulate, experiment, points, fit.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "arqmc/harness.hpp"
#include "arqmc/model.hpp"
#include "arqmc/points.hpp"
#include "arqmc/sort.hpp"

namespace {

using namespace arqmc;

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

struct SimulateArgs {
    std::string model = "rev-iso";
    std::vector<std::string> g;
    std::string method = "arrayrqmc";
    std::string points = "lat";
    std::string sort = "oslaif";
    int log2_n = 13;
    std::uint64_t m = 20;
    std::uint64_t seed = 1;
    unsigned threads = 1;
    double horizon = 0;
    int steps = 0;
    std::string mode;
};

int simulate(const SimulateArgs& a)
{
    ModelSpec model = load_model(a.model);
    if (a.horizon > 0)
        model.config.horizon = a.horizon;
    if (a.steps > 0)
        model.config.steps = a.steps;
    if (!a.mode.empty())
        model.config.mode = parse_state_mode(a.mode);
    std::vector<Functional> g;
    for (const auto& s : a.g)
        g.push_back(parse_functional(s, model.network));
    if (g.empty())
        g.push_back(model.g);

    const Method method = parse_method(a.method);
    const std::uint64_t n = std::uint64_t(1) << a.log2_n;
    std::shared_ptr<const Sorter> sorter;
    if (method == Method::arrayrqmc) {
        SorterContext ctx{&model.network, model.x0, model.config, g, a.seed};
        sorter = make_sorter(sorter_json_from_short(a.sort), ctx);
    }
    const EstimatorOutput out =
        run_method(model, g, method, parse_point_family(a.points), sorter, n, a.m, a.seed, a.threads);

    std::printf("model %s, method %s, n = %llu, m = %llu, T = %g, s = %d, mode %s\n", model.name.c_str(),
                a.method.c_str(), static_cast<unsigned long long>(out.n), static_cast<unsigned long long>(out.m),
                model.config.horizon, model.config.steps, to_string(model.config.mode).c_str());
    if (sorter)
        std::printf("sort %s, points %s\n", sorter->name().c_str(), a.points.c_str());
    std::printf("%-14s %18s %16s %16s %10s\n", "g", "mean", "var_mu_hat", "log2_var", "var/run");
    for (std::size_t q = 0; q < g.size(); ++q)
        std::printf("%-14s %18.10g %16.6g %16.4f %10.6g\n", to_string(g[q]).c_str(), out.mean[q],
                    out.var_mu_hat[q], std::log2(out.var_mu_hat[q]), out.var_per_run[q]);
    std::printf("elapsed %.3f s%s, negative events %llu\n", out.elapsed,
                method == Method::mc ? "" : " per replication", static_cast<unsigned long long>(out.negative_events));
    return 0;
}

int experiment(const std::string& config_path, const std::string& out_dir)
{
    const ExperimentConfig config = ExperimentConfig::from_json(read_file(config_path));
    const ExperimentResult r = run_experiment(config, out_dir);
    std::size_t failed = 0;
    for (const auto& row : r.rows)
        failed += row.status != "ok";
    for (const auto& s : r.series) {
        if (s.fit)
            std::printf("%-10s %-10s %-6s %-28s beta_hat %.3f  r2 %.4f\n", s.g.c_str(), s.method.c_str(),
                        s.pointset.c_str(), s.sort.c_str(), s.fit->beta_hat, s.fit->r2);
    }
    std::printf("%zu rows (%zu failed) written to %s\n", r.rows.size(), failed, out_dir.c_str());
    return failed ? 2 : 0;
}

int points(const std::string& family_text, std::uint64_t n, std::size_t dim, bool criterion, std::uint64_t show)
{
    const PointFamily family = parse_point_family(family_text);
    const PointSet ps = make_point_set(family, n, dim);
    if (ps.is_lattice()) {
        std::printf("lattice n = %llu, a =", static_cast<unsigned long long>(n));
        for (auto a : ps.lattice().a)
            std::printf(" %llu", static_cast<unsigned long long>(a));
        std::printf("\n");
        if (criterion)
            std::printf("P_2 = %.10g\n", p_alpha_discrepancy(ps.lattice(), WeightsSpec{}));
    } else {
        std::printf("digital net n = 2^%d, dim = %zu, ranks:", ps.net().k(), ps.dimension());
        for (std::size_t j = 0; j < ps.dimension(); ++j)
            std::printf(" %d", ps.net().rank(j));
        std::printf("\n");
        if (criterion)
            std::printf("(criterion is defined for lattices only)\n");
    }
    for (std::uint64_t i = 0; i < std::min(show, ps.size()); ++i) {
        for (std::size_t j = 0; j < ps.dimension(); ++j)
            std::printf(j ? " %.10f" : "%.10f", ps.coordinate(i, j));
        std::printf("\n");
    }
    return 0;
}

int fit(const std::string& csv_path)
{
    for (const auto& s : fit_csv(read_file(csv_path))) {
        std::printf("%-10s %-10s %-6s %-28s", s.g.c_str(), s.method.c_str(), s.pointset.c_str(), s.sort.c_str());
        if (s.fit)
            std::printf(" beta_hat %.4f  kappa %.4g  r2 %.4f\n", s.fit->beta_hat, s.fit->kappa, s.fit->r2);
        else
            std::printf(" (fewer than 3 usable points)\n");
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Tau-leaping simulation with Monte Carlo, RQMC and Array-RQMC"};
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* s = app.add_subcommand("simulate", "estimate E[g(X_s)] for one model and method");
    s->add_option("--model", sim.model, "built-in name or JSON document")->capture_default_str();
    s->add_option("--g", sim.g, "functional(s): X1, X2^2, X1>300, or species names");
    s->add_option("--method", sim.method, "mc | crqmc | arrayrqmc")->capture_default_str();
    s->add_option("--points", sim.points, "lat | lat-baker | net")->capture_default_str();
    s->add_option("--sort", sim.sort, "oslaif | coordinate:<i> | batch:<i,j>[:<a,b>] | hilbert[:bits] | JSON")
        ->capture_default_str();
    s->add_option("--n", sim.log2_n, "log2 of the number of points / paths")->check(CLI::Range(1, 30))
        ->capture_default_str();
    s->add_option("--m", sim.m, "replications")->capture_default_str();
    s->add_option("--seed", sim.seed)->capture_default_str();
    s->add_option("--threads", sim.threads, "0: all cores")->capture_default_str();
    s->add_option("--horizon", sim.horizon, "override T");
    s->add_option("--steps", sim.steps, "override s");
    s->add_option("--mode", sim.mode, "integer | real");

    std::string config_path, out_dir = "results";
    auto* e = app.add_subcommand("experiment", "run a method x point set x sort x n grid");
    e->add_option("--config", config_path, "experiment JSON")->required();
    e->add_option("--out", out_dir, "output directory")->capture_default_str();

    std::string family = "lat";
    std::uint64_t n = 1024, show = 0;
    std::size_t dim = 2;
    bool criterion = false;
    auto* p = app.add_subcommand("points", "construct and print a point set");
    p->add_option("--family", family, "lat | lat-baker | net")->capture_default_str();
    p->add_option("--n", n, "number of points")->capture_default_str();
    p->add_option("--dim", dim, "dimension")->capture_default_str();
    p->add_flag("--criterion", criterion, "print the lattice P_2 criterion");
    p->add_option("--show", show, "print the first k points")->capture_default_str();

    std::string csv_path;
    auto* f = app.add_subcommand("fit", "fit Var ~ kappa n^-beta per series of a results CSV");
    f->add_option("--csv", csv_path)->required();

    CLI11_PARSE(app, argc, argv);
    try {
        if (*s)
            return simulate(sim);
        if (*e)
            return experiment(config_path, out_dir);
        if (*p)
            return points(family, n, dim, criterion, show);
        if (*f)
            return fit(csv_path);
    } catch (const std::exception& ex) {
        std::fprintf(stderr, "error: %s\n", ex.what());
        return 1;
    }
    return 0;
}
