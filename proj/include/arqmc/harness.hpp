#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "arqmc/chain.hpp"
#include "arqmc/model.hpp"
#include "arqmc/points.hpp"
#include "arqmc/sort.hpp"

namespace arqmc {

// Var[mu_hat_n] ~ kappa n^-beta.
struct FitResult {
    double beta_hat = 0;
    double kappa = 0;
    double r2 = 0;
};

// OLS of log2 var on log2 n over (n, var) pairs; needs >= 3 pairs, var > 0.
FitResult fit_beta(const std::vector<std::pair<double, double>>& pairs);

// Var[g(X_s)] / (n Var[mu_hat_n]).
double vrf(double mc_var_per_run, double n, double var_mu_hat);
// vrf * (MC time) / (method time) at equal n.
double eif(double vrf, double mc_time, double method_time);

enum class Method { mc, crqmc, arrayrqmc };
std::string to_string(Method m);
Method parse_method(const std::string& text);

// One estimate with any method. The sorter is only used by arrayrqmc; point
// sets are built here (construction time is not part of `elapsed`).
EstimatorOutput run_method(const ModelSpec& model, const std::vector<Functional>& g, Method method,
                           PointFamily family, const std::shared_ptr<const Sorter>& sorter, std::uint64_t n,
                           std::uint64_t m, std::uint64_t seed, unsigned threads = 1,
                           const PointSetOptions& point_options = {});

struct ExperimentConfig {
    std::string model = "rev-iso";  // built-in name or document path
    std::vector<std::string> functionals;  // empty: the model's default
    std::vector<Method> methods{Method::mc, Method::arrayrqmc};
    std::vector<PointFamily> families{PointFamily::lattice_shift};
    std::vector<std::string> sorters{"oslaif"};  // JSON or short form
    std::vector<std::uint64_t> n_values;   // powers of two
    std::uint64_t m = 20;
    std::uint64_t mc_n = 100000;
    std::uint64_t seed = 1;
    unsigned threads = 1;
    bool timing = true;  // false: elapsed 0 and EIF NA, so reruns are byte-identical
    std::optional<double> horizon;
    std::optional<int> steps;
    std::optional<StateMode> mode;
    std::string lattice_cache;
    WeightsSpec weights;

    void validate() const;
    // Keys: model, functional(s), methods, families, sorters, n | log2_n | grid
    // ("desk" or "full"), m, mc_n, seed, threads, timing, horizon, steps, mode,
    // lattice_cache, rho.
    static ExperimentConfig from_json(const std::string& text);
};

struct ResultRow {
    std::string model, g, method, pointset, sort;
    std::uint64_t n = 0, m = 0;
    double mean = 0, var_mu_hat = 0;
    std::optional<double> beta_hat, vrf, eif;
    double elapsed = 0;
    std::uint64_t negative_events = 0;
    std::string status = "ok";  // or the error that stopped the cell
};

struct SeriesSummary {
    std::string g, method, pointset, sort;
    std::vector<std::uint64_t> n;
    std::vector<double> var_mu_hat;
    std::optional<FitResult> fit;
};

struct ExperimentResult {
    std::vector<ResultRow> rows;
    std::vector<SeriesSummary> series;
    std::vector<double> mc_var_per_run;  // baseline, one per functional

    std::string csv() const;
    std::string summary_json() const;
};

const std::vector<std::string>& result_columns();

// Runs every cell; a failing cell yields a row with its error in `status`.
// Writes results.csv and summary.json when `out_dir` is not empty.
ExperimentResult run_experiment(const ExperimentConfig& config, const std::string& out_dir = "");

// Re-fits beta over the series of a results.csv document.
std::vector<SeriesSummary> fit_csv(const std::string& csv_text);

}  // namespace arqmc
