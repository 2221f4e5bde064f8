#include "arqmc/harness.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "arqmc/array_rqmc.hpp"
#include "arqmc/csv.hpp"

namespace arqmc {

namespace {

using json = nlohmann::ordered_json;

std::string number(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string optional_number(const std::optional<double>& v)
{
    return v ? number(*v) : "NA";
}

// FNV-1a: derives a cell's seed from its label so cells do not shift when the grid grows.
std::uint64_t cell_seed(std::uint64_t seed, const std::string& label)
{
    std::uint64_t h = 14695981039346656037ull ^ seed;
    for (unsigned char c : label) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

bool power_of_two(std::uint64_t n)
{
    return n && !(n & (n - 1));
}

}  // namespace

FitResult fit_beta(const std::vector<std::pair<double, double>>& pairs)
{
    if (pairs.size() < 3)
        throw std::invalid_argument("fit_beta: at least 3 (n, var) pairs are required");
    double sx = 0, sy = 0;
    for (const auto& [n, v] : pairs) {
        if (!(n > 0) || !(v > 0) || !std::isfinite(v))
            throw std::invalid_argument("fit_beta: n and var must be positive");
        sx += std::log2(n);
        sy += std::log2(v);
    }
    const double k = static_cast<double>(pairs.size());
    const double mx = sx / k, my = sy / k;
    double sxx = 0, sxy = 0, syy = 0;
    for (const auto& [n, v] : pairs) {
        const double dx = std::log2(n) - mx, dy = std::log2(v) - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx == 0)
        throw std::invalid_argument("fit_beta: all n are equal");
    const double slope = sxy / sxx;
    FitResult r;
    r.beta_hat = -slope;
    r.kappa = std::exp2(my - slope * mx);
    r.r2 = syy == 0 ? 1.0 : sxy * sxy / (sxx * syy);
    return r;
}

double vrf(double mc_var_per_run, double n, double var_mu_hat)
{
    if (!(mc_var_per_run > 0) || !(n > 0) || !(var_mu_hat > 0))
        throw std::invalid_argument("vrf: inputs must be positive");
    return mc_var_per_run / (n * var_mu_hat);
}

double eif(double vrf_value, double mc_time, double method_time)
{
    if (!(vrf_value > 0) || !(mc_time > 0) || !(method_time > 0))
        throw std::invalid_argument("eif: inputs must be positive");
    return vrf_value * mc_time / method_time;
}

std::string to_string(Method m)
{
    switch (m) {
    case Method::mc:
        return "mc";
    case Method::crqmc:
        return "crqmc";
    case Method::arrayrqmc:
        return "arrayrqmc";
    }
    return "?";
}

Method parse_method(const std::string& text)
{
    if (text == "mc")
        return Method::mc;
    if (text == "crqmc" || text == "rqmc")
        return Method::crqmc;
    if (text == "arrayrqmc" || text == "array-rqmc")
        return Method::arrayrqmc;
    throw std::invalid_argument("unknown method '" + text + "' (mc | crqmc | arrayrqmc)");
}

EstimatorOutput run_method(const ModelSpec& model, const std::vector<Functional>& g, Method method,
                           PointFamily family, const std::shared_ptr<const Sorter>& sorter, std::uint64_t n,
                           std::uint64_t m, std::uint64_t seed, unsigned threads,
                           const PointSetOptions& point_options)
{
    RunOptions opts;
    opts.threads = threads;
    const std::size_t d = model.network.reaction_count();
    switch (method) {
    case Method::mc:
        return mc_estimate(model.network, model.x0, model.config, g, n, seed, opts);
    case Method::crqmc: {
        const std::size_t dims = static_cast<std::size_t>(model.config.steps) * d;
        return crqmc_estimate(model.network, model.x0, model.config, g,
                              make_point_set(family, n, dims, point_options), m, seed, opts);
    }
    case Method::arrayrqmc: {
        if (!sorter)
            throw std::invalid_argument("arrayrqmc needs a sorter");
        ArrayRqmcPlan plan;
        plan.net = model.network;
        plan.x0 = model.x0;
        plan.config = model.config;
        plan.g = g;
        plan.sorter = sorter;
        plan.points = make_point_set(family, n, sorter->sort_dimension() + d, point_options);
        plan.m = m;
        plan.seed = seed;
        plan.threads = threads;
        return run_replicated(plan);
    }
    }
    throw std::invalid_argument("unknown method");
}

void ExperimentConfig::validate() const
{
    if (methods.empty())
        throw std::invalid_argument("experiment: no methods");
    if (m < 2)
        throw std::invalid_argument("experiment: m must be at least 2");
    if (mc_n < 2)
        throw std::invalid_argument("experiment: mc_n must be at least 2");
    for (auto n : n_values)
        if (n < 2 || !power_of_two(n))
            throw std::invalid_argument("experiment: n values must be powers of two >= 2");
    weights.validate();
}

ExperimentConfig ExperimentConfig::from_json(const std::string& text)
{
    const json doc = json::parse(text);
    ExperimentConfig c;
    c.model = doc.value("model", c.model);
    if (doc.contains("functional"))
        c.functionals = {doc["functional"].get<std::string>()};
    if (doc.contains("functionals"))
        c.functionals = doc["functionals"].get<std::vector<std::string>>();
    if (doc.contains("methods")) {
        c.methods.clear();
        for (const auto& s : doc["methods"])
            c.methods.push_back(parse_method(s.get<std::string>()));
    }
    if (doc.contains("families")) {
        c.families.clear();
        for (const auto& s : doc["families"])
            c.families.push_back(parse_point_family(s.get<std::string>()));
    }
    if (doc.contains("sorters")) {
        c.sorters.clear();
        for (const auto& s : doc["sorters"])
            c.sorters.push_back(s.is_string() ? s.get<std::string>() : s.dump());
    }
    const std::string grid = doc.value("grid", std::string("desk"));
    if (grid != "desk" && grid != "full")
        throw std::invalid_argument("experiment: grid must be 'desk' or 'full'");
    const int lo = grid == "full" ? 13 : 10, hi = grid == "full" ? 19 : 16;
    for (int k = lo; k <= hi; ++k)
        c.n_values.push_back(std::uint64_t(1) << k);
    if (grid == "full") {
        c.m = 100;
        c.mc_n = 1000000;
    }
    if (doc.contains("log2_n")) {
        c.n_values.clear();
        for (const auto& k : doc["log2_n"])
            c.n_values.push_back(std::uint64_t(1) << k.get<int>());
    }
    if (doc.contains("n"))
        c.n_values = doc["n"].get<std::vector<std::uint64_t>>();
    c.m = doc.value("m", c.m);
    c.mc_n = doc.value("mc_n", c.mc_n);
    c.seed = doc.value("seed", c.seed);
    c.threads = doc.value("threads", c.threads);
    c.timing = doc.value("timing", c.timing);
    if (doc.contains("horizon"))
        c.horizon = doc["horizon"].get<double>();
    if (doc.contains("steps"))
        c.steps = doc["steps"].get<int>();
    if (doc.contains("mode"))
        c.mode = parse_state_mode(doc["mode"].get<std::string>());
    c.lattice_cache = doc.value("lattice_cache", c.lattice_cache);
    c.weights.rho = doc.value("rho", c.weights.rho);
    c.validate();
    return c;
}

const std::vector<std::string>& result_columns()
{
    static const std::vector<std::string> cols{"model", "g",         "method",   "pointset", "sort",
                                               "n",     "m",         "mean",     "var_mu_hat", "beta_hat",
                                               "vrf",   "eif",       "elapsed",  "negative_events", "status"};
    return cols;
}

std::string ExperimentResult::csv() const
{
    std::ostringstream os;
    write_csv_row(os, result_columns());
    for (const ResultRow& r : rows) {
        const bool ok = r.status == "ok";
        write_csv_row(os, {r.model, r.g, r.method, r.pointset, r.sort, std::to_string(r.n), std::to_string(r.m),
                           ok ? number(r.mean) : "NA", ok ? number(r.var_mu_hat) : "NA",
                           optional_number(r.beta_hat), optional_number(r.vrf), optional_number(r.eif),
                           number(r.elapsed), std::to_string(r.negative_events), r.status});
    }
    return os.str();
}

std::string ExperimentResult::summary_json() const
{
    json doc;
    doc["model"] = rows.empty() ? "" : rows.front().model;
    doc["mc_var_per_run"] = mc_var_per_run;
    json arr = json::array();
    for (const SeriesSummary& s : series) {
        json e;
        e["g"] = s.g;
        e["method"] = s.method;
        e["pointset"] = s.pointset;
        e["sort"] = s.sort;
        e["n"] = s.n;
        json lv = json::array();
        for (double v : s.var_mu_hat)
            lv.push_back(v > 0 ? json(std::log2(v)) : json(nullptr));
        e["log2_var_mu_hat"] = lv;
        if (s.fit) {
            e["beta_hat"] = s.fit->beta_hat;
            e["kappa"] = s.fit->kappa;
            e["r2"] = s.fit->r2;
        } else {
            e["beta_hat"] = nullptr;
        }
        arr.push_back(e);
    }
    doc["series"] = arr;
    return doc.dump(2) + "\n";
}

namespace {

std::vector<SeriesSummary> group_series(std::vector<ResultRow>& rows, bool write_back)
{
    std::vector<SeriesSummary> series;
    std::map<std::string, std::size_t> index;
    std::vector<std::vector<std::size_t>> members;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const ResultRow& r = rows[i];
        if (r.sort == "baseline")
            continue;
        const std::string key = r.g + "\x1f" + r.method + "\x1f" + r.pointset + "\x1f" + r.sort;
        auto [it, fresh] = index.emplace(key, series.size());
        if (fresh) {
            series.push_back({r.g, r.method, r.pointset, r.sort, {}, {}, std::nullopt});
            members.emplace_back();
        }
        if (r.status != "ok")
            continue;
        series[it->second].n.push_back(r.n);
        series[it->second].var_mu_hat.push_back(r.var_mu_hat);
        members[it->second].push_back(i);
    }
    for (std::size_t s = 0; s < series.size(); ++s) {
        std::vector<std::pair<double, double>> pairs;
        for (std::size_t k = 0; k < series[s].n.size(); ++k)
            if (series[s].var_mu_hat[k] > 0)
                pairs.emplace_back(static_cast<double>(series[s].n[k]), series[s].var_mu_hat[k]);
        if (pairs.size() >= 3) {
            series[s].fit = fit_beta(pairs);
            if (write_back)
                for (std::size_t i : members[s])
                    rows[i].beta_hat = series[s].fit->beta_hat;
        }
    }
    return series;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config, const std::string& out_dir)
{
    config.validate();
    ModelSpec model = load_model(config.model);
    if (config.horizon)
        model.config.horizon = *config.horizon;
    if (config.steps)
        model.config.steps = *config.steps;
    if (config.mode)
        model.config.mode = *config.mode;
    model.config.validate();

    std::vector<Functional> g;
    for (const auto& s : config.functionals)
        g.push_back(parse_functional(s, model.network));
    if (g.empty())
        g.push_back(model.g);

    PointSetOptions point_options;
    point_options.weights = config.weights;
    point_options.lattice_cache = config.lattice_cache;

    ExperimentResult result;
    auto add_rows = [&](const std::string& method, const std::string& pointset, const std::string& sort,
                        std::uint64_t n, std::uint64_t m, const EstimatorOutput* est, const std::string& status) {
        for (std::size_t q = 0; q < g.size(); ++q) {
            ResultRow r;
            r.model = model.name;
            r.g = to_string(g[q]);
            r.method = method;
            r.pointset = pointset;
            r.sort = sort;
            r.n = n;
            r.m = m;
            r.status = status;
            if (est) {
                r.mean = est->mean[q];
                r.var_mu_hat = est->var_mu_hat[q];
                r.elapsed = config.timing ? est->elapsed : 0.0;
                r.negative_events = est->negative_events;
            }
            result.rows.push_back(std::move(r));
        }
    };

    // MC baseline: one large run; the per-n MC series follows as Var/n.
    const EstimatorOutput base = mc_estimate(model.network, model.x0, model.config, g, config.mc_n, config.seed,
                                             RunOptions{config.threads, false});
    result.mc_var_per_run = base.var_per_run;
    const std::size_t base_first = result.rows.size();
    add_rows("mc", "none", "baseline", config.mc_n, 1, &base, "ok");
    for (std::size_t q = 0; q < g.size(); ++q) {
        result.rows[base_first + q].vrf = 1.0;
        if (config.timing)
            result.rows[base_first + q].eif = 1.0;
    }
    const double mc_time_per_path = base.elapsed / static_cast<double>(config.mc_n);

    bool other_methods = false;
    for (Method m : config.methods)
        other_methods = other_methods || m != Method::mc;

    for (Method method : config.methods) {
        if (method == Method::mc) {
            if (!other_methods)
                continue;
            for (std::uint64_t n : config.n_values) {
                EstimatorOutput analytic = base;
                for (std::size_t q = 0; q < g.size(); ++q)
                    analytic.var_mu_hat[q] = base.var_per_run[q] / static_cast<double>(n);
                analytic.elapsed = mc_time_per_path * static_cast<double>(n);
                analytic.negative_events = 0;
                const std::size_t first = result.rows.size();
                add_rows("mc", "none", "analytic", n, 1, &analytic, "ok");
                for (std::size_t q = first; q < result.rows.size(); ++q) {
                    result.rows[q].vrf = 1.0;
                    if (config.timing)
                        result.rows[q].eif = 1.0;
                }
            }
            continue;
        }
        for (PointFamily family : config.families) {
            std::vector<std::pair<std::string, std::shared_ptr<const Sorter>>> sorters;
            std::vector<std::string> sorter_errors;
            if (method == Method::arrayrqmc) {
                for (const auto& spec : config.sorters) {
                    std::string label = spec;
                    try {
                        SorterContext ctx{&model.network, model.x0, model.config, g, config.seed};
                        auto s = make_sorter(sorter_json_from_short(spec), ctx);
                        label = s->name();
                        sorters.emplace_back(label, s);
                        sorter_errors.emplace_back();
                    } catch (const std::exception& e) {
                        sorters.emplace_back(label, nullptr);
                        sorter_errors.emplace_back(e.what());
                    }
                }
            } else {
                sorters.emplace_back("none", nullptr);
                sorter_errors.emplace_back();
            }
            for (std::size_t si = 0; si < sorters.size(); ++si) {
                const auto& [label, sorter] = sorters[si];
                for (std::uint64_t n : config.n_values) {
                    const std::string cell = to_string(method) + "|" + to_string(family) + "|" + label + "|"
                                             + std::to_string(n);
                    if (!sorter_errors[si].empty()) {
                        add_rows(to_string(method), to_string(family), label, n, config.m, nullptr,
                                 "error: " + sorter_errors[si]);
                        continue;
                    }
                    try {
                        const EstimatorOutput est = run_method(model, g, method, family, sorter, n, config.m,
                                                               cell_seed(config.seed, cell), config.threads,
                                                               point_options);
                        const std::size_t first = result.rows.size();
                        add_rows(to_string(method), to_string(family), label, n, config.m, &est, "ok");
                        for (std::size_t q = 0; q < g.size(); ++q) {
                            ResultRow& r = result.rows[first + q];
                            if (!(r.var_mu_hat > 0) || !(base.var_per_run[q] > 0))
                                continue;
                            r.vrf = vrf(base.var_per_run[q], static_cast<double>(n), r.var_mu_hat);
                            if (config.timing && est.elapsed > 0 && mc_time_per_path > 0)
                                r.eif = eif(*r.vrf, mc_time_per_path * static_cast<double>(n), est.elapsed);
                        }
                    } catch (const std::exception& e) {
                        add_rows(to_string(method), to_string(family), label, n, config.m, nullptr,
                                 std::string("error: ") + e.what());
                    }
                }
            }
        }
    }

    result.series = group_series(result.rows, true);

    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        std::ofstream(std::filesystem::path(out_dir) / "results.csv", std::ios::binary) << result.csv();
        std::ofstream(std::filesystem::path(out_dir) / "summary.json", std::ios::binary) << result.summary_json();
    }
    return result;
}

std::vector<SeriesSummary> fit_csv(const std::string& csv_text)
{
    std::istringstream in(csv_text);
    const auto table = read_csv(in);
    if (table.empty())
        throw std::invalid_argument("fit: empty CSV");
    std::map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < table[0].size(); ++i)
        col[table[0][i]] = i;
    for (const char* need : {"g", "method", "pointset", "sort", "n", "var_mu_hat"})
        if (!col.count(need))
            throw std::invalid_argument(std::string("fit: missing column '") + need + "'");
    std::vector<ResultRow> rows;
    for (std::size_t i = 1; i < table.size(); ++i) {
        const auto& t = table[i];
        if (t.size() != table[0].size())
            throw std::invalid_argument("fit: row " + std::to_string(i + 1) + " has the wrong field count");
        ResultRow r;
        r.g = t[col["g"]];
        r.method = t[col["method"]];
        r.pointset = t[col["pointset"]];
        r.sort = t[col["sort"]];
        r.n = std::stoull(t[col["n"]]);
        const std::string v = t[col["var_mu_hat"]];
        if (col.count("status") && t[col["status"]] != "ok")
            r.status = t[col["status"]];
        if (v == "NA")
            r.status = "missing";
        else
            r.var_mu_hat = std::stod(v);
        rows.push_back(std::move(r));
    }
    return group_series(rows, false);
}

}  // namespace arqmc
