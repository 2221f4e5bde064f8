#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <doctest.h>

#include "arqmc/csv.hpp"
#include "arqmc/harness.hpp"

using namespace arqmc;

TEST_CASE("rate fit recovers exact power laws")
{
    std::vector<std::pair<double, double>> one, two;
    for (int k = 10; k <= 16; ++k) {
        const double n = std::ldexp(1.0, k);
        one.emplace_back(n, 3.0 / n);
        two.emplace_back(n, 0.5 / (n * n));
    }
    const FitResult a = fit_beta(one);
    CHECK(a.beta_hat == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(a.kappa == doctest::Approx(3.0).epsilon(1e-10));
    CHECK(a.r2 == doctest::Approx(1.0));
    CHECK(fit_beta(two).beta_hat == doctest::Approx(2.0).epsilon(1e-12));
    CHECK_THROWS(fit_beta({{2, 1}, {4, 1}}));
    CHECK_THROWS(fit_beta({{2, 1}, {4, 0}, {8, 1}}));
    CHECK_THROWS(fit_beta({{4, 1}, {4, 2}, {4, 3}}));
}

TEST_CASE("rate fit of a reference lattice series")
{
    const double log_var[] = {-16.340588574087693, -17.741717596128925, -19.598164279319864, -21.64858120492211,
                              -22.95924957640198,  -25.20985723049743,  -27.013037523077085};
    std::vector<std::pair<double, double>> pts;
    for (int k = 13; k <= 19; ++k)
        pts.emplace_back(std::ldexp(1.0, k), std::exp2(log_var[k - 13]));
    CHECK(fit_beta(pts).beta_hat == doctest::Approx(1.80).epsilon(0.02 / 1.80));
}

TEST_CASE("variance reduction and efficiency factors")
{
    CHECK(vrf(107.8, 1024, 107.8 / 1024 / 500) == doctest::Approx(500));
    CHECK(eif(500, 2.0, 4.0) == 250);
    CHECK_THROWS(vrf(1, 0, 1));
    CHECK_THROWS(vrf(1, 2, 0));
    CHECK_THROWS(eif(1, 1, 0));
    CHECK(parse_method("crqmc") == Method::crqmc);
    CHECK(to_string(Method::arrayrqmc) == "arrayrqmc");
    CHECK_THROWS(parse_method("qmc"));
}

TEST_CASE("CSV quoting round trip")
{
    std::ostringstream os;
    const std::vector<std::string> row{"plain", "with,comma", "with \"quote\"", "two\nlines", ""};
    write_csv_row(os, row);
    write_csv_row(os, {"a", "b", "c", "d", "e"});
    CHECK(csv_escape("with,comma") == "\"with,comma\"");
    CHECK(os.str().find("\r\n") != std::string::npos);
    std::istringstream is(os.str());
    const auto rows = read_csv(is);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0] == row);
}

TEST_CASE("experiment config parsing")
{
    const auto c = ExperimentConfig::from_json(R"({"model": "pka", "functionals": ["X1", "X6"],
      "methods": ["mc", "crqmc"], "families": ["net"], "grid": "full", "m": 30})");
    CHECK(c.n_values.front() == 1 << 13);
    CHECK(c.n_values.back() == 1 << 19);
    CHECK(c.m == 30);
    CHECK(c.mc_n == 1000000);
    CHECK(c.functionals.size() == 2);
    CHECK(ExperimentConfig::from_json(R"({"log2_n": [4, 5]})").n_values == std::vector<std::uint64_t>{16, 32});
    CHECK_THROWS(ExperimentConfig::from_json(R"({"n": [12]})"));
    CHECK_THROWS(ExperimentConfig::from_json(R"({"grid": "huge"})"));
    CHECK_THROWS(ExperimentConfig::from_json(R"({"methods": ["mc", "sobol"]})"));
}

TEST_CASE("Monte Carlo only experiment has just the baseline row")
{
    ExperimentConfig c;
    c.methods = {Method::mc};
    c.n_values = {16, 32};
    c.mc_n = 2000;
    const ExperimentResult r = run_experiment(c);
    REQUIRE(r.rows.size() == 1);
    CHECK(r.rows[0].sort == "baseline");
    CHECK(*r.rows[0].vrf == 1);
    CHECK(std::fabs(r.rows[0].mean - 100) < 4 * std::sqrt(r.rows[0].var_mu_hat));
}

TEST_CASE("experiment output is reproducible and refits")
{
    ExperimentConfig c = ExperimentConfig::from_json(R"({"model": "rev-iso",
      "methods": ["mc", "crqmc", "arrayrqmc"], "families": ["lat", "net"], "sorters": ["oslaif"],
      "log2_n": [6, 7, 8, 9], "m": 5, "mc_n": 5000, "timing": false})");
    const auto dir = std::filesystem::temp_directory_path() / "arqmc_harness_test";
    std::filesystem::remove_all(dir);
    c.lattice_cache = (dir / "lat").string();
    const ExperimentResult a = run_experiment(c, (dir / "a").string());
    const ExperimentResult b = run_experiment(c, (dir / "b").string());
    CHECK(a.csv() == b.csv());
    CHECK(std::filesystem::exists(dir / "a" / "summary.json"));

    // baseline + 4 analytic + 2 families x 2 methods x 4 sizes
    CHECK(a.rows.size() == 1 + 4 + 16);
    for (const ResultRow& r : a.rows) {
        CHECK(r.status == "ok");
        CHECK(r.elapsed == 0);
        CHECK(!r.eif);
    }
    std::ifstream in(dir / "a" / "results.csv");
    std::stringstream text;
    text << in.rdbuf();
    CHECK(text.str() == a.csv());
    const auto series = fit_csv(text.str());
    CHECK(series.size() == a.series.size());
    for (const SeriesSummary& s : series) {
        REQUIRE(s.fit);
        if (s.sort == "analytic")
            CHECK(s.fit->beta_hat == doctest::Approx(1.0));
        else
            CHECK(s.fit->beta_hat > 0.8);
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("a failing cell is reported in its row")
{
    ExperimentConfig c;
    c.model = "rev-iso";
    c.methods = {Method::mc, Method::arrayrqmc};
    c.sorters = {"hilbert:40"};
    c.n_values = {16};
    c.m = 2;
    c.mc_n = 100;
    const ExperimentResult r = run_experiment(c);
    bool failed = false;
    for (const ResultRow& row : r.rows)
        failed = failed || row.status != "ok";
    CHECK(failed);
    CHECK(r.csv().find(",NA,") != std::string::npos);
}
