#include <cmath>
#include <numeric>
#include <vector>

#include <doctest.h>

#include "arqmc/model.hpp"
#include "arqmc/sort.hpp"

using namespace arqmc;

namespace {

std::vector<std::uint32_t> iota_perm(std::size_t n)
{
    std::vector<std::uint32_t> p(n);
    std::iota(p.begin(), p.end(), 0u);
    return p;
}

}  // namespace

TEST_CASE("importance sort: small cases")
{
    const auto h = coordinate_importance(0);
    CHECK(h.name() == "coordinate:X1");
    CHECK(sort_by_importance(std::vector<double>{3, 1, 2}, 1, h) == std::vector<std::uint32_t>{1, 2, 0});
    CHECK(sort_by_importance(std::vector<double>{1, 2, 3, 4}, 1, h) == iota_perm(4));
    CHECK(sort_by_importance(std::vector<double>{5, 5, 5}, 1, h) == iota_perm(3));
    CHECK(sort_by_importance(std::vector<double>{7}, 1, h) == iota_perm(1));
    CHECK_THROWS_AS(sort_by_importance(std::vector<double>{1, NAN}, 1, h), std::runtime_error);
}

TEST_CASE("one-step look-ahead: Schloegl")
{
    const ModelSpec s = builtin_model("schloegl-1d");
    const double tau = s.config.tau();
    const auto h = oslaif(s.network, s.g, tau);
    for (double x1 : {0.0, 1.0, 250.0, 580.0}) {
        const std::vector<double> x{x1, 1e5, 2e5};
        const double a1 = 3e-7 * x1 * (x1 - 1) / 2 * 1e5;
        const double a2 = 1e-4 * x1 * (x1 - 1) * (x1 - 2) / 6;
        const double a3 = 1e-3 * 2e5;
        const double a4 = 3.5 * x1;
        CHECK(h(x) == doctest::Approx(x1 + tau * (a1 - a2 + a3 - a4)).epsilon(1e-13));
    }
}

TEST_CASE("one-step look-ahead: PKA")
{
    const ModelSpec p = builtin_model("pka");
    const double tau = p.config.tau();
    const std::vector<double> x{33000, 33030, 1100, 1100, 1090, 1120};
    const double c1 = 2.6255e-6, c2 = 0.02, c5 = 0.016, c6 = 5.1325e-5;
    CHECK(oslaif(p.network, Functional::coordinate(0), tau)(x)
          == doctest::Approx(x[0] + tau * (-c1 * x[0] * x[1] * (x[1] - 1) / 2 + c2 * x[2])).epsilon(1e-13));
    CHECK(oslaif(p.network, Functional::coordinate(4), tau)(x)
          == doctest::Approx(x[4] + tau * (c5 * x[3] - 0.5 * c6 * x[4] * x[5] * (x[5] - 1))).epsilon(1e-13));
    CHECK(oslaif(p.network, Functional::coordinate(4), tau).name() == "oslaif:X5");
}

TEST_CASE("one-step look-ahead: indicator and errors")
{
    const ModelSpec iso = builtin_model("rev-iso");
    const auto h = oslaif(iso.network, Functional::indicator(0, 100), 0.2);
    // One-step mean 100, variance 40: P(X > 100) ~ 1 - Phi(0.5 / sqrt(40)).
    CHECK(h(iso.x0) == doctest::Approx(0.5 - 0.0315).epsilon(0.01));
    CHECK(h(std::vector<double>{200, 1e6}) > h(iso.x0));
    CHECK_THROWS(oslaif(iso.network, Functional::coordinate(5), 0.2));
    CHECK_THROWS(oslaif(iso.network, Functional{Functional::Kind::power, 0, 4, 0}, 0.2));
}

TEST_CASE("batch sort: hand example and degenerate case")
{
    const std::vector<double> s{0, 3, 1, 0, 0, 0, 1, 2};
    const BatchSpec spec{{0, 1}, {0.5, 0.5}};
    CHECK(spec.batch_counts(4) == std::vector<std::uint64_t>{2, 2});
    CHECK(batch_sort(s, 2, spec) == std::vector<std::uint32_t>{2, 0, 1, 3});

    const std::vector<double> t{4, 1, 3, 1, 2};
    CHECK(batch_sort(t, 1, BatchSpec{{0}, {1.0}}) == sort_by_importance(t, 1, coordinate_importance(0)));

    CHECK(BatchSpec{{0, 1, 2}, {0.5, 0.25, 0.25}}.batch_counts(1 << 16)
          == std::vector<std::uint64_t>{256, 16, 16});
    CHECK(BatchSpec{{0, 1}, {0.5, 0.5}}.batch_counts(1000)[0] == 32);  // ceil(31.6)
    CHECK_THROWS(BatchSpec({{0, 1}, {0.5, 0.6}}).validate(2));
    CHECK_THROWS(BatchSpec({{0, 3}, {0.5, 0.5}}).validate(2));
    CHECK_THROWS(BatchSpec({{0}, {-1.0}}).validate(2));
}

TEST_CASE("logistic map")
{
    CHECK(logistic_map(100, 100, 10) == doctest::Approx(1 / (1 + std::exp(-0.5))));
    double prev = 0;
    for (double x = -1e6; x <= 1e6; x += 1e4) {
        const double v = logistic_map(x, 0, 50);
        CHECK(v > 0);
        CHECK(v < 1);
        CHECK(v >= prev);
        prev = v;
    }
}

TEST_CASE("Hilbert curve: first order and grid limits")
{
    const std::vector<std::vector<std::uint32_t>> want{{0, 0}, {0, 1}, {1, 1}, {1, 0}};
    for (std::uint64_t i = 0; i < 4; ++i) {
        CHECK(hilbert_cell(i, 2, 1) == want[i]);
        CHECK(hilbert_index(want[i], 1) == i);
    }
    CHECK_THROWS(hilbert_index(std::vector<std::uint32_t>{0, 0, 0}, 21));
    CHECK(default_hilbert_bits(1 << 16, 2) == 12);
    CHECK(default_hilbert_bits(1 << 16, 6) == 7);
    CHECK(default_hilbert_bits(1 << 16, 31) == 2);
}

TEST_CASE("pilot statistics")
{
    const ModelSpec iso = builtin_model("rev-iso");
    const PilotStats a = pilot_stats(iso.network, iso.x0, iso.config, 4096, 11);
    const PilotStats b = pilot_stats(iso.network, iso.x0, iso.config, 4096, 11);
    CHECK(a.mean == b.mean);
    CHECK(a.sd == b.sd);
    CHECK(a.steps() == 8);
    CHECK(a.mean[0] == 100);
    CHECK(a.sd[0] == pilot_sd_floor);
    const double se = a.sd[8 * 2] / std::sqrt(4096.0);
    CHECK(std::fabs(a.mean[8 * 2] - 100) < 4 * se);

    ReactionNetwork still = parse_network(R"doc({"species": ["A", "B"],
      "reactions": [{"alpha": [1, 0], "beta": [0, 1], "c": 0}]})doc");
    const PilotStats z = pilot_stats(still, std::vector<double>{3, 4}, SimConfig{1, 3}, 16, 1);
    for (std::size_t j = 0; j <= 3; ++j) {
        CHECK(z.mean[2 * j] == 3);
        CHECK(z.sd[2 * j + 1] == pilot_sd_floor);
    }
}

TEST_CASE("Hilbert sort: ties keep index order")
{
    const ModelSpec iso = builtin_model("rev-iso");
    HilbertSpec spec{4, pilot_stats(iso.network, iso.x0, iso.config, 256, 3)};
    const std::vector<double> same{100, 1e6, 100, 1e6, 100, 1e6};
    CHECK(hilbert_sort(same, 2, spec, 0) == iota_perm(3));
    CHECK_THROWS(hilbert_sort(std::vector<double>{1, 2}, 1, spec, 0));
    CHECK_THROWS(hilbert_sort(same, 2, spec, 9));
}

TEST_CASE("sorter factory")
{
    const ModelSpec pka = builtin_model("pka");
    SorterContext ctx{&pka.network, pka.x0, pka.config, {Functional::coordinate(0)}, 5};
    CHECK(make_sorter(sorter_json_from_short("oslaif"), ctx)->name() == "oslaif:X1");
    CHECK(make_sorter(sorter_json_from_short("coordinate:6"), ctx)->name() == "coordinate:X6");
    CHECK(make_sorter(R"doc({"kind": "coordinate", "coord": "PKAc"})doc", ctx)->name() == "coordinate:X6");
    const auto avg = make_sorter(sorter_json_from_short("oslaif:X1,X5"), ctx);
    CHECK(avg->name().rfind("average(", 0) == 0);
    const auto batch = make_sorter(sorter_json_from_short("batch:1,2:0.5,0.5"), ctx);
    CHECK(batch->sort_dimension() == 2);
    CHECK(make_sorter(sorter_json_from_short("batch:6"), ctx)->sort_dimension() == 1);
    CHECK_THROWS(make_sorter(R"doc({"kind": "quicksort"})doc", ctx));
    CHECK_THROWS(make_sorter(R"doc({"kind": "coordinate", "coord": 7})doc", ctx));
    CHECK_THROWS(make_sorter(R"doc({"kind": "batch", "order": [1, 2], "exponents": [0.9, 0.9]})doc", ctx));
}

TEST_CASE("point pre-ordering")
{
    const ModelSpec pka = builtin_model("pka");
    SorterContext ctx{&pka.network, pka.x0, pka.config, {Functional::coordinate(0)}, 5};
    const auto one = make_sorter(sorter_json_from_short("oslaif"), ctx);
    const std::vector<double> w{0, 0.25, 0.5, 0.75};
    CHECK(presort_points(w, 4, 1, *one) == iota_perm(4));
    CHECK_THROWS(presort_points(w, 2, 2, *one));

    const auto two = make_sorter(sorter_json_from_short("batch:1,2"), ctx);
    const std::vector<double> pts{0.9, 0.1, 0.2, 0.8, 0.6, 0.3, 0.1, 0.5};
    CHECK(presort_points(pts, 4, 2, *two) == batch_sort(pts, 2, BatchSpec{{0, 1}, {0.5, 0.5}}));
}
