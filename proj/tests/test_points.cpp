#include <cmath>
#include <filesystem>
#include <numeric>

#include <doctest.h>

#include "arqmc/points.hpp"
#include "support/oracles.hpp"

using namespace arqmc;

TEST_CASE("Sobol' net: first dimensions by hand")
{
    const DigitalNetB2 net = default_direction_numbers().build(3, 3);
    const double d1[] = {0, .125, .25, .375, .5, .625, .75, .875};
    const double d2[] = {0, .5, .75, .25, .625, .125, .375, .875};
    for (std::uint64_t i = 0; i < 8; ++i) {
        CHECK(net.coordinate(i, 0) == d1[i]);
        CHECK(net.coordinate(i, 1) == d2[i]);
    }
    // Third dimension: m = (1, 3) and the recurrence give v3 = 3/8.
    CHECK(net.coordinate(4, 2) == 0.375);
    CHECK(net.coordinate(1, 2) == 0.5);
    CHECK(net.coordinate(2, 2) == 0.75);
    for (std::size_t j = 0; j < 3; ++j)
        CHECK(net.rank(j) == 3);
    CHECK(default_direction_numbers().max_dimension() == 21201);
}

TEST_CASE("direction-number text parsing")
{
    const auto dn = DirectionNumbers::parse("d s a m_i\n2 1 0 1\n3 2 1 1 3\n");
    CHECK(dn.max_dimension() == 3);
    CHECK(dn.build(4, 3).dimension() == 3);
    CHECK_THROWS(dn.build(4, 4));
    CHECK_THROWS(DirectionNumbers::parse("2 1 0 2\n"));    // m_1 must be odd
    CHECK_THROWS(DirectionNumbers::parse("2 1 0 1\n4 2 1 1 3\n"));  // gap in d
    CHECK_THROWS(DirectionNumbers::parse("2 2 1 1 5\n"));  // m_2 >= 2^2
}

TEST_CASE("net slices and words")
{
    const DigitalNetB2 net = default_direction_numbers().build(6, 8);
    const DigitalNetB2 tail = net.slice(3, 4);
    CHECK(tail.dimension() == 4);
    for (std::uint64_t i = 0; i < 64; ++i)
        for (std::size_t j = 0; j < 4; ++j)
            CHECK(tail.word(i, j) == net.word(i, j + 3));
    CHECK_THROWS(net.slice(6, 3));
}

TEST_CASE("lattice rules")
{
    const LatticeRule k = korobov_rule(101, 4, 12);
    CHECK(k.a == std::vector<std::uint64_t>{1, 12, 43, 11});
    CHECK(k.coordinate(5, 1) == doctest::Approx(60.0 / 101));
    CHECK_THROWS(LatticeRule{8, {1, 2}}.validate());

    const LatticeRule r = lattice_search(256, 6, WeightsSpec{});
    CHECK(r.a[0] == 1);
    for (auto a : r.a) {
        CHECK(a % 2 == 1);
        CHECK(a <= 128);
    }
    CHECK(p_alpha_discrepancy(r, WeightsSpec{}) < p_alpha_discrepancy(korobov_rule(256, 6, 3), WeightsSpec{}));
    CHECK(p_alpha_discrepancy(r, WeightsSpec{})
          == doctest::Approx(oracle::p2_subset_sum(256, r.a, 0.6)).epsilon(1e-12));
    CHECK_THROWS(lattice_search(1, 2, WeightsSpec{}));
    CHECK_THROWS(lattice_search(64, 2, WeightsSpec{1.5, 2}));
}

TEST_CASE("discrepancy by hand")
{
    const double pi2 = M_PI * M_PI;
    // A single point at the origin: rho * 2 pi^2 B2(0).
    CHECK(p_alpha_discrepancy(LatticeRule{1, {1}}, WeightsSpec{0.6, 2}) == doctest::Approx(0.6 * pi2 / 3));
    // Points 0 and 1/2 with unit weight: (2 pi^2 / 6 - 2 pi^2 / 12) / 2.
    CHECK(p_alpha_discrepancy(LatticeRule{2, {1}}, WeightsSpec{1.0, 2}) == doctest::Approx(pi2 / 12));
}

TEST_CASE("lattice cache is prefix consistent")
{
    const auto dir = std::filesystem::temp_directory_path() / "arqmc_lattice_cache_test";
    std::filesystem::remove_all(dir);
    const LatticeRule full = lattice_search(512, 5, WeightsSpec{});
    const LatticeRule three = cached_lattice(512, 3, WeightsSpec{}, dir.string());
    CHECK(std::vector<std::uint64_t>(full.a.begin(), full.a.begin() + 3) == three.a);
    CHECK(cached_lattice(512, 5, WeightsSpec{}, dir.string()) == full);
    CHECK(std::filesystem::exists(dir / "lattice_n512_rho0.6.json"));
    CHECK(cached_lattice(512, 2, WeightsSpec{}, dir.string()).a.size() == 2);
    std::filesystem::remove_all(dir);
}

TEST_CASE("randomizations")
{
    Mrg32k3a rng = Mrg32k3a::stream(3, 0);
    const LatticeRule rule = korobov_rule(64, 2, 19);
    Randomization s = random_shift(2, rng);
    const double want = std::fmod(rule.coordinate(9, 1) + s.shift[1], 1.0);
    CHECK(randomize(rule, s, 9, 1) == doctest::Approx(want).epsilon(1e-15));
    Randomization b = random_shift(2, rng, true);
    CHECK(randomize(rule, b, 9, 1) == baker(std::fmod(rule.coordinate(9, 1) + b.shift[1], 1.0)));
    CHECK(baker(0.25) == 0.5);
    CHECK(baker(0.75) == 0.5);
    CHECK(baker(1.0) == 0.0);

    const DigitalNetB2 net = default_direction_numbers().build(5, 3);
    const Randomization d = random_digital_shift(3, rng);
    CHECK(randomize(net, d, 7, 2) == (net.word(7, 2) ^ d.digital[2]) * DigitalNetB2::scale);
    CHECK_THROWS_AS(randomize(rule, d, 0, 0), std::invalid_argument);
    CHECK_THROWS_AS(randomize(net, s, 0, 0), std::invalid_argument);

    // LMS: unit lower-triangular rows keep every generating matrix at full rank.
    const Randomization l = random_lms_shift(3, rng);
    for (std::size_t j = 0; j < 3; ++j)
        for (int r = 0; r < DigitalNetB2::w; ++r) {
            const std::uint32_t row = l.lms[j][static_cast<std::size_t>(r)];
            CHECK((row >> (30 - r) & 1u) == 1u);                    // unit diagonal
            CHECK((row & ((1u << (30 - r)) - 1u)) == 0u);            // nothing right of it
        }
    const DigitalNetB2 scrambled = scramble(net, l);
    for (std::size_t j = 0; j < 3; ++j)
        CHECK(scrambled.rank(j) == 5);
    CHECK(randomize(net, l, 13, 1) == (scrambled.word(13, 1) ^ l.digital[1]) * DigitalNetB2::scale);
}

TEST_CASE("point-set factory")
{
    const PointSet lat = make_point_set(PointFamily::lattice_baker, 128, 3);
    CHECK(lat.is_lattice());
    CHECK(lat.family() == PointFamily::lattice_baker);
    CHECK(lat.size() == 128);
    const PointSet net = make_point_set(PointFamily::net_lms, 256, 5);
    CHECK(!net.is_lattice());
    CHECK(net.dimension() == 5);
    CHECK_THROWS(make_point_set(PointFamily::net_lms, 100, 2));
    CHECK(parse_point_family("lat-baker") == PointFamily::lattice_baker);
    CHECK(to_string(PointFamily::net_lms) == "net");
    CHECK_THROWS(parse_point_family("halton"));
}
