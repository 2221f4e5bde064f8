#include <set>
#include <stdexcept>

#include <doctest.h>

#include "arqmc/rng.hpp"
#include "support/oracles.hpp"

using namespace arqmc;

TEST_CASE("default generator reproduces the reference recurrence")
{
    Mrg32k3a g;
    oracle::PlainMrg ref({12345, 12345, 12345, 12345, 12345, 12345});
    CHECK(g.next() == 0.12701112204657714);
    ref.next();
    for (int i = 0; i < 10000; ++i)
        REQUIRE(g.next() == ref.next());
}

TEST_CASE("substream jump equals the published 2^76 matrices")
{
    const Mrg32k3a g;
    const auto want = oracle::jump(g.state(), oracle::a1p76, oracle::a2p76);
    CHECK(g.substream(1).state() == want);
    const auto want2 = oracle::jump(want, oracle::a1p76, oracle::a2p76);
    CHECK(g.substream(2).state() == want2);
}

TEST_CASE("second stream of the default seed")
{
    const std::array<std::uint64_t, 6> next{3692455944u, 1366884236u, 2968912127u,
                                            335948734u,  4161675175u, 475798818u};
    CHECK(oracle::jump(Mrg32k3a().state(), oracle::a1p127, oracle::a2p127) == next);
}

TEST_CASE("stream jump equals the published 2^127 matrices")
{
    for (std::uint64_t seed : {0ull, 1ull, 987654321ull}) {
        const auto s0 = Mrg32k3a::stream(seed, 0).state();
        CHECK(s0 == Mrg32k3a::seed_state(seed));
        const auto s1 = oracle::jump(s0, oracle::a1p127, oracle::a2p127);
        CHECK(Mrg32k3a::stream(seed, 1).state() == s1);
        CHECK(Mrg32k3a::stream(seed, 2).state() == oracle::jump(s1, oracle::a1p127, oracle::a2p127));
    }
}

TEST_CASE("substream walking")
{
    Mrg32k3a g = Mrg32k3a::stream(42, 3);
    const Mrg32k3a start = g;
    for (int i = 0; i < 5; ++i)
        g.next();
    g.reset_substream();
    CHECK(g.state() == start.state());
    for (std::uint64_t k = 1; k <= 4; ++k) {
        g.next();
        g.next_substream();
        CHECK(g.state() == start.substream(k).state());
    }
}

TEST_CASE("seeding and outputs")
{
    CHECK_THROWS_AS(Mrg32k3a(Mrg32k3a::State{0, 0, 0, 1, 1, 1}), std::invalid_argument);
    CHECK_THROWS_AS(Mrg32k3a(Mrg32k3a::State{1, 1, 1, Mrg32k3a::m2, 1, 1}), std::invalid_argument);
    std::set<std::array<std::uint64_t, 6>> distinct;
    for (std::uint64_t s = 0; s < 50; ++s)
        distinct.insert(Mrg32k3a::seed_state(s));
    CHECK(distinct.size() == 50);

    Mrg32k3a g = Mrg32k3a::stream(7, 0);
    for (int i = 0; i < 1000; ++i) {
        const double u = g.next();
        CHECK((u > 0 && u < 1));
        CHECK(g.next_word() < (1u << 31));
    }
}
