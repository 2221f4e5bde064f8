#include "arqmc/rng.hpp"

#include <stdexcept>

namespace arqmc {

namespace {

using Mat = std::array<std::array<std::uint64_t, 3>, 3>;

constexpr std::int64_t a12 = 1403580;
constexpr std::int64_t a13n = 810728;
constexpr std::int64_t a21 = 527612;
constexpr std::int64_t a23n = 1370589;
constexpr double norm = 2.328306549295727688e-10;  // 1/(m1+1)

Mat mat_mul(const Mat& a, const Mat& b, std::uint64_t m)
{
    Mat c{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            unsigned __int128 s = 0;
            for (int k = 0; k < 3; ++k)
                s += static_cast<unsigned __int128>(a[i][k]) * b[k][j];
            c[i][j] = static_cast<std::uint64_t>(s % m);
        }
    return c;
}

Mat identity()
{
    Mat r{};
    for (int i = 0; i < 3; ++i)
        r[i][i] = 1;
    return r;
}

Mat mat_pow(Mat base, std::uint64_t e, std::uint64_t m)
{
    Mat r = identity();
    while (e) {
        if (e & 1)
            r = mat_mul(r, base, m);
        base = mat_mul(base, base, m);
        e >>= 1;
    }
    return r;
}

Mat square_times(Mat a, int times, std::uint64_t m)
{
    for (int i = 0; i < times; ++i)
        a = mat_mul(a, a, m);
    return a;
}

// One-step transition matrices acting on (x_{n-3}, x_{n-2}, x_{n-1}).
const Mat& base1()
{
    static const Mat a{{{0, 1, 0}, {0, 0, 1}, {Mrg32k3a::m1 - a13n, a12, 0}}};
    return a;
}

const Mat& base2()
{
    static const Mat a{{{0, 1, 0}, {0, 0, 1}, {Mrg32k3a::m2 - a23n, 0, a21}}};
    return a;
}

struct Jumps {
    Mat sub1, sub2;        // 2^76 steps
    Mat stream1, stream2;  // 2^127 steps
};

const Jumps& jumps()
{
    static const Jumps j{square_times(base1(), 76, Mrg32k3a::m1),
                         square_times(base2(), 76, Mrg32k3a::m2),
                         square_times(base1(), 127, Mrg32k3a::m1),
                         square_times(base2(), 127, Mrg32k3a::m2)};
    return j;
}

Mrg32k3a::State apply(const Mat& j1, const Mat& j2, const Mrg32k3a::State& s)
{
    Mrg32k3a::State r{};
    for (int i = 0; i < 3; ++i) {
        unsigned __int128 t1 = 0, t2 = 0;
        for (int k = 0; k < 3; ++k) {
            t1 += static_cast<unsigned __int128>(j1[i][k]) * s[k];
            t2 += static_cast<unsigned __int128>(j2[i][k]) * s[3 + k];
        }
        r[i] = static_cast<std::uint64_t>(t1 % Mrg32k3a::m1);
        r[3 + i] = static_cast<std::uint64_t>(t2 % Mrg32k3a::m2);
    }
    return r;
}

std::uint64_t splitmix64(std::uint64_t& x)
{
    std::uint64_t z = (x += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

void check_seed(const Mrg32k3a::State& s)
{
    for (int i = 0; i < 3; ++i)
        if (s[i] >= Mrg32k3a::m1 || s[3 + i] >= Mrg32k3a::m2)
            throw std::invalid_argument("Mrg32k3a: seed component out of range");
    if ((s[0] | s[1] | s[2]) == 0 || (s[3] | s[4] | s[5]) == 0)
        throw std::invalid_argument("Mrg32k3a: seed component triple is all zero");
}

}  // namespace

Mrg32k3a::Mrg32k3a() : Mrg32k3a(State{12345, 12345, 12345, 12345, 12345, 12345}) {}

Mrg32k3a::Mrg32k3a(const State& seed)
    : stream_start_(seed), substream_start_(seed), state_(seed)
{
    check_seed(seed);
}

Mrg32k3a::State Mrg32k3a::seed_state(std::uint64_t seed)
{
    std::uint64_t x = seed;
    State s{};
    do {
        for (int i = 0; i < 3; ++i)
            s[i] = splitmix64(x) % m1;
    } while ((s[0] | s[1] | s[2]) == 0);
    do {
        for (int i = 3; i < 6; ++i)
            s[i] = splitmix64(x) % m2;
    } while ((s[3] | s[4] | s[5]) == 0);
    return s;
}

Mrg32k3a Mrg32k3a::stream(std::uint64_t seed, std::uint64_t index)
{
    const State root = seed_state(seed);
    const Jumps& j = jumps();
    return Mrg32k3a(apply(mat_pow(j.stream1, index, m1), mat_pow(j.stream2, index, m2), root));
}

double Mrg32k3a::next()
{
    std::int64_t p1 = (a12 * static_cast<std::int64_t>(state_[1])
                       - a13n * static_cast<std::int64_t>(state_[0]))
                      % static_cast<std::int64_t>(m1);
    if (p1 < 0)
        p1 += m1;
    state_[0] = state_[1];
    state_[1] = state_[2];
    state_[2] = static_cast<std::uint64_t>(p1);

    std::int64_t p2 = (a21 * static_cast<std::int64_t>(state_[5])
                       - a23n * static_cast<std::int64_t>(state_[3]))
                      % static_cast<std::int64_t>(m2);
    if (p2 < 0)
        p2 += m2;
    state_[3] = state_[4];
    state_[4] = state_[5];
    state_[5] = static_cast<std::uint64_t>(p2);

    return p1 > p2 ? static_cast<double>(p1 - p2) * norm
                   : static_cast<double>(p1 - p2 + static_cast<std::int64_t>(m1)) * norm;
}

std::uint32_t Mrg32k3a::next_word()
{
    return static_cast<std::uint32_t>(next() * 2147483648.0) & 0x7fffffffu;
}

Mrg32k3a Mrg32k3a::substream(std::uint64_t index) const
{
    const Jumps& j = jumps();
    Mrg32k3a r = *this;
    r.substream_start_ = apply(mat_pow(j.sub1, index, m1), mat_pow(j.sub2, index, m2), stream_start_);
    r.state_ = r.substream_start_;
    return r;
}

void Mrg32k3a::next_substream()
{
    const Jumps& j = jumps();
    substream_start_ = apply(j.sub1, j.sub2, substream_start_);
    state_ = substream_start_;
}

void Mrg32k3a::reset_substream()
{
    state_ = substream_start_;
}

}  // namespace arqmc
