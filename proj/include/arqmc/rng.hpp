#pragma once

#include <array>
#include <cstdint>

namespace arqmc {

/*!
 * Combined multiple recursive generator MRG32k3a with stream and substream
 * jump-ahead (streams are 2^127 apart, substreams 2^76 apart).
 *
 * A generator remembers the start of its current substream so that
 * next_substream() can advance to the following one.
 */
class Mrg32k3a {
  public:
    using State = std::array<std::uint64_t, 6>;

    static constexpr std::uint64_t m1 = 4294967087u;
    static constexpr std::uint64_t m2 = 4294944443u;

    // Canonical default seed: all six components 12345.
    Mrg32k3a();
    explicit Mrg32k3a(const State& seed);

    // Generator for stream `index` of the family rooted at a 64-bit seed.
    static Mrg32k3a stream(std::uint64_t seed, std::uint64_t index);
    // Root state derived from a 64-bit seed (always a valid MRG state).
    static State seed_state(std::uint64_t seed);

    // Uniform in (0,1).
    double next();
    // Uniform 31-bit word.
    std::uint32_t next_word();

    // Jump to the start of substream `index` counted from the stream start.
    Mrg32k3a substream(std::uint64_t index) const;
    void next_substream();
    void reset_substream();

    const State& state() const { return state_; }

  private:
    State stream_start_;
    State substream_start_;
    State state_;
};

}  // namespace arqmc
