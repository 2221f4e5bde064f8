#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "arqmc/sort.hpp"

namespace arqmc {

namespace {

using Word = std::uint64_t;

// Skilling, "Programming the Hilbert curve" (2004): axes <-> transposed index.
void axes_to_transpose(std::vector<Word>& x, int bits)
{
    const std::size_t n = x.size();
    const Word top = Word(1) << (bits - 1);
    for (Word q = top; q > 1; q >>= 1) {
        const Word p = q - 1;
        for (std::size_t i = 0; i < n; ++i) {
            if (x[i] & q) {
                x[0] ^= p;
            } else {
                const Word t = (x[0] ^ x[i]) & p;
                x[0] ^= t;
                x[i] ^= t;
            }
        }
    }
    for (std::size_t i = 1; i < n; ++i)
        x[i] ^= x[i - 1];
    Word t = 0;
    for (Word q = top; q > 1; q >>= 1)
        if (x[n - 1] & q)
            t ^= q - 1;
    for (auto& v : x)
        v ^= t;
}

void transpose_to_axes(std::vector<Word>& x, int bits)
{
    const std::size_t n = x.size();
    const Word end = Word(2) << (bits - 1);
    Word t = x[n - 1] >> 1;
    for (std::size_t i = n - 1; i > 0; --i)
        x[i] ^= x[i - 1];
    x[0] ^= t;
    for (Word q = 2; q != end; q <<= 1) {
        const Word p = q - 1;
        for (std::size_t i = n; i-- > 0;) {
            if (x[i] & q) {
                x[0] ^= p;
            } else {
                t = (x[0] ^ x[i]) & p;
                x[0] ^= t;
                x[i] ^= t;
            }
        }
    }
}

void check_grid(std::size_t dims, int bits)
{
    if (dims < 1 || bits < 1)
        throw std::invalid_argument("hilbert: need at least one axis and one bit");
    if (static_cast<std::size_t>(bits) * dims > 62)
        throw std::invalid_argument("hilbert: grid overflow (bits * dims > 62)");
}

}  // namespace

std::uint64_t hilbert_index(std::span<const std::uint32_t> cell, int bits)
{
    check_grid(cell.size(), bits);
    std::vector<Word> x(cell.begin(), cell.end());
    for (Word v : x)
        if (v >> bits)
            throw std::invalid_argument("hilbert: cell coordinate outside the grid");
    axes_to_transpose(x, bits);
    Word index = 0;
    for (int b = bits - 1; b >= 0; --b)
        for (Word v : x)
            index = (index << 1) | ((v >> b) & 1);
    return index;
}

std::vector<std::uint32_t> hilbert_cell(std::uint64_t index, std::size_t dims, int bits)
{
    check_grid(dims, bits);
    std::vector<Word> x(dims, 0);
    int shift = bits * static_cast<int>(dims);
    for (int b = bits - 1; b >= 0; --b)
        for (std::size_t i = 0; i < dims; ++i)
            x[i] |= ((index >> --shift) & 1) << b;
    transpose_to_axes(x, bits);
    return {x.begin(), x.end()};
}

int default_hilbert_bits(std::uint64_t n, std::size_t dims)
{
    if (dims < 1)
        throw std::invalid_argument("hilbert: dims must be positive");
    const int log2n = n <= 1 ? 0 : std::bit_width(n - 1);  // ceil(log2 n)
    const int per_axis = (log2n + static_cast<int>(dims) - 1) / static_cast<int>(dims) + 4;
    return std::min(per_axis, static_cast<int>(62 / dims));
}

std::vector<std::uint32_t> hilbert_sort(std::span<const double> states, std::size_t width, const HilbertSpec& spec,
                                        std::size_t step)
{
    if (width < 2)
        throw std::invalid_argument("hilbert sort needs at least two coordinates; use an importance sort");
    if (spec.stats.width != width)
        throw std::invalid_argument("hilbert sort: pilot statistics do not match the state width");
    if (step > spec.stats.steps())
        throw std::invalid_argument("hilbert sort: no pilot statistics for step " + std::to_string(step));
    const std::size_t n = states.size() / width;
    const int bits = spec.bits > 0 ? spec.bits : default_hilbert_bits(n, width);
    check_grid(width, bits);
    const double scale = std::ldexp(1.0, bits);
    const double* mu = spec.stats.mean.data() + step * width;
    const double* sd = spec.stats.sd.data() + step * width;

    std::vector<std::pair<std::uint64_t, std::uint32_t>> keyed(n);
    std::vector<std::uint32_t> cell(width);
    for (std::size_t c = 0; c < n; ++c) {
        for (std::size_t i = 0; i < width; ++i) {
            const double x = states[c * width + i];
            if (!std::isfinite(x))
                throw std::runtime_error("hilbert sort: non-finite state coordinate");
            cell[i] = static_cast<std::uint32_t>(std::floor(scale * logistic_map(x, mu[i], sd[i])));
        }
        keyed[c] = {hilbert_index(cell, bits), static_cast<std::uint32_t>(c)};
    }
    std::sort(keyed.begin(), keyed.end());
    std::vector<std::uint32_t> perm(n);
    for (std::size_t c = 0; c < n; ++c)
        perm[c] = keyed[c].second;
    return perm;
}

std::string HilbertSorter::name() const
{
    return spec_.bits > 0 ? "hilbert:" + std::to_string(spec_.bits) : "hilbert";
}

std::vector<std::uint32_t> HilbertSorter::order(std::span<const double> states, std::size_t width,
                                                std::size_t step) const
{
    return hilbert_sort(states, width, spec_, step);
}

}  // namespace arqmc
