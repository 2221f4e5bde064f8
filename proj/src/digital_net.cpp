#include <cctype>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>

#include "arqmc/points.hpp"

#ifndef ARQMC_DEFAULT_DIRECTION_FILE
#define ARQMC_DEFAULT_DIRECTION_FILE "data/new-joe-kuo-6.21201"
#endif

namespace arqmc {

DigitalNetB2::DigitalNetB2(int k, std::vector<std::vector<std::uint32_t>> columns)
    : k_(k), columns_(std::move(columns))
{
    if (k < 0 || k > w)
        throw std::invalid_argument("DigitalNetB2: k must lie in [0, 31]");
    for (const auto& c : columns_)
        if (c.size() != static_cast<std::size_t>(k))
            throw std::invalid_argument("DigitalNetB2: each dimension needs k columns");
}

int DigitalNetB2::rank(std::size_t j) const
{
    // Column-space basis over GF(2), keyed by leading bit.
    std::uint32_t basis[w] = {};
    int r = 0;
    for (std::uint32_t v : columns_.at(j)) {
        for (int b = w - 1; b >= 0 && v; --b) {
            if (!((v >> b) & 1))
                continue;
            if (!basis[b]) {
                basis[b] = v;
                ++r;
                v = 0;
            } else {
                v ^= basis[b];
            }
        }
    }
    return r;
}

DigitalNetB2 DigitalNetB2::slice(std::size_t first, std::size_t count) const
{
    if (first + count > columns_.size())
        throw std::invalid_argument("DigitalNetB2: slice exceeds dimension");
    return DigitalNetB2(k_, {columns_.begin() + static_cast<std::ptrdiff_t>(first),
                             columns_.begin() + static_cast<std::ptrdiff_t>(first + count)});
}

std::vector<std::uint32_t> reflected_identity_columns(int k)
{
    std::vector<std::uint32_t> c(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i)
        c[static_cast<std::size_t>(i)] = std::uint32_t(1) << (DigitalNetB2::w - k + i);
    return c;
}

DirectionNumbers DirectionNumbers::parse(const std::string& text)
{
    DirectionNumbers dn;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        if (line_no == 1 && line.find_first_not_of(" \t") != std::string::npos
            && !std::isdigit(static_cast<unsigned char>(line[line.find_first_not_of(" \t")])))
            continue;  // column header
        std::istringstream ls(line);
        long long d = 0, s = 0, a = 0;
        if (!(ls >> d >> s >> a) || s < 1 || s > 31 || a < 0 || d < 2)
            throw std::runtime_error("direction numbers: malformed line " + std::to_string(line_no));
        if (static_cast<std::size_t>(d) != dn.entries_.size() + 2)
            throw std::runtime_error("direction numbers: dimensions out of sequence at line "
                                     + std::to_string(line_no));
        Entry e;
        e.degree = static_cast<int>(s);
        e.coefficients = static_cast<std::uint32_t>(a);
        for (long long i = 0; i < s; ++i) {
            long long m = 0;
            if (!(ls >> m) || m < 1 || m % 2 == 0 || m >= (1ll << (i + 1)))
                throw std::runtime_error("direction numbers: malformed line "
                                         + std::to_string(line_no));
            e.m.push_back(static_cast<std::uint32_t>(m));
        }
        dn.entries_.push_back(std::move(e));
    }
    return dn;
}

DirectionNumbers DirectionNumbers::load(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("direction numbers: cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

DigitalNetB2 DirectionNumbers::build(int k, std::size_t dim) const
{
    if (dim > max_dimension())
        throw std::invalid_argument("direction numbers: dimension " + std::to_string(dim)
                                    + " exceeds file capacity " + std::to_string(max_dimension()));
    if (k < 0 || k > DigitalNetB2::w)
        throw std::invalid_argument("direction numbers: k must lie in [0, 31]");
    std::vector<std::vector<std::uint32_t>> cols;
    cols.reserve(dim);
    if (dim > 0)
        cols.push_back(reflected_identity_columns(k));
    for (std::size_t j = 1; j < dim; ++j) {
        const Entry& e = entries_[j - 1];
        const int s = e.degree;
        std::vector<std::uint64_t> m(static_cast<std::size_t>(std::max(k, s)) + 1);
        for (int c = 1; c <= s; ++c)
            m[static_cast<std::size_t>(c)] = e.m[static_cast<std::size_t>(c - 1)];
        // Sobol' recurrence for the remaining direction numbers.
        for (int c = s + 1; c <= k; ++c) {
            std::uint64_t v = m[static_cast<std::size_t>(c - s)] ^ (m[static_cast<std::size_t>(c - s)] << s);
            for (int t = 1; t < s; ++t)
                if ((e.coefficients >> (s - 1 - t)) & 1)
                    v ^= m[static_cast<std::size_t>(c - t)] << t;
            m[static_cast<std::size_t>(c)] = v;
        }
        std::vector<std::uint32_t> c(static_cast<std::size_t>(k));
        for (int i = 1; i <= k; ++i)
            c[static_cast<std::size_t>(i - 1)] =
                static_cast<std::uint32_t>(m[static_cast<std::size_t>(i)] << (DigitalNetB2::w - i));
        cols.push_back(std::move(c));
    }
    return DigitalNetB2(k, std::move(cols));
}

std::string direction_numbers_path()
{
    const char* env = std::getenv("ARQMC_DIRECTION_NUMBERS");
    return env && *env ? env : ARQMC_DEFAULT_DIRECTION_FILE;
}

const DirectionNumbers& default_direction_numbers()
{
    static std::once_flag once;
    static DirectionNumbers table;
    std::call_once(once, [] { table = DirectionNumbers::load(direction_numbers_path()); });
    return table;
}

}  // namespace arqmc
