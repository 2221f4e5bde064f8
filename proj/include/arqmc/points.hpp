#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "arqmc/rng.hpp"

namespace arqmc {

// Rank-1 lattice: u_i = (i a / n) mod 1.
struct LatticeRule {
    std::uint64_t n = 1;
    std::vector<std::uint64_t> a;

    std::size_t dimension() const { return a.size(); }
    double coordinate(std::uint64_t i, std::size_t j) const
    {
        const unsigned __int128 p = static_cast<unsigned __int128>(i) * a[j];
        return static_cast<double>(static_cast<std::uint64_t>(p % n)) / static_cast<double>(n);
    }
    void validate() const;
    bool operator==(const LatticeRule&) const = default;
};

// Korobov rule a_j = base^(j-1) mod n.
LatticeRule korobov_rule(std::uint64_t n, std::size_t dim, std::uint64_t base = 3);

/*!
 * Base-2 digital net with n = 2^k points and w = 31 output digits.
 *
 * Column c of dimension j is stored as a 31-bit word whose bit (30 - r)
 * is the entry in row r, so row 0 carries the digit of weight 1/2.
 */
class DigitalNetB2 {
  public:
    static constexpr int w = 31;
    static constexpr double scale = 1.0 / 2147483648.0;  // 2^-31

    DigitalNetB2() = default;
    DigitalNetB2(int k, std::vector<std::vector<std::uint32_t>> columns);

    int k() const { return k_; }
    std::uint64_t size() const { return std::uint64_t(1) << k_; }
    std::size_t dimension() const { return columns_.size(); }
    const std::vector<std::uint32_t>& columns(std::size_t j) const { return columns_[j]; }

    std::uint32_t word(std::uint64_t i, std::size_t j) const
    {
        std::uint32_t r = 0;
        const std::uint32_t* c = columns_[j].data();
        for (; i; i >>= 1, ++c)
            if (i & 1)
                r ^= *c;
        return r;
    }
    double coordinate(std::uint64_t i, std::size_t j) const { return word(i, j) * scale; }

    // Rank over GF(2) of the w x k generating matrix of dimension j.
    int rank(std::size_t j) const;

    // Dimensions [first, first + count) as a net of their own.
    DigitalNetB2 slice(std::size_t first, std::size_t count) const;

    bool operator==(const DigitalNetB2&) const = default;

  private:
    int k_ = 0;
    std::vector<std::vector<std::uint32_t>> columns_;
};

// Reflected identity: u_i = i / 2^k.
std::vector<std::uint32_t> reflected_identity_columns(int k);

// Direction numbers in the Joe-Kuo text format ("d s a m_1 ... m_s" per line).
class DirectionNumbers {
  public:
    struct Entry {
        int degree = 0;
        std::uint32_t coefficients = 0;
        std::vector<std::uint32_t> m;
    };

    static DirectionNumbers load(const std::string& path);
    static DirectionNumbers parse(const std::string& text);

    // Includes the reflected-identity first dimension.
    std::size_t max_dimension() const { return entries_.size() + 1; }

    // Sobol' net of 2^k points; dimension 1 is the reflected identity and
    // dimension j >= 2 uses the file line with d = j.
    DigitalNetB2 build(int k, std::size_t dim) const;

  private:
    std::vector<Entry> entries_;  // entries_[j - 2] describes dimension j
};

// File from ARQMC_DIRECTION_NUMBERS, else the copy shipped with the sources.
std::string direction_numbers_path();
// Process-wide cached table loaded from direction_numbers_path().
const DirectionNumbers& default_direction_numbers();

struct Randomization {
    enum class Kind { shift, shift_baker, digital_shift, lms_shift };

    Kind kind = Kind::shift;
    std::vector<double> shift;           // shift / shift_baker
    std::vector<std::uint32_t> digital;  // digital_shift / lms_shift
    // lms_shift: rows of L_j, row r as a bit mask in the column layout above.
    std::vector<std::array<std::uint32_t, DigitalNetB2::w>> lms;
    std::uint64_t seed = 0;  // seed the randomization was drawn from
    std::uint64_t stream = 0;
};

Randomization random_shift(std::size_t dim, Mrg32k3a& rng, bool baker = false);
Randomization random_digital_shift(std::size_t dim, Mrg32k3a& rng);
Randomization random_lms_shift(std::size_t dim, Mrg32k3a& rng);

// Fold u -> 2u on [0, 1/2], 2 - 2u above.
inline double baker(double u)
{
    const double v = 2 * u;
    return v > 1 ? 2 - v : v;
}

double randomize(const LatticeRule& rule, const Randomization& r, std::uint64_t i, std::size_t j);
double randomize(const DigitalNetB2& net, const Randomization& r, std::uint64_t i, std::size_t j);

// L_j C_j mod 2 for every dimension.
DigitalNetB2 scramble(const DigitalNetB2& net, const Randomization& r);
std::uint32_t lms_apply(const std::array<std::uint32_t, DigitalNetB2::w>& rows, std::uint32_t word);

// Order-dependent weights gamma_u^2 = rho^|u| with alpha = 2.
struct WeightsSpec {
    double rho = 0.6;
    int alpha = 2;

    void validate() const;
};

// phi(u) = 2 pi^2 (u^2 - u + 1/6).
inline double bernoulli_kernel(double u)
{
    constexpr double two_pi2 = 19.739208802178717238;
    return two_pi2 * (u * u - u + 1.0 / 6.0);
}

double p_alpha_discrepancy(const LatticeRule& rule, const WeightsSpec& weights);

// Component-by-component greedy search; ties go to the smallest a_j.
LatticeRule lattice_search(std::uint64_t n, std::size_t dim, const WeightsSpec& weights);

// Cached search: looks in `dir` (or ARQMC_LATTICE_CACHE) for a rule with the
// same (n, rho) and at least `dim` components, searching and storing on a miss.
// An empty directory disables caching.
LatticeRule cached_lattice(std::uint64_t n, std::size_t dim, const WeightsSpec& weights,
                           const std::string& dir = "");
std::string lattice_cache_dir();

enum class PointFamily { lattice_shift, lattice_baker, net_lms };

std::string to_string(PointFamily f);
PointFamily parse_point_family(const std::string& text);  // lat | lat-baker | net

// An unrandomized construction with the randomization family it takes.
class PointSet {
  public:
    PointSet() : PointSet(LatticeRule{}, false) {}
    PointSet(LatticeRule rule, bool baker);
    PointSet(DigitalNetB2 net);

    PointFamily family() const { return family_; }
    std::uint64_t size() const;
    std::size_t dimension() const;
    bool is_lattice() const { return std::holds_alternative<LatticeRule>(construction_); }
    const LatticeRule& lattice() const { return std::get<LatticeRule>(construction_); }
    const DigitalNetB2& net() const { return std::get<DigitalNetB2>(construction_); }

    double coordinate(std::uint64_t i, std::size_t j) const;

    // Fresh randomization of the matching kind over `dim` dimensions.
    Randomization draw(std::size_t dim, Mrg32k3a& rng) const;

  private:
    PointFamily family_;
    std::variant<LatticeRule, DigitalNetB2> construction_;
};

struct PointSetOptions {
    WeightsSpec weights;
    std::string lattice_cache;  // empty: ARQMC_LATTICE_CACHE or no caching
};

// n must be a power of two for nets.
PointSet make_point_set(PointFamily family, std::uint64_t n, std::size_t dim,
                        const PointSetOptions& options = {});

}  // namespace arqmc
