#include <bit>
#include <stdexcept>

#include "arqmc/points.hpp"

namespace arqmc {

Randomization random_shift(std::size_t dim, Mrg32k3a& rng, bool baker)
{
    Randomization r;
    r.kind = baker ? Randomization::Kind::shift_baker : Randomization::Kind::shift;
    r.shift.resize(dim);
    for (double& s : r.shift)
        s = rng.next();
    return r;
}

Randomization random_digital_shift(std::size_t dim, Mrg32k3a& rng)
{
    Randomization r;
    r.kind = Randomization::Kind::digital_shift;
    r.digital.resize(dim);
    for (auto& d : r.digital)
        d = rng.next_word();
    return r;
}

Randomization random_lms_shift(std::size_t dim, Mrg32k3a& rng)
{
    constexpr int w = DigitalNetB2::w;
    Randomization r;
    r.kind = Randomization::Kind::lms_shift;
    r.lms.resize(dim);
    for (auto& rows : r.lms)
        for (int row = 0; row < w; ++row) {
            // Random entries left of the diagonal, unit diagonal.
            const std::uint32_t below = 0x7fffffffu & ~((std::uint32_t(1) << (w - row)) - 1);
            rows[static_cast<std::size_t>(row)] = (rng.next_word() & below) | (std::uint32_t(1) << (w - 1 - row));
        }
    r.digital.resize(dim);
    for (auto& d : r.digital)
        d = rng.next_word();
    return r;
}

std::uint32_t lms_apply(const std::array<std::uint32_t, DigitalNetB2::w>& rows, std::uint32_t word)
{
    std::uint32_t out = 0;
    for (int row = 0; row < DigitalNetB2::w; ++row)
        out |= static_cast<std::uint32_t>(std::popcount(rows[static_cast<std::size_t>(row)] & word) & 1)
               << (DigitalNetB2::w - 1 - row);
    return out;
}

DigitalNetB2 scramble(const DigitalNetB2& net, const Randomization& r)
{
    if (r.kind != Randomization::Kind::lms_shift || r.lms.size() < net.dimension())
        throw std::invalid_argument("scramble: needs an LMS randomization covering every dimension");
    std::vector<std::vector<std::uint32_t>> cols(net.dimension());
    for (std::size_t j = 0; j < net.dimension(); ++j) {
        cols[j] = net.columns(j);
        for (auto& c : cols[j])
            c = lms_apply(r.lms[j], c);
    }
    return DigitalNetB2(net.k(), std::move(cols));
}

double randomize(const LatticeRule& rule, const Randomization& r, std::uint64_t i, std::size_t j)
{
    if (r.kind != Randomization::Kind::shift && r.kind != Randomization::Kind::shift_baker)
        throw std::invalid_argument("randomize: lattice rules take a shift (optionally baker)");
    double u = rule.coordinate(i, j) + r.shift.at(j);
    if (u >= 1)
        u -= 1;
    return r.kind == Randomization::Kind::shift_baker ? baker(u) : u;
}

double randomize(const DigitalNetB2& net, const Randomization& r, std::uint64_t i, std::size_t j)
{
    std::uint32_t word = net.word(i, j);
    if (r.kind == Randomization::Kind::lms_shift)
        word = lms_apply(r.lms.at(j), word);
    else if (r.kind != Randomization::Kind::digital_shift)
        throw std::invalid_argument("randomize: digital nets take a digital shift or LMS");
    return (word ^ r.digital.at(j)) * DigitalNetB2::scale;
}

std::string to_string(PointFamily f)
{
    switch (f) {
    case PointFamily::lattice_shift:
        return "lat";
    case PointFamily::lattice_baker:
        return "lat-baker";
    case PointFamily::net_lms:
        return "net";
    }
    return "?";
}

PointFamily parse_point_family(const std::string& text)
{
    if (text == "lat" || text == "lattice")
        return PointFamily::lattice_shift;
    if (text == "lat-baker" || text == "lattice-baker")
        return PointFamily::lattice_baker;
    if (text == "net" || text == "sobol")
        return PointFamily::net_lms;
    throw std::invalid_argument("unknown point family '" + text + "' (lat | lat-baker | net)");
}

PointSet::PointSet(LatticeRule rule, bool baker)
    : family_(baker ? PointFamily::lattice_baker : PointFamily::lattice_shift),
      construction_(std::move(rule))
{
}

PointSet::PointSet(DigitalNetB2 net) : family_(PointFamily::net_lms), construction_(std::move(net)) {}

std::uint64_t PointSet::size() const
{
    return is_lattice() ? lattice().n : net().size();
}

std::size_t PointSet::dimension() const
{
    return is_lattice() ? lattice().dimension() : net().dimension();
}

double PointSet::coordinate(std::uint64_t i, std::size_t j) const
{
    return is_lattice() ? lattice().coordinate(i, j) : net().coordinate(i, j);
}

Randomization PointSet::draw(std::size_t dim, Mrg32k3a& rng) const
{
    if (is_lattice())
        return random_shift(dim, rng, family_ == PointFamily::lattice_baker);
    return random_lms_shift(dim, rng);
}

PointSet make_point_set(PointFamily family, std::uint64_t n, std::size_t dim, const PointSetOptions& options)
{
    if (family == PointFamily::net_lms) {
        if (n == 0 || (n & (n - 1)))
            throw std::invalid_argument("digital nets need a power-of-two point count");
        return PointSet(default_direction_numbers().build(std::countr_zero(n), dim));
    }
    return PointSet(cached_lattice(n, dim, options.weights, options.lattice_cache),
                    family == PointFamily::lattice_baker);
}

}  // namespace arqmc
