#include "arqmc/network.hpp"

#include <cmath>
#include <limits>

namespace arqmc {

std::string to_string(StateMode mode)
{
    return mode == StateMode::integer ? "integer" : "real";
}

StateMode parse_state_mode(const std::string& text)
{
    if (text == "integer")
        return StateMode::integer;
    if (text == "real")
        return StateMode::real;
    throw ModelError("unknown state mode '" + text + "'");
}

ParseError::ParseError(const std::string& what, std::size_t line, std::size_t column)
    : std::runtime_error(what + " (line " + std::to_string(line) + ", column "
                         + std::to_string(column) + ")"),
      line_(line),
      column_(column)
{
}

bool StateVector::valid() const
{
    for (double v : x)
        if (v < 0)
            return false;
    return true;
}

double binomial(double x, int k)
{
    if (k <= 0)
        return 1.0;
    if (x < k)
        return 0.0;
    if (k == 1)
        return x;
    // Exact integer product while it fits, falling factorial otherwise.
    if (x == std::floor(x) && x < 9.0e15) {
        const auto n = static_cast<std::uint64_t>(x);
        std::uint64_t r = 1;
        bool exact = true;
        for (int j = 0; j < k; ++j) {
            std::uint64_t t;
            if (__builtin_mul_overflow(r, n - static_cast<std::uint64_t>(j), &t)) {
                exact = false;
                break;
            }
            r = t / static_cast<std::uint64_t>(j + 1);
        }
        if (exact)
            return static_cast<double>(r);
    }
    long double r = 1;
    for (int j = 0; j < k; ++j)
        r *= (static_cast<long double>(x) - j) / (j + 1);
    return static_cast<double>(r);
}

ReactionNetwork::ReactionNetwork(std::vector<std::string> species, std::vector<Reaction> reactions,
                                 StateMode mode)
    : species_(std::move(species)), reactions_(std::move(reactions)), mode_(mode)
{
    for (Reaction& r : reactions_)
        if (r.zeta.empty() && r.alpha.size() == r.beta.size()) {
            r.zeta.resize(r.alpha.size());
            for (std::size_t i = 0; i < r.alpha.size(); ++i)
                r.zeta[i] = r.beta[i] - r.alpha[i];
        }
    frozen_mask_.assign(species_.size(), false);
    validate();
    rebuild();
}

void ReactionNetwork::set_frozen(std::vector<std::size_t> indices)
{
    frozen_mask_.assign(species_.size(), false);
    for (std::size_t i : indices) {
        if (i >= species_.size())
            throw ModelError("frozen species index out of range");
        frozen_mask_[i] = true;
    }
    frozen_ = std::move(indices);
    rebuild();
}

void ReactionNetwork::rebuild()
{
    const std::size_t l = species_.size();
    factors_.assign(reactions_.size(), {});
    effective_zeta_.assign(reactions_.size() * l, 0.0);
    changes_.assign(reactions_.size(), {});
    for (std::size_t k = 0; k < reactions_.size(); ++k) {
        const Reaction& r = reactions_[k];
        for (std::size_t i = 0; i < l; ++i) {
            if (r.alpha[i] > 0)
                factors_[k].push_back({i, r.alpha[i]});
            const double z = frozen_mask_[i] ? 0.0 : r.zeta[i];
            effective_zeta_[k * l + i] = z;
            if (z != 0)
                changes_[k].emplace_back(i, z);
        }
    }
}

std::size_t ReactionNetwork::species_index(const std::string& name) const
{
    for (std::size_t i = 0; i < species_.size(); ++i)
        if (species_[i] == name)
            return i;
    throw ModelError("unknown species '" + name + "'");
}

Expression::Resolver make_resolver(std::vector<std::string> species,
                                   std::map<std::string, double> constants,
                                   std::optional<double> conserved_total)
{
    return [species = std::move(species), constants = std::move(constants),
            conserved_total](const std::string& name, Expression::Symbol& sym) {
        for (std::size_t i = 0; i < species.size(); ++i)
            if (species[i] == name) {
                sym.is_variable = true;
                sym.index = static_cast<std::uint32_t>(i);
                return true;
            }
        if (name.size() > 1 && name[0] == 'x'
            && name.find_first_not_of("0123456789", 1) == std::string::npos) {
            const unsigned long i = std::stoul(name.substr(1));
            if (i >= 1 && i <= species.size()) {
                sym.is_variable = true;
                sym.index = static_cast<std::uint32_t>(i - 1);
                return true;
            }
            return false;
        }
        if (auto it = constants.find(name); it != constants.end()) {
            sym.value = it->second;
            return true;
        }
        if (name == "N0" && conserved_total) {
            sym.value = *conserved_total;
            return true;
        }
        return false;
    };
}

Expression::Resolver ReactionNetwork::resolver() const
{
    return make_resolver(species_, constants_, conserved_total_);
}

Expression ReactionNetwork::parse_expression(const std::string& text) const
{
    return Expression::parse(text, resolver());
}

double ReactionNetwork::propensity(std::size_t k, std::span<const double> x) const
{
    const Reaction& r = reactions_[k];
    double a = r.rate;
    if (a == 0)
        return 0.0;
    if (r.mass_action()) {
        for (const Factor& f : factors_[k]) {
            a *= binomial(x[f.species], f.order);
            if (a == 0)
                return 0.0;
        }
        return a;
    }
    a *= r.expression.evaluate(x);
    return a > 0 ? a : 0.0;
}

void ReactionNetwork::propensities(std::span<const double> x, std::span<double> out) const
{
    for (std::size_t k = 0; k < reactions_.size(); ++k)
        out[k] = propensity(k, x);
}

bool ReactionNetwork::apply(std::span<double> x, std::span<const double> counts) const
{
    for (std::size_t k = 0; k < reactions_.size(); ++k) {
        const double c = counts[k];
        if (c == 0)
            continue;
        for (const auto& [i, z] : changes_[k])
            x[i] += c * z;
    }
    for (double v : x)
        if (v < 0)
            return false;
    return true;
}

StateVector ReactionNetwork::apply_reactions(const StateVector& x, std::span<const double> counts) const
{
    if (counts.size() != reactions_.size())
        throw std::invalid_argument("apply_reactions: one count per reaction required");
    StateVector out = x;
    apply(out.x, counts);
    return out;
}

void ReactionNetwork::validate() const
{
    const std::size_t l = species_.size();
    if (l < 1)
        throw ModelError("network: l >= 1 violated (no species)");
    if (reactions_.empty())
        throw ModelError("network: d >= 1 violated (no reactions)");
    for (std::size_t k = 0; k < reactions_.size(); ++k) {
        const Reaction& r = reactions_[k];
        const std::string where = "reaction " + std::to_string(k + 1) + ": ";
        if (r.alpha.size() != l || r.beta.size() != l || r.zeta.size() != l)
            throw ModelError(where + "stoichiometry length differs from species count");
        for (std::size_t i = 0; i < l; ++i) {
            if (r.alpha[i] < 0 || r.beta[i] < 0)
                throw ModelError(where + "negative stoichiometric coefficient");
            if (r.zeta[i] != r.beta[i] - r.alpha[i])
                throw ModelError(where + "zeta differs from beta - alpha");
        }
        if (!(r.rate >= 0) || !std::isfinite(r.rate))
            throw ModelError(where + "negative rate constant");
        if (r.expression.max_variable() >= static_cast<std::int64_t>(l))
            throw ModelError(where + "expression references an unknown species");
    }
}

bool ReactionNetwork::operator==(const ReactionNetwork& o) const
{
    return species_ == o.species_ && reactions_ == o.reactions_ && mode_ == o.mode_
           && frozen_ == o.frozen_ && conserved_total_ == o.conserved_total_
           && constants_ == o.constants_;
}

}  // namespace arqmc
