#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "arqmc/common.hpp"
#include "arqmc/expression.hpp"

namespace arqmc {

struct Reaction {
    std::vector<int> alpha;  // reactant coefficients
    std::vector<int> beta;   // product coefficients
    std::vector<int> zeta;   // beta - alpha
    double rate = 0;         // c_k
    // Empty for mass action; otherwise a_k(x) = c_k * expression(x).
    Expression expression;

    bool mass_action() const { return expression.empty(); }
    bool operator==(const Reaction&) const = default;
};

struct StateVector {
    std::vector<double> x;

    bool valid() const;
    bool operator==(const StateVector&) const = default;
};

// Number of ways to pick k of x molecules; 0 when x < k.
double binomial(double x, int k);

// Identifiers: species names, x<i> (1-based), named constants, and N0 when a
// conservation total is declared.
Expression::Resolver make_resolver(std::vector<std::string> species,
                                   std::map<std::string, double> constants,
                                   std::optional<double> conserved_total);

class ReactionNetwork {
  public:
    ReactionNetwork() = default;
    ReactionNetwork(std::vector<std::string> species, std::vector<Reaction> reactions,
                    StateMode mode = StateMode::integer);

    std::size_t species_count() const { return species_.size(); }
    std::size_t reaction_count() const { return reactions_.size(); }
    const std::vector<std::string>& species() const { return species_; }
    const std::vector<Reaction>& reactions() const { return reactions_; }
    const Reaction& reaction(std::size_t k) const { return reactions_.at(k); }
    StateMode mode() const { return mode_; }

    // Throws ModelError for an unknown name.
    std::size_t species_index(const std::string& name) const;

    // Frozen species keep their copy number: their effective change is 0.
    void set_frozen(std::vector<std::size_t> indices);
    const std::vector<std::size_t>& frozen() const { return frozen_; }
    bool is_frozen(std::size_t i) const { return frozen_mask_.at(i); }

    // Total N0 of a conservation law used to eliminate a species.
    void set_conserved_total(std::optional<double> total) { conserved_total_ = total; }
    std::optional<double> conserved_total() const { return conserved_total_; }

    // Named constants available to propensity expressions.
    void set_constants(std::map<std::string, double> constants) { constants_ = std::move(constants); }
    const std::map<std::string, double>& constants() const { return constants_; }

    // Identifier resolution shared by the document reader and expression parser.
    Expression::Resolver resolver() const;
    Expression parse_expression(const std::string& text) const;

    double propensity(std::size_t k, std::span<const double> x) const;
    void propensities(std::span<const double> x, std::span<double> out) const;

    // Change of species i when reaction k fires once, honouring frozen species.
    double effective_change(std::size_t k, std::size_t i) const
    {
        return effective_zeta_[k * species_.size() + i];
    }

    // x += sum_k counts_k * zeta_k; returns false if any entry went negative.
    bool apply(std::span<double> x, std::span<const double> counts) const;
    StateVector apply_reactions(const StateVector& x, std::span<const double> counts) const;

    // Checks all structural invariants; throws ModelError.
    void validate() const;

    bool operator==(const ReactionNetwork& other) const;

  private:
    void rebuild();

    struct Factor {
        std::size_t species;
        int order;
    };

    std::vector<std::string> species_;
    std::vector<Reaction> reactions_;
    StateMode mode_ = StateMode::integer;
    std::vector<std::size_t> frozen_;
    std::vector<bool> frozen_mask_;
    std::optional<double> conserved_total_;
    std::map<std::string, double> constants_;

    // Derived tables.
    std::vector<std::vector<Factor>> factors_;
    std::vector<double> effective_zeta_;
    std::vector<std::vector<std::pair<std::size_t, double>>> changes_;
};

}  // namespace arqmc
