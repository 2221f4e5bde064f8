#pragma once

#include <cstddef>
#include <span>
#include <string>

#include "arqmc/common.hpp"

namespace arqmc {

class ReactionNetwork;

enum class NegativePolicy { flag_and_continue, abort_replication };

struct SimConfig {
    double horizon = 1.0;  // T
    int steps = 1;         // s
    StateMode mode = StateMode::integer;
    NegativePolicy negative_policy = NegativePolicy::flag_and_continue;

    double tau() const { return horizon / steps; }
    void validate() const;
};

// Quantity g(X_s) to estimate.
struct Functional {
    enum class Kind { coordinate, power, indicator };

    Kind kind = Kind::coordinate;
    std::size_t index = 0;
    int power = 1;
    double threshold = 0;  // indicator is x_i > threshold

    static Functional coordinate(std::size_t i) { return {Kind::coordinate, i, 1, 0}; }
    static Functional moment(std::size_t i, int p) { return {Kind::power, i, p, 0}; }
    static Functional indicator(std::size_t i, double t) { return {Kind::indicator, i, 1, t}; }

    double operator()(std::span<const double> x) const
    {
        const double v = x[index];
        switch (kind) {
        case Kind::coordinate:
            return v;
        case Kind::power:
            return power == 2 ? v * v : v * v * v;
        case Kind::indicator:
            return v > threshold ? 1.0 : 0.0;
        }
        return 0;
    }

    bool operator==(const Functional&) const = default;
};

// "X1", "X2^2", "X1>300", or a species name in place of X<i>.
Functional parse_functional(const std::string& text, const ReactionNetwork& net);
std::string to_string(const Functional& g);

}  // namespace arqmc
