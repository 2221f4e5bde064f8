#pragma once

#include <string>
#include <vector>

#include "arqmc/config.hpp"
#include "arqmc/network.hpp"

namespace arqmc {

// JSON network document: species, reactions, optional frozen, conserved_total,
// constants, mode. Throws ParseError (syntax) or ModelError (semantics).
ReactionNetwork parse_network(const std::string& text);
std::string serialize_network(const ReactionNetwork& net);

// A network together with its default experiment setting.
struct ModelSpec {
    std::string name;
    ReactionNetwork network;
    std::vector<double> x0;
    SimConfig config;
    Functional g;
};

struct BuiltinOptions {
    // enzyme-qssa: use a1 = 1 (inflow rate constant taken as 1) instead of 0.5.
    bool enzyme_unit_inflow = false;
};

std::vector<std::string> builtin_model_names();
ModelSpec builtin_model(const std::string& name, const BuiltinOptions& options = {});

// Built-in name, or path to a document that additionally carries
// initial_state, horizon, steps and functional.
ModelSpec load_model(const std::string& name_or_path);

}  // namespace arqmc
