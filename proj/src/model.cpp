#include "arqmc/model.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace arqmc {

using json = nlohmann::ordered_json;

void SimConfig::validate() const
{
    if (!(horizon > 0) || !std::isfinite(horizon))
        throw std::invalid_argument("SimConfig: horizon T must be positive");
    if (steps < 1)
        throw std::invalid_argument("SimConfig: step count s must be >= 1");
}

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos)
        return "";
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

std::size_t functional_index(const std::string& name, const ReactionNetwork& net)
{
    if (name.size() > 1 && (name[0] == 'X' || name[0] == 'x')
        && name.find_first_not_of("0123456789", 1) == std::string::npos) {
        const unsigned long i = std::stoul(name.substr(1));
        if (i < 1 || i > net.species_count())
            throw ModelError("functional: species index out of range in '" + name + "'");
        return i - 1;
    }
    return net.species_index(name);
}

// 1-based line and column of a byte offset.
std::pair<std::size_t, std::size_t> locate(const std::string& text, std::size_t offset)
{
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    return {line, column};
}

std::vector<int> int_vector(const json& j, const std::string& where)
{
    if (!j.is_array())
        throw ModelError(where + " must be an array of integers");
    std::vector<int> v;
    for (const json& e : j) {
        if (!e.is_number_integer())
            throw ModelError(where + " must contain integers");
        v.push_back(e.get<int>());
    }
    return v;
}

ReactionNetwork network_from_json(const json& doc, const std::string& text)
{
    if (!doc.is_object())
        throw ModelError("network document must be a JSON object");
    if (!doc.contains("species") || !doc["species"].is_array())
        throw ModelError("network document needs a 'species' array");
    std::vector<std::string> species;
    for (const json& s : doc["species"]) {
        if (!s.is_string())
            throw ModelError("species names must be strings");
        species.push_back(s.get<std::string>());
    }

    std::map<std::string, double> constants;
    if (doc.contains("constants"))
        for (const auto& [k, v] : doc["constants"].items())
            constants[k] = v.get<double>();
    std::optional<double> total;
    if (doc.contains("conserved_total"))
        total = doc["conserved_total"].get<double>();
    const Expression::Resolver resolve = make_resolver(species, constants, total);

    if (!doc.contains("reactions") || !doc["reactions"].is_array())
        throw ModelError("network document needs a 'reactions' array");
    std::vector<Reaction> reactions;
    for (std::size_t k = 0; k < doc["reactions"].size(); ++k) {
        const json& r = doc["reactions"][k];
        const std::string where = "reaction " + std::to_string(k + 1);
        Reaction rx;
        rx.alpha = int_vector(r.at("alpha"), where + " alpha");
        rx.beta = int_vector(r.at("beta"), where + " beta");
        rx.rate = r.at("c").get<double>();
        if (rx.rate < 0)
            throw ModelError(where + ": negative rate constant");
        const std::string prop = r.value("propensity", std::string("mass_action"));
        if (prop != "mass_action") {
            try {
                rx.expression = Expression::parse(prop, resolve);
            } catch (const ParseError& e) {
                // Report the position inside the document when the string can be found.
                const std::size_t at = text.find("\"" + prop + "\"");
                if (at == std::string::npos)
                    throw;
                const auto [line, col] = locate(text, at + e.column());
                throw ParseError(std::string(e.what()).substr(0, std::string(e.what()).find(" (line"))
                                     + " in " + where,
                                 line, col);
            }
        }
        reactions.push_back(std::move(rx));
    }

    StateMode mode = StateMode::integer;
    if (doc.contains("mode"))
        mode = parse_state_mode(doc["mode"].get<std::string>());

    ReactionNetwork net(species, std::move(reactions), mode);
    net.set_constants(std::move(constants));
    net.set_conserved_total(total);
    if (doc.contains("frozen")) {
        std::vector<std::size_t> frozen;
        for (const json& f : doc["frozen"])
            if (f.is_string()) {
                frozen.push_back(net.species_index(f.get<std::string>()));
            } else {
                const auto i = f.get<long long>();  // 1-based like x<i>
                if (i < 1 || static_cast<std::size_t>(i) > net.species_count())
                    throw ModelError("frozen species index out of range");
                frozen.push_back(static_cast<std::size_t>(i - 1));
            }
        net.set_frozen(std::move(frozen));
    }
    return net;
}

json parse_json(const std::string& text)
{
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        const auto [line, col] = locate(text, e.byte > 0 ? e.byte - 1 : 0);
        throw ParseError("network document: malformed JSON", line, col);
    }
}

ModelSpec model_from_json(const json& doc, const std::string& text, const std::string& name)
{
    ModelSpec m{name, network_from_json(doc, text), {}, {}, {}};
    const ReactionNetwork& net = m.network;
    if (doc.contains("initial_state"))
        m.x0 = doc["initial_state"].get<std::vector<double>>();
    else
        m.x0.assign(net.species_count(), 0.0);
    if (m.x0.size() != net.species_count())
        throw ModelError("initial_state length differs from species count");
    m.config.horizon = doc.value("horizon", 1.0);
    m.config.steps = doc.value("steps", 1);
    m.config.mode = net.mode();
    m.config.validate();
    m.g = parse_functional(doc.value("functional", std::string("X1")), net);
    return m;
}

// Documents of the benchmark models; parsed through the same reader as user files.
const char* builtin_document(const std::string& name)
{
    if (name == "rev-iso" || name == "rev-iso-normal")
        return R"doc({
  "species": ["S1", "S2"],
  "reactions": [
    {"alpha": [1, 0], "beta": [0, 1], "c": 1},
    {"alpha": [0, 1], "beta": [1, 0], "c": 1e-4}
  ],
  "initial_state": [100, 1e6], "horizon": 1.6, "steps": 8, "functional": "X1"
})doc";
    if (name == "schloegl-1d")
        return R"doc({
  "species": ["S1", "S2", "S3"],
  "reactions": [
    {"alpha": [2, 1, 0], "beta": [3, 0, 0], "c": 3e-7},
    {"alpha": [3, 0, 0], "beta": [2, 1, 0], "c": 1e-4},
    {"alpha": [0, 0, 1], "beta": [1, 0, 0], "c": 1e-3},
    {"alpha": [1, 0, 0], "beta": [0, 0, 1], "c": 3.5}
  ],
  "frozen": ["S2", "S3"],
  "initial_state": [250, 1e5, 2e5], "horizon": 4, "steps": 16, "functional": "X1"
})doc";
    if (name == "schloegl-2d")
        return R"doc({
  "species": ["S1", "S2"],
  "conserved_total": 300250,
  "reactions": [
    {"alpha": [2, 1], "beta": [3, 0], "c": 3e-7},
    {"alpha": [3, 0], "beta": [2, 1], "c": 1e-4},
    {"alpha": [0, 0], "beta": [1, 0], "c": 1e-3, "propensity": "N0 - S1 - S2"},
    {"alpha": [1, 0], "beta": [0, 0], "c": 3.5}
  ],
  "initial_state": [250, 1e5], "horizon": 4, "steps": 16, "functional": "X1"
})doc";
    if (name == "pka")
        return R"doc({
  "species": ["PKA", "cAMP", "PKA_cAMP2", "PKA_cAMP4", "PKAr", "PKAc"],
  "reactions": [
    {"alpha": [1, 2, 0, 0, 0, 0], "beta": [0, 0, 1, 0, 0, 0], "c": 2.6255e-6},
    {"alpha": [0, 0, 1, 0, 0, 0], "beta": [1, 2, 0, 0, 0, 0], "c": 0.02},
    {"alpha": [0, 2, 1, 0, 0, 0], "beta": [0, 0, 0, 1, 0, 0], "c": 3.8481e-6},
    {"alpha": [0, 0, 0, 1, 0, 0], "beta": [0, 2, 1, 0, 0, 0], "c": 0.02},
    {"alpha": [0, 0, 0, 1, 0, 0], "beta": [0, 0, 0, 0, 1, 2], "c": 0.016},
    {"alpha": [0, 0, 0, 0, 1, 2], "beta": [0, 0, 0, 1, 0, 0], "c": 5.1325e-5}
  ],
  "initial_state": [33000, 33030, 1100, 1100, 1100, 1100],
  "horizon": 0.05, "steps": 256, "functional": "X1"
})doc";
    if (name == "enzyme-qssa")
        return R"doc({
  "species": ["S1", "S2"],
  "constants": {"Km": 202000},
  "reactions": [
    {"alpha": [0, 0], "beta": [1, 0], "c": 0.5},
    {"alpha": [1, 0], "beta": [0, 1], "c": 1, "propensity": "x1^2 / (Km^2 + x1^2)"}
  ],
  "initial_state": [0, 0], "horizon": 131072, "steps": 1024, "functional": "X1"
})doc";
    return nullptr;
}

}  // namespace

Functional parse_functional(const std::string& text, const ReactionNetwork& net)
{
    const std::string s = trim(text);
    if (const auto gt = s.find('>'); gt != std::string::npos) {
        const std::string t = trim(s.substr(gt + 1));
        std::size_t used = 0;
        const double threshold = std::stod(t, &used);
        if (used != t.size() || threshold != std::floor(threshold))
            throw ModelError("functional: indicator threshold must be an integer in '" + text + "'");
        return Functional::indicator(functional_index(trim(s.substr(0, gt)), net), threshold);
    }
    if (const auto caret = s.find('^'); caret != std::string::npos) {
        const std::string p = trim(s.substr(caret + 1));
        if (p != "1" && p != "2" && p != "3")
            throw ModelError("functional: power must be 1, 2 or 3 in '" + text + "'");
        const std::size_t i = functional_index(trim(s.substr(0, caret)), net);
        return p == "1" ? Functional::coordinate(i) : Functional::moment(i, p[0] - '0');
    }
    return Functional::coordinate(functional_index(s, net));
}

std::string to_string(const Functional& g)
{
    const std::string base = "X" + std::to_string(g.index + 1);
    switch (g.kind) {
    case Functional::Kind::coordinate:
        return base;
    case Functional::Kind::power:
        return base + "^" + std::to_string(g.power);
    case Functional::Kind::indicator: {
        std::ostringstream os;
        os << base << ">" << g.threshold;
        return os.str();
    }
    }
    return base;
}

ReactionNetwork parse_network(const std::string& text)
{
    return network_from_json(parse_json(text), text);
}

std::string serialize_network(const ReactionNetwork& net)
{
    json doc;
    doc["species"] = net.species();
    if (!net.constants().empty()) {
        json c = json::object();
        for (const auto& [k, v] : net.constants())
            c[k] = v;
        doc["constants"] = c;
    }
    if (net.conserved_total())
        doc["conserved_total"] = *net.conserved_total();
    json reactions = json::array();
    for (const Reaction& r : net.reactions()) {
        json jr;
        jr["alpha"] = r.alpha;
        jr["beta"] = r.beta;
        jr["c"] = r.rate;
        jr["propensity"] = r.mass_action() ? std::string("mass_action") : r.expression.to_string();
        reactions.push_back(jr);
    }
    doc["reactions"] = reactions;
    if (!net.frozen().empty()) {
        json f = json::array();
        for (std::size_t i : net.frozen())
            f.push_back(net.species()[i]);
        doc["frozen"] = f;
    }
    doc["mode"] = to_string(net.mode());
    return doc.dump(2) + "\n";
}

std::vector<std::string> builtin_model_names()
{
    return {"rev-iso", "rev-iso-normal", "schloegl-1d", "schloegl-2d", "pka", "enzyme-qssa"};
}

ModelSpec builtin_model(const std::string& name, const BuiltinOptions& options)
{
    const char* text = builtin_document(name);
    if (!text)
        throw ModelError("unknown built-in model '" + name + "'");
    json doc = json::parse(text);
    if (name == "rev-iso-normal")
        doc["mode"] = "real";
    if (name == "enzyme-qssa" && options.enzyme_unit_inflow)
        doc["reactions"][0]["c"] = 1.0;
    return model_from_json(doc, text, name);
}

ModelSpec load_model(const std::string& name_or_path)
{
    if (builtin_document(name_or_path))
        return builtin_model(name_or_path);
    std::ifstream in(name_or_path);
    if (!in)
        throw ModelError("cannot open model '" + name_or_path + "' (not a built-in name or readable file)");
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    return model_from_json(parse_json(text), text, name_or_path);
}

}  // namespace arqmc
