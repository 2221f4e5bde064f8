#include "arqmc/sort.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "arqmc/chain.hpp"
#include "arqmc/sampling.hpp"

namespace arqmc {

namespace {

struct Keyed {
    double key;
    std::uint32_t index;
    bool operator<(const Keyed& o) const { return key < o.key || (key == o.key && index < o.index); }
};

// Terms zeta_{k,i} for the reactions that move coordinate i.
std::vector<std::pair<std::size_t, double>> movers(const ReactionNetwork& net, std::size_t i)
{
    std::vector<std::pair<std::size_t, double>> out;
    for (std::size_t k = 0; k < net.reaction_count(); ++k)
        if (const double z = net.effective_change(k, i); z != 0)
            out.emplace_back(k, z);
    return out;
}

std::string describe_state(std::span<const double> x)
{
    std::ostringstream os;
    os << "(";
    for (std::size_t i = 0; i < x.size(); ++i)
        os << (i ? ", " : "") << x[i];
    os << ")";
    return os.str();
}

}  // namespace

ImportanceFunction coordinate_importance(std::size_t i)
{
    return ImportanceFunction([i](std::span<const double> x) { return x[i]; },
                              "coordinate:X" + std::to_string(i + 1));
}

ImportanceFunction oslaif(const ReactionNetwork& net_in, const Functional& g, double tau, StateMode mode)
{
    if (g.index >= net_in.species_count())
        throw std::invalid_argument("oslaif: functional index out of range");
    if (g.kind == Functional::Kind::power && g.power != 2 && g.power != 3)
        throw std::invalid_argument("oslaif: only powers 2 and 3 are supported");
    auto net = std::make_shared<const ReactionNetwork>(net_in);
    const std::size_t i = g.index;
    auto terms = movers(*net, i);
    const std::string name = "oslaif:" + to_string(g);

    // One-step moments of coordinate i: mean M, variance V, third cumulant K3.
    auto moments = [net, terms, tau, i, mode](std::span<const double> x, double& m, double& v, double& k3) {
        m = x[i];
        v = 0;
        k3 = 0;
        for (const auto& [k, z] : terms) {
            const double lambda = tau * net->propensity(k, x);
            m += z * lambda;
            v += z * z * lambda;
            if (mode == StateMode::integer)
                k3 += z * z * z * lambda;
        }
    };

    switch (g.kind) {
    case Functional::Kind::coordinate:
        return ImportanceFunction(
            [moments](std::span<const double> x) {
                double m, v, k3;
                moments(x, m, v, k3);
                return m;
            },
            name);
    case Functional::Kind::power:
        if (g.power == 2)
            return ImportanceFunction(
                [moments](std::span<const double> x) {
                    double m, v, k3;
                    moments(x, m, v, k3);
                    return m * m + v;
                },
                name);
        return ImportanceFunction(
            [moments](std::span<const double> x) {
                double m, v, k3;
                moments(x, m, v, k3);
                return m * m * m + 3 * m * v + k3;
            },
            name);
    case Functional::Kind::indicator: {
        const double t = g.threshold;
        const double correction = mode == StateMode::integer ? 0.5 : 0.0;
        return ImportanceFunction(
            [moments, t, correction](std::span<const double> x) {
                double m, v, k3;
                moments(x, m, v, k3);
                if (v <= 0)
                    return m > t ? 1.0 : 0.0;
                return 1.0 - normal_cdf((t + correction - m) / std::sqrt(v));
            },
            name);
    }
    }
    throw std::invalid_argument("oslaif: unsupported functional");
}

ImportanceFunction average_importance(std::vector<ImportanceFunction> parts)
{
    if (parts.empty())
        throw std::invalid_argument("average_importance: no functions given");
    std::string name = "average(";
    for (std::size_t q = 0; q < parts.size(); ++q)
        name += (q ? "," : "") + parts[q].name();
    name += ")";
    return ImportanceFunction(
        [parts = std::move(parts)](std::span<const double> x) {
            double s = 0;
            for (const auto& h : parts)
                s += h(x);
            return s / static_cast<double>(parts.size());
        },
        name);
}

std::vector<std::uint32_t> sort_by_importance(std::span<const double> states, std::size_t width,
                                              const ImportanceFunction& h)
{
    const std::size_t n = width ? states.size() / width : 0;
    std::vector<Keyed> keyed(n);
    for (std::size_t c = 0; c < n; ++c) {
        const auto x = states.subspan(c * width, width);
        const double key = h(x);
        if (!std::isfinite(key))
            throw std::runtime_error("sort: non-finite importance value at state " + describe_state(x));
        keyed[c] = {key, static_cast<std::uint32_t>(c)};
    }
    std::sort(keyed.begin(), keyed.end());
    std::vector<std::uint32_t> perm(n);
    for (std::size_t c = 0; c < n; ++c)
        perm[c] = keyed[c].index;
    return perm;
}

void BatchSpec::validate(std::size_t width) const
{
    if (coord_order.empty() || coord_order.size() != exponents.size())
        throw std::invalid_argument("batch sort: need one exponent per coordinate");
    if (coord_order.size() > width)
        throw std::invalid_argument("batch sort: more levels than state coordinates");
    double total = 0;
    for (std::size_t j = 0; j < coord_order.size(); ++j) {
        if (coord_order[j] >= width)
            throw std::invalid_argument("batch sort: coordinate index out of range");
        if (!(exponents[j] > 0))
            throw std::invalid_argument("batch sort: exponents must be positive");
        total += exponents[j];
    }
    if (std::fabs(total - 1) > 1e-9)
        throw std::invalid_argument("batch sort: exponents must sum to 1");
}

std::vector<std::uint64_t> BatchSpec::batch_counts(std::uint64_t n) const
{
    std::vector<std::uint64_t> counts;
    for (double a : exponents) {
        const double v = std::pow(static_cast<double>(n), a);
        // Treat values within rounding of an integer as that integer.
        const double r = std::round(v);
        counts.push_back(static_cast<std::uint64_t>(std::fabs(v - r) <= 1e-9 * v ? r : std::ceil(v)));
    }
    return counts;
}

std::vector<std::uint32_t> batch_sort(std::span<const double> states, std::size_t width, const BatchSpec& spec)
{
    spec.validate(width);
    const std::size_t n = states.size() / width;
    const std::size_t levels = spec.coord_order.size();
    const auto counts = spec.batch_counts(n);

    std::vector<std::uint32_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0u);
    std::vector<std::pair<std::size_t, std::size_t>> blocks{{0, n}};
    std::size_t block = n;
    std::vector<Keyed> keyed;
    for (std::size_t level = 0; level < levels; ++level) {
        const std::size_t c = spec.coord_order[level];
        for (const auto& [lo, hi] : blocks) {
            keyed.resize(hi - lo);
            for (std::size_t p = lo; p < hi; ++p)
                keyed[p - lo] = {states[perm[p] * width + c], perm[p]};
            std::sort(keyed.begin(), keyed.end());
            for (std::size_t p = lo; p < hi; ++p)
                perm[p] = keyed[p - lo].index;
        }
        if (level + 1 == levels)
            break;
        block = (block + counts[level] - 1) / counts[level];
        block = std::max<std::size_t>(block, 1);
        std::vector<std::pair<std::size_t, std::size_t>> next;
        for (const auto& [lo, hi] : blocks)
            for (std::size_t b = lo; b < hi; b += block)
                next.emplace_back(b, std::min(hi, b + block));
        blocks = std::move(next);
    }
    return perm;
}

PilotStats pilot_stats(const ReactionNetwork& net, std::span<const double> x0, const SimConfig& config,
                       std::uint64_t n_pilot, std::uint64_t seed)
{
    if (n_pilot < 2)
        throw std::invalid_argument("pilot_stats: need at least 2 pilot runs");
    config.validate();
    const std::size_t l = net.species_count();
    const std::size_t rows = static_cast<std::size_t>(config.steps) + 1;
    std::vector<double> sum(rows * l, 0.0), mean(rows * l, 0.0), m2(rows * l, 0.0);

    Mrg32k3a rng = Mrg32k3a::stream(seed, 0);
    Stepper stepper(net, config);
    std::vector<double> x(l), u(net.reaction_count());
    for (std::uint64_t p = 0; p < n_pilot; ++p) {
        std::copy(x0.begin(), x0.end(), x.begin());
        const double count = static_cast<double>(p + 1);
        for (std::size_t j = 0; j < rows; ++j) {
            if (j > 0) {
                for (double& v : u)
                    v = rng.next();
                stepper.advance(x, u);
            }
            for (std::size_t i = 0; i < l; ++i) {
                const std::size_t at = j * l + i;
                const double d = x[i] - mean[at];
                mean[at] += d / count;
                m2[at] += d * (x[i] - mean[at]);
            }
        }
        rng.next_substream();
    }
    PilotStats s;
    s.width = l;
    s.mean = mean;
    s.sd.resize(rows * l);
    for (std::size_t at = 0; at < rows * l; ++at)
        s.sd[at] = std::max(pilot_sd_floor, std::sqrt(m2[at] / static_cast<double>(n_pilot - 1)));
    return s;
}

double logistic_map(double x, double mu, double sigma)
{
    sigma = std::max(sigma, pilot_sd_floor);
    const double v = 1.0 / (1.0 + std::exp(-(x - mu + 2 * sigma) / (4 * sigma)));
    constexpr double lo = 0x1p-1000;
    constexpr double hi = 1.0 - 0x1p-53;
    return v < lo ? lo : (v > hi ? hi : v);
}

std::vector<std::uint32_t> ImportanceSorter::order(std::span<const double> states, std::size_t width,
                                                   std::size_t) const
{
    return sort_by_importance(states, width, h_);
}

BatchSorter::BatchSorter(BatchSpec spec) : spec_(std::move(spec))
{
    // Width-independent checks; coordinates are validated against states later.
    spec_.validate(std::max<std::size_t>(spec_.coord_order.size(),
                                         *std::max_element(spec_.coord_order.begin(), spec_.coord_order.end()) + 1));
}

std::string BatchSorter::name() const
{
    std::ostringstream os;
    os << "batch:";
    for (std::size_t j = 0; j < spec_.coord_order.size(); ++j)
        os << (j ? "," : "") << "X" << spec_.coord_order[j] + 1;
    os << ":";
    for (std::size_t j = 0; j < spec_.exponents.size(); ++j)
        os << (j ? "," : "") << spec_.exponents[j];
    return os.str();
}

std::vector<std::uint32_t> BatchSorter::order(std::span<const double> states, std::size_t width,
                                              std::size_t) const
{
    return batch_sort(states, width, spec_);
}

std::vector<std::uint32_t> BatchSorter::presort(std::span<const double> coords, std::size_t n) const
{
    const std::size_t l = spec_.coord_order.size();
    if (coords.size() != n * l)
        throw std::invalid_argument("batch presort: expected n rows of l coordinates");
    BatchSpec on_points{{}, spec_.exponents};
    for (std::size_t j = 0; j < l; ++j)
        on_points.coord_order.push_back(j);
    return batch_sort(coords, l, on_points);
}

std::vector<std::uint32_t> Sorter::presort(std::span<const double> coords, std::size_t n) const
{
    if (coords.size() != n)
        throw std::invalid_argument("presort: expected one coordinate per point");
    return sort_by_importance(coords, 1, coordinate_importance(0));
}

std::vector<std::uint32_t> presort_points(std::span<const double> coords, std::size_t n, std::size_t l,
                                          const Sorter& sorter)
{
    if (l != sorter.sort_dimension())
        throw std::invalid_argument("presort_points: sorter needs " + std::to_string(sorter.sort_dimension())
                                    + " sorting coordinates");
    return sorter.presort(coords, n);
}

namespace {

using json = nlohmann::json;

std::size_t coordinate_of(const json& j, const ReactionNetwork& net)
{
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        return parse_functional(s, net).index;
    }
    const auto i = j.get<long long>();
    if (i < 1 || static_cast<std::size_t>(i) > net.species_count())
        throw std::invalid_argument("sorter: coordinate " + std::to_string(i) + " out of range (1-based)");
    return static_cast<std::size_t>(i - 1);
}

}  // namespace

std::shared_ptr<const Sorter> make_sorter(const std::string& json_config, const SorterContext& ctx)
{
    if (!ctx.net)
        throw std::invalid_argument("make_sorter: network required");
    const ReactionNetwork& net = *ctx.net;
    const json cfg = json::parse(json_config);
    const std::string kind = cfg.at("kind").get<std::string>();
    if (kind == "oslaif") {
        std::vector<Functional> targets;
        if (cfg.contains("functionals"))
            for (const auto& f : cfg["functionals"])
                targets.push_back(parse_functional(f.get<std::string>(), net));
        else if (cfg.contains("functional"))
            targets.push_back(parse_functional(cfg["functional"].get<std::string>(), net));
        else
            targets = ctx.g;
        if (targets.empty())
            throw std::invalid_argument("oslaif sorter: no target functional");
        if (targets.size() == 1)
            return std::make_shared<ImportanceSorter>(oslaif(net, targets[0], ctx.config.tau(), ctx.config.mode));
        std::vector<ImportanceFunction> parts;
        for (const auto& f : targets)
            parts.push_back(oslaif(net, f, ctx.config.tau(), ctx.config.mode));
        return std::make_shared<ImportanceSorter>(average_importance(std::move(parts)));
    }
    if (kind == "coordinate")
        return std::make_shared<ImportanceSorter>(coordinate_importance(coordinate_of(cfg.at("coord"), net)));
    if (kind == "batch") {
        BatchSpec spec;
        for (const auto& c : cfg.at("order"))
            spec.coord_order.push_back(coordinate_of(c, net));
        if (cfg.contains("exponents")) {
            spec.exponents = cfg["exponents"].get<std::vector<double>>();
        } else {
            spec.exponents.assign(spec.coord_order.size(), 1.0 / static_cast<double>(spec.coord_order.size()));
        }
        spec.validate(net.species_count());
        return std::make_shared<BatchSorter>(std::move(spec));
    }
    if (kind == "hilbert") {
        if (net.species_count() < 2)
            throw std::invalid_argument("hilbert sorter: needs at least two state coordinates");
        HilbertSpec spec;
        spec.bits = cfg.value("bits", 0);
        const std::uint64_t pilot_n = cfg.value("pilot_n", std::uint64_t(4096));
        // Pilot runs use their own seed family so they never overlap replications.
        spec.stats = pilot_stats(net, ctx.x0, ctx.config, pilot_n, ctx.seed ^ 0x9e3779b97f4a7c15ull);
        return std::make_shared<HilbertSorter>(std::move(spec));
    }
    throw std::invalid_argument("unknown sorter kind '" + kind + "'");
}

std::string sorter_json_from_short(const std::string& spec)
{
    if (!spec.empty() && spec.front() == '{')
        return spec;
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    for (std::string p; std::getline(ss, p, ':');)
        parts.push_back(p);
    if (parts.empty())
        throw std::invalid_argument("empty sorter spec");
    auto list = [](const std::string& s) {
        json arr = json::array();
        std::stringstream ls(s);
        for (std::string item; std::getline(ls, item, ',');) {
            const bool numeric = !item.empty() && item.find_first_not_of("0123456789.eE+-") == std::string::npos;
            if (numeric)
                arr.push_back(item.find_first_of(".eE") == std::string::npos ? json(std::stoll(item))
                                                                             : json(std::stod(item)));
            else
                arr.push_back(item);
        }
        return arr;
    };
    json j;
    j["kind"] = parts[0];
    if (parts[0] == "oslaif" && parts.size() > 1) {
        j["functionals"] = list(parts[1]);
    } else if (parts[0] == "coordinate" && parts.size() > 1) {
        j["coord"] = list(parts[1]).at(0);
    } else if (parts[0] == "batch") {
        if (parts.size() < 2)
            throw std::invalid_argument("batch sorter spec needs coordinates: batch:1,2[:0.5,0.5]");
        j["order"] = list(parts[1]);
        if (parts.size() > 2) {
            json e = json::array();
            std::stringstream es(parts[2]);
            for (std::string item; std::getline(es, item, ',');)
                e.push_back(std::stod(item));
            j["exponents"] = e;
        }
    } else if (parts[0] == "hilbert" && parts.size() > 1) {
        j["bits"] = std::stoi(parts[1]);
    }
    return j.dump();
}

}  // namespace arqmc
