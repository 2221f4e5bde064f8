#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "arqmc/config.hpp"
#include "arqmc/network.hpp"

namespace arqmc {

// Scalar ordering key h over states (l = 1).
class ImportanceFunction {
  public:
    using Fn = std::function<double(std::span<const double>)>;

    ImportanceFunction() = default;
    ImportanceFunction(Fn fn, std::string name) : fn_(std::move(fn)), name_(std::move(name)) {}

    double operator()(std::span<const double> x) const { return fn_(x); }
    const std::string& name() const { return name_; }

  private:
    Fn fn_;
    std::string name_;
};

ImportanceFunction coordinate_importance(std::size_t i);

// One-step look-ahead: h(x) = E[g(X_1) | X_0 = x] (exact for coordinates and
// powers; continuity-corrected normal tail for indicators).
ImportanceFunction oslaif(const ReactionNetwork& net, const Functional& g, double tau,
                          StateMode mode = StateMode::integer);

// Mean of several importance functions (shared sort for multiple outputs).
ImportanceFunction average_importance(std::vector<ImportanceFunction> parts);

// pi with h(x_pi(0)) <= ... <= h(x_pi(n-1)); ties keep index order.
// states holds n rows of `width` entries. Throws on a non-finite key.
std::vector<std::uint32_t> sort_by_importance(std::span<const double> states, std::size_t width,
                                              const ImportanceFunction& h);

struct BatchSpec {
    std::vector<std::size_t> coord_order;
    std::vector<double> exponents;

    void validate(std::size_t width) const;
    // n_j = ceil(n^alpha_j).
    std::vector<std::uint64_t> batch_counts(std::uint64_t n) const;
};

std::vector<std::uint32_t> batch_sort(std::span<const double> states, std::size_t width, const BatchSpec& spec);

// Per-step mean and SD of every coordinate from pilot MC runs; rows are
// steps 0..s of width l.
struct PilotStats {
    std::size_t width = 0;
    std::vector<double> mean;
    std::vector<double> sd;

    std::size_t steps() const { return width ? mean.size() / width - 1 : 0; }
};

constexpr double pilot_sd_floor = 1e-9;

PilotStats pilot_stats(const ReactionNetwork& net, std::span<const double> x0, const SimConfig& config,
                       std::uint64_t n_pilot, std::uint64_t seed);

// Psi(x) = 1 / (1 + exp(-(x - mu + 2 sigma) / (4 sigma))), kept inside (0,1).
double logistic_map(double x, double mu, double sigma);

// Hilbert index of a cell on a 2^bits grid in coords.size() dimensions
// (Skilling's transpose form, reflected Gray code order).
std::uint64_t hilbert_index(std::span<const std::uint32_t> cell, int bits);
std::vector<std::uint32_t> hilbert_cell(std::uint64_t index, std::size_t dims, int bits);

int default_hilbert_bits(std::uint64_t n, std::size_t dims);

struct HilbertSpec {
    int bits = 0;  // 0: default_hilbert_bits
    PilotStats stats;
};

// `step` selects the pilot row describing the states being sorted.
std::vector<std::uint32_t> hilbert_sort(std::span<const double> states, std::size_t width,
                                        const HilbertSpec& spec, std::size_t step);

// Strategy used by Array-RQMC: orders chains each step and pre-orders points.
class Sorter {
  public:
    virtual ~Sorter() = default;

    // l: number of leading point coordinates used for the pairing.
    virtual std::size_t sort_dimension() const { return 1; }
    virtual std::string name() const = 0;

    // Chain order before transition `step` (0-based; states are X_step).
    virtual std::vector<std::uint32_t> order(std::span<const double> states, std::size_t width,
                                             std::size_t step) const = 0;

    // Order of n points given their first l coordinates (n rows of l).
    virtual std::vector<std::uint32_t> presort(std::span<const double> coords, std::size_t n) const;
};

class ImportanceSorter : public Sorter {
  public:
    explicit ImportanceSorter(ImportanceFunction h) : h_(std::move(h)) {}
    std::string name() const override { return h_.name(); }
    std::vector<std::uint32_t> order(std::span<const double> states, std::size_t width,
                                     std::size_t step) const override;

  private:
    ImportanceFunction h_;
};

class BatchSorter : public Sorter {
  public:
    explicit BatchSorter(BatchSpec spec);
    std::size_t sort_dimension() const override { return spec_.coord_order.size(); }
    std::string name() const override;
    std::vector<std::uint32_t> order(std::span<const double> states, std::size_t width,
                                     std::size_t step) const override;
    std::vector<std::uint32_t> presort(std::span<const double> coords, std::size_t n) const override;

  private:
    BatchSpec spec_;
};

class HilbertSorter : public Sorter {
  public:
    explicit HilbertSorter(HilbertSpec spec) : spec_(std::move(spec)) {}
    std::string name() const override;
    std::vector<std::uint32_t> order(std::span<const double> states, std::size_t width,
                                     std::size_t step) const override;

  private:
    HilbertSpec spec_;
};

// Everything a sorter configuration may need to build itself.
struct SorterContext {
    const ReactionNetwork* net = nullptr;
    std::vector<double> x0;
    SimConfig config;
    std::vector<Functional> g;
    std::uint64_t seed = 0;
};

// JSON text: {"kind": "oslaif" | "coordinate" | "batch" | "hilbert", ...}.
// Coordinates are 1-based or species names.
std::shared_ptr<const Sorter> make_sorter(const std::string& json_config, const SorterContext& ctx);

// Short form used on the command line ("oslaif", "coordinate:1",
// "batch:1,2:0.5,0.5", "hilbert", "hilbert:6") converted to JSON text.
std::string sorter_json_from_short(const std::string& spec);

// Ordering of the point set's first l coordinates compatible with `sorter`.
std::vector<std::uint32_t> presort_points(std::span<const double> coords, std::size_t n, std::size_t l,
                                          const Sorter& sorter);

}  // namespace arqmc
