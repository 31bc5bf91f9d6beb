#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "acyclic_mpc/cec.hpp"
#include "acyclic_mpc/load.hpp"
#include "acyclic_mpc/relation.hpp"
#include "acyclic_mpc/simcluster.hpp"

namespace acyclic_mpc {

struct EngineConfig {
    double c_load = 4;   ///< allowed ratio of measured load to L
    double c_alloc = 4;  ///< machine allocation constant
    double c_cfg = 4;    ///< allowed configurations per machine
    /// Recompute covers after every simplification and compare.
    bool verify_lemmas = false;
    /// 0 selects 2 * (|V| + |E|).
    std::size_t round_cap = 0;
};

/// Raised when a property that the theory guarantees fails at run time.
class LemmaViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Raised when the configurations cannot all receive a machine.
class BudgetExhausted : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A heavy anchor value, or a closed range [lo, hi] of light anchor values.
struct Configuration {
    bool heavy = false;
    Value lo = 0;
    Value hi = std::numeric_limits<Value>::max();
    std::uint64_t frequency = 0;  ///< signature-path frequency in words
    std::uint64_t machines = 0;
};

/// Word-weighted signature-path frequency of every anchor value, ascending.
using FrequencyTable = std::vector<std::pair<Value, std::uint64_t>>;

FrequencyTable frequency_table(const Cec& cover, const Anchor& anchor, std::span<const Relation> rels);

/// Heavy values (frequency >= threshold) and a greedy sweep of light
/// intervals, each holding at most `threshold` words. Intervals tile the
/// whole value domain between them.
std::vector<Configuration> split_configurations(const FrequencyTable& freq, long double threshold);

/// Largest scale c in (0, c_max] with sum(ceil(c * demand)) <= budget, or 0
/// when even one machine per entry does not fit.
long double fit_scale(std::span<const long double> demands, std::uint64_t budget, long double c_max);

/// Statistics of one recursion step that split into configurations.
struct LevelAudit {
    std::size_t depth = 0;
    std::size_t machines = 0;
    std::size_t edges = 0;
    std::size_t attributes = 0;
    long double L = 0;
    double lambda = 1;       ///< heavy threshold as a multiple of L
    double scale = 0;        ///< allocation constant actually applied
    std::size_t heavy = 0;
    std::size_t light = 0;
    bool configs_ok = true;  ///< configurations <= c_cfg * machines
    bool partition_ok = true;
    AuditReport budget;
    std::vector<double> grid_scales;  ///< per light configuration
};

struct EngineResult {
    Relation output;  ///< collected, sorted, duplicate free
    LoadReport load;
    LoadProfile profile;  ///< top-level, sizes in words
    Cec cover;            ///< top-level (after cleaning)
    Clustering clustering;
    std::vector<EdgeId> kept_edges;  ///< input ids surviving the initial clean
    std::uint64_t input_words = 0;
    std::vector<Configuration> top_configs;
    std::vector<LevelAudit> levels;

    double ratio() const;
    bool audits_ok() const;
    bool configs_ok() const;
};

/// Runs the join on a simulated cluster of `machines` machines. Throws
/// std::invalid_argument for an invalid tree or zero machines.
EngineResult run_engine(const Instance& q, const HyperedgeTree& t, std::size_t machines,
                        const EngineConfig& cfg = {});

}  // namespace acyclic_mpc
