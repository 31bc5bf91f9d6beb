#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "acyclic_mpc/hypergraph.hpp"
#include "acyclic_mpc/relation.hpp"

namespace acyclic_mpc {

/// Malformed or inconsistent user input.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Skew { Uniform, Zipf, Heavy };

struct GeneratorSpec {
    std::uint64_t seed = 1;
    std::uint64_t size = 100;     ///< distinct tuples wanted
    std::uint64_t domain = 100;   ///< values are drawn from [0, domain)
    Skew skew = Skew::Uniform;
    double zipf_s = 1.2;
    double heavy_fraction = 0.5;  ///< share of draws that hit value 0
    /// Attributes the skew applies to; empty means every attribute.
    std::vector<std::string> skewed;
};

struct RelationSpec {
    std::string name;
    std::vector<std::string> scheme;
    std::optional<std::filesystem::path> csv;
    std::optional<GeneratorSpec> generator;
};

/// JSON document:
///   {"attributes": [...],
///    "relations": [{"name", "scheme": [...], "csv": path | "generator": {...}}],
///    "parents": [null | index, ...]}          (optional)
/// Generator fields: seed, size, domain, skew ("uniform" | "zipf" | "heavy"),
/// s, heavy_fraction, skewed. A top-level "generator" object supplies
/// defaults for relations that name neither source.
struct QuerySpec {
    std::vector<std::string> attributes;
    std::vector<RelationSpec> relations;
    std::optional<std::vector<std::optional<EdgeId>>> parents;
    std::filesystem::path base_dir;  ///< relative csv paths resolve here

    static QuerySpec from_json(const nlohmann::json& j, std::filesystem::path base_dir = {});
    static QuerySpec load(const std::filesystem::path& path);
};

Hypergraph spec_graph(const QuerySpec& spec);

/// Draws `spec.size` distinct tuples (or as many as 20 * size attempts find).
/// `stream` separates relations that share a seed. Output is sorted.
Relation generate_relation(const Hypergraph& g, AttrSet scheme, const GeneratorSpec& spec, std::uint64_t stream);

/// Reads or generates every relation. A seed override replaces each
/// generator's seed.
Instance materialize(const QuerySpec& spec, std::optional<std::uint64_t> seed = std::nullopt);

/// Header row of attribute names in any order, then unsigned integers.
Relation read_csv(std::istream& in, const Hypergraph& g, AttrSet scheme);
Relation read_csv(const std::filesystem::path& path, const Hypergraph& g, AttrSet scheme);
void write_csv(std::ostream& out, const Relation& r, const Hypergraph& g);

/// Parent array as a JSON list of null or indices.
std::vector<std::optional<EdgeId>> parse_parents(const nlohmann::json& j);

}  // namespace acyclic_mpc
