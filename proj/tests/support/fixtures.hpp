#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "acyclic_mpc/engine.hpp"
#include "acyclic_mpc/hypergraph.hpp"
#include "acyclic_mpc/relation.hpp"
#include "acyclic_mpc/workload.hpp"

namespace fixtures {

using namespace acyclic_mpc;

/// The 13-edge query over attributes A..O with its textbook join tree,
/// rooted at HN. Edge ids follow the order
/// ABC BD BO EFG BCE CEF CEJ HI LM EHJ KL HK HN.
Hypergraph running_graph();
HyperedgeTree running_tree();

/// Edge ids of the running example by name.
EdgeId id(const Hypergraph& g, const std::string& label);
std::vector<EdgeId> ids(const Hypergraph& g, const std::vector<std::string>& labels);

/// A random acyclic hypergraph together with a witness tree: a random
/// labelled tree on `edges` nodes, where each attribute occupies a random
/// connected set of nodes. Every edge is non-empty. The result may contain
/// subsumed edges unless `clean` is set.
struct RandomQuery {
    Hypergraph graph;
    HyperedgeTree witness;
};
RandomQuery random_acyclic(std::mt19937_64& rng, std::size_t max_edges, std::size_t max_attrs, bool clean);

/// Random data for `g` with the given skew; values bounded by `domain`.
Instance random_instance(const Hypergraph& g, std::uint64_t seed, std::uint64_t size, std::uint64_t domain,
                         Skew skew);

/// Full tuples drawn over every attribute (the skew hitting only
/// `skewed`, or every attribute when empty) are projected onto each edge,
/// then `noise` independent tuples per edge are added. The join therefore
/// holds at least the planted tuples.
Instance planted_instance(const Hypergraph& g, std::uint64_t seed, std::uint64_t planted, std::uint64_t noise,
                          std::uint64_t domain, Skew skew, const std::vector<std::string>& skewed);

/// Size of the join, counted bottom-up along `t` without materializing it.
long double join_count(const Instance& q, const HyperedgeTree& t);

/// Reverse topological orders of `t` (children first) drawn at random.
std::vector<EdgeId> random_bottom_up_order(const HyperedgeTree& t, std::mt19937_64& rng);

}  // namespace fixtures
