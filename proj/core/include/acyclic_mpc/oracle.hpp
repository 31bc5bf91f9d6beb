#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "acyclic_mpc/cec.hpp"
#include "acyclic_mpc/hypergraph.hpp"
#include "acyclic_mpc/relation.hpp"

// Slow, deliberately simple reference implementations. None of them call
// into the algorithms they are meant to check.
namespace acyclic_mpc::oracle {

/// Exact join by backtracking over attributes in id order. Throws
/// std::length_error once the output exceeds `cap` tuples.
Relation join(const Instance& q, std::size_t cap = 100000);

/// Full semi-join reduction along `t` followed by sort-merge joins.
Relation yannakakis(const Instance& q, const HyperedgeTree& t);

/// Minimum number of edges covering every attribute, by exhaustive search.
/// Throws std::length_error for more than 20 edges.
std::size_t min_cover(const Hypergraph& g);

/// True iff some labelled tree over the edges satisfies the connectedness
/// requirement. Enumerates Pruefer sequences; throws std::length_error for
/// more than 8 edges.
bool is_acyclic(const Hypergraph& g);

/// One cluster per cover member, ordered by owner: the walk from the owner
/// up to, but excluding, its nearest proper ancestor in the cover.
std::vector<std::vector<EdgeId>> clusters(const Cec& cover);

/// Every k-group over `clusters`: one edge from each of k distinct clusters,
/// as sorted multisets without repeats.
std::vector<std::vector<EdgeId>> k_groups(std::span<const std::vector<EdgeId>> clusters, std::size_t k);

/// Every super-k-group of a decomposition, in ids of the decomposed tree:
/// k-groups over all remainder clusters and the non-root clusters of each
/// part.
std::vector<std::vector<EdgeId>> super_k_groups(const Decomposition& d, std::size_t k);

/// True iff the multiset can be assigned to pairwise distinct clusters,
/// by trying every assignment.
bool is_k_group(std::span<const std::vector<EdgeId>> clusters, std::span<const EdgeId> group);

struct OracleResult {
    Relation join;
    std::size_t min_cover_size = 0;
    /// Integral cover exponent; equals min_cover_size for acyclic queries.
    std::size_t agm_exponent = 0;
};

OracleResult evaluate(const Instance& q, std::size_t cap = 100000);

}  // namespace acyclic_mpc::oracle
