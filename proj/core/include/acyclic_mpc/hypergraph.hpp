#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "acyclic_mpc/attr_set.hpp"

namespace acyclic_mpc {

using EdgeId = std::uint32_t;

/// Attributes plus a list of hyperedges. Hyperedges are identified by their
/// position, so two edges with the same attributes stay distinct.
///
/// The attribute name table is shared across every hypergraph derived from
/// the same query (residual graphs, decompositions), which keeps attribute
/// ids stable during recursion.
class Hypergraph {
public:
    Hypergraph() = default;

    /// Throws std::invalid_argument when an edge references an attribute
    /// outside `attribute_names`, when there are no edges, or when a label
    /// list of the wrong length is supplied.
    Hypergraph(std::vector<std::string> attribute_names, std::vector<AttrSet> edges,
               std::vector<std::string> edge_labels = {});

    std::size_t num_edges() const { return edges_.size(); }
    AttrSet edge(EdgeId e) const { return edges_.at(e); }
    std::span<const AttrSet> edges() const { return edges_; }

    /// V: every attribute that occurs in some edge.
    AttrSet attributes() const;

    const std::vector<std::string>& attribute_names() const { return names_; }
    const std::string& attribute_name(AttrId a) const { return names_.at(a); }
    std::optional<AttrId> find_attribute(std::string_view name) const;

    /// Relation name when one was supplied, otherwise the attribute string.
    std::string label(EdgeId e) const;
    bool has_explicit_labels() const { return !labels_.empty(); }

    /// Lowest-id edge whose label matches.
    std::optional<EdgeId> find_edge(std::string_view label) const;

    /// Concatenated attribute names ("ABC"), comma separated when some name
    /// is longer than one character.
    std::string format(AttrSet attrs) const;

    /// Parses a string produced by format(). Throws std::invalid_argument.
    AttrSet parse_attrs(std::string_view text) const;

    /// e is a subset of some other edge.
    bool is_subsumed(EdgeId e) const;
    bool is_clean() const;

    /// New graph holding `keep` (in that order) with the same attribute table.
    Hypergraph subgraph(std::span<const EdgeId> keep) const;

    /// Same edges with `attr` deleted from each; labels become automatic.
    Hypergraph without_attribute(AttrId attr) const;

private:
    std::vector<std::string> names_;
    std::vector<AttrSet> edges_;
    std::vector<std::string> labels_;
};

/// A rooted tree whose nodes are the hyperedges of a graph.
///
/// The structure is checked on construction (one root, every node reachable,
/// no cycles); the connectedness requirement is checked separately by
/// validate_tree() so that broken trees can be represented and rejected.
class HyperedgeTree {
public:
    HyperedgeTree() = default;

    /// Throws std::invalid_argument if `parent` does not describe a rooted
    /// tree over all edges of `graph`.
    HyperedgeTree(Hypergraph graph, std::vector<std::optional<EdgeId>> parent);

    const Hypergraph& graph() const { return graph_; }
    std::size_t size() const { return parent_.size(); }
    EdgeId root() const { return root_; }
    std::optional<EdgeId> parent(EdgeId e) const { return parent_.at(e); }
    const std::vector<std::optional<EdgeId>>& parents() const { return parent_; }

    /// Children in ascending id order.
    std::span<const EdgeId> children(EdgeId e) const { return children_.at(e); }

    /// Out-degree zero in the directed (rooted) view.
    bool is_leaf(EdgeId e) const { return children_.at(e).empty(); }

    /// Degree at most one in the undirected view; the root can be a raw leaf.
    bool is_raw_leaf(EdgeId e) const;

    /// `a` is an ancestor of `d` or equal to it.
    bool is_ancestor_or_self(EdgeId a, EdgeId d) const;

    /// Children visited before parents, lowest child id first.
    std::vector<EdgeId> post_order() const;
    /// Parents visited before children, lowest child id first.
    std::vector<EdgeId> pre_order() const;
    /// Nodes of the subtree rooted at `e`, in pre-order.
    std::vector<EdgeId> subtree(EdgeId e) const;

    /// Same undirected tree rooted at `new_root`.
    HyperedgeTree rerooted(EdgeId new_root) const;

    /// Lowest-id raw leaf.
    EdgeId lowest_raw_leaf() const;

private:
    Hypergraph graph_;
    std::vector<std::optional<EdgeId>> parent_;
    std::vector<std::vector<EdgeId>> children_;
    EdgeId root_ = 0;
};

/// GYO ear elimination with lowest-id tie-breaking. Returns a tree rooted at
/// the lowest-id raw leaf, or nullopt when the hypergraph is cyclic.
std::optional<HyperedgeTree> build_join_tree(const Hypergraph& g);

/// True iff every attribute's nodes form a connected subtree.
bool validate_tree(const HyperedgeTree& t);

/// Highest node containing `attr`. Throws std::invalid_argument when no edge
/// contains it.
EdgeId summit(const HyperedgeTree& t, AttrId attr);

/// Attributes of `e` whose summit is `e`.
AttrSet disappearing_attrs(const HyperedgeTree& t, EdgeId e);

/// One contraction performed by cleanse_links(): `small` was removed and its
/// neighbours were reattached to `big`.
struct LinkRemoval {
    EdgeId small;
    EdgeId big;
    bool big_was_parent;
};

struct CleansedTree {
    HyperedgeTree tree;
    /// origin[new id] = id in the input tree.
    std::vector<EdgeId> origin;
    /// Removals in execution order, expressed in input-tree ids.
    std::vector<LinkRemoval> removals;
};

/// Repeatedly removes a node that is a subset of a tree neighbour. Links are
/// scanned in pre-order (child against parent first, then parent against
/// child) and the scan restarts after each removal. When the two sets are
/// equal the higher id is removed.
CleansedTree cleanse_links(const HyperedgeTree& t);

}  // namespace acyclic_mpc
