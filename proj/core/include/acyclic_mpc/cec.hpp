#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "acyclic_mpc/hypergraph.hpp"

namespace acyclic_mpc {

/// The canonical edge cover F of a hypergraph, induced by a rooted tree.
class Cec {
public:
    Cec() = default;
    /// `members[e]` says whether edge e is in F. Throws std::invalid_argument
    /// on a size mismatch.
    Cec(HyperedgeTree tree, std::vector<bool> members);

    const HyperedgeTree& tree() const { return tree_; }
    const Hypergraph& graph() const { return tree_.graph(); }
    bool contains(EdgeId e) const { return members_.at(e); }
    std::size_t size() const;
    /// Members in ascending id order.
    std::vector<EdgeId> members() const;
    const std::vector<bool>& member_flags() const { return members_; }

    /// Lowest proper ancestor of `e` that belongs to F.
    std::optional<EdgeId> lowest_f_ancestor(EdgeId e) const;

    /// Same members and same tree shape.
    friend bool operator==(const Cec& a, const Cec& b) {
        return a.members_ == b.members_ && a.tree_.parents() == b.tree_.parents();
    }

private:
    HyperedgeTree tree_;
    std::vector<bool> members_;
};

/// Post-order (lowest child first) run of the greedy cover procedure.
Cec edge_cover(const HyperedgeTree& t);

/// Same procedure over a caller-supplied order. Throws std::invalid_argument
/// unless `order` is a permutation listing every node after its children.
Cec edge_cover(const HyperedgeTree& t, std::span<const EdgeId> order);

struct SignaturePath {
    EdgeId owner;
    /// From the highest node down to the owner.
    std::vector<EdgeId> nodes;
};

/// Throws std::invalid_argument when `f` is not a member or the root is not
/// in F.
SignaturePath signature_path(const Cec& cover, EdgeId f);

/// One cluster per member of F, ordered by owner id. Clusters may overlap.
struct Clustering {
    std::vector<EdgeId> owners;
    std::vector<std::vector<EdgeId>> clusters;

    std::size_t size() const { return clusters.size(); }

    /// True iff the edges (a multiset) can be drawn from pairwise distinct
    /// clusters, one edge per cluster.
    bool is_k_group(std::span<const EdgeId> group) const;
};

/// Throws std::invalid_argument when the root of the tree is not in F.
Clustering signature_clustering(const Cec& cover);

struct Anchor {
    EdgeId leaf;
    AttrId attribute;
    EdgeId fhat;

    friend bool operator==(const Anchor&, const Anchor&) = default;
};

/// Deterministic anchor: lowest-id qualifying fhat, then its lowest-id
/// child, then the lowest attribute of that child missing from fhat, then
/// the lowest-id member of F holding that attribute. Throws
/// std::invalid_argument if the graph is not clean or has fewer than two
/// edges.
Anchor find_anchor(const Cec& cover);

/// Valid anchor attributes of `leaf`; empty when `leaf` is not an anchor leaf.
AttrSet anchor_attributes(const Cec& cover, EdgeId leaf);

/// The anchor (leaf, attr) if it is valid.
std::optional<Anchor> make_anchor(const Cec& cover, EdgeId leaf, AttrId attr);

/// Bijection between the surviving edges of a derived graph and the edges of
/// its source graph. Removed edges map to nothing.
struct ResidualMap {
    std::vector<std::optional<EdgeId>> forward;
    std::vector<EdgeId> inverse;

    static ResidualMap identity(std::size_t n);

    /// `then` applied after this map.
    ResidualMap compose(const ResidualMap& then) const;
};

/// Output of Simplification 1 before cleansing. The tree keeps the edge ids
/// of the input, so the map is the identity.
struct Residual {
    Cec cover;  ///< T' with F' per the residual rule
    ResidualMap map;
    Anchor anchor;
    bool leaf_subsumed = false;
};

/// Deletes the anchor attribute from every node.
Residual remove_attribute(const Cec& cover, const Anchor& anchor);

struct Cleansed {
    Cec cover;        ///< T* and F*
    ResidualMap map;  ///< source graph to G*
    /// Contractions in source ids. Each `small` relation must be semi-joined
    /// into `big` before it is dropped.
    std::vector<LinkRemoval> removals;
};

Cleansed cleanse(const Residual& residual);

/// One piece of a decomposition, with its edges renumbered.
struct SubTree {
    Cec cover;
    /// origin[local id] = id in the decomposed tree.
    std::vector<EdgeId> origin;
    /// For pieces hanging below the signature path: the node z.
    std::optional<EdgeId> z;
};

struct Decomposition {
    Anchor anchor;
    SignaturePath sigpath;
    /// One piece per z, ordered by z.
    std::vector<SubTree> parts;
    /// The tree with the signature path's subtree removed. Absent only when
    /// that subtree is the whole tree.
    std::optional<SubTree> remainder;
};

Decomposition decompose(const Cec& cover, const Anchor& anchor);

/// True iff the preimage of a k-group of `c_star` is a k-group of `c`.
/// Throws std::invalid_argument when `group` is not a k-group of `c_star`.
bool check_distinct_clusters_1(const Clustering& c_star, const ResidualMap& m, const Clustering& c,
                               std::span<const EdgeId> group);

/// Clusters a super-k-group may draw from, in source ids: every cluster of
/// the remainder and every non-root cluster of each part.
std::vector<std::vector<EdgeId>> super_group_clusters(const Decomposition& d);

/// True iff a super-k-group (source ids) is a k-group of `c`. Throws
/// std::invalid_argument when `group` is not a super-k-group.
bool check_distinct_clusters_2(const Decomposition& d, const Clustering& c, std::span<const EdgeId> group);

/// Bipartite matching of a multiset of edges into distinct clusters.
bool matches_distinct_clusters(std::span<const std::vector<EdgeId>> clusters, std::span<const EdgeId> group);

}  // namespace acyclic_mpc
