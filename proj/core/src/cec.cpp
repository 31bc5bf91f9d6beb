#include "acyclic_mpc/cec.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

namespace acyclic_mpc {

namespace {

// Builds a tree over `nodes` (ascending ids of `t`) using `parent_of` for the
// links; `parent_of` returns an id of `t` or nothing for the new root.
SubTree make_subtree(const Cec& cover, std::vector<EdgeId> nodes,
                     const std::function<std::optional<EdgeId>(EdgeId)>& parent_of,
                     const std::function<bool(EdgeId)>& in_cover, std::optional<EdgeId> z) {
    std::sort(nodes.begin(), nodes.end());
    const HyperedgeTree& t = cover.tree();
    std::vector<EdgeId> local(t.size(), 0);
    for (EdgeId i = 0; i < nodes.size(); ++i) local[nodes[i]] = i;
    std::vector<std::optional<EdgeId>> parent(nodes.size());
    std::vector<bool> flags(nodes.size(), false);
    for (EdgeId i = 0; i < nodes.size(); ++i) {
        if (auto p = parent_of(nodes[i])) parent[i] = local[*p];
        flags[i] = in_cover(nodes[i]);
    }
    HyperedgeTree sub(t.graph().subgraph(nodes), std::move(parent));
    return SubTree{Cec(std::move(sub), std::move(flags)), std::move(nodes), z};
}

}  // namespace

Cec::Cec(HyperedgeTree tree, std::vector<bool> members) : tree_(std::move(tree)), members_(std::move(members)) {
    if (members_.size() != tree_.size()) throw std::invalid_argument("cover flags do not match tree size");
}

std::size_t Cec::size() const { return static_cast<std::size_t>(std::count(members_.begin(), members_.end(), true)); }

std::vector<EdgeId> Cec::members() const {
    std::vector<EdgeId> out;
    for (EdgeId e = 0; e < members_.size(); ++e) {
        if (members_[e]) out.push_back(e);
    }
    return out;
}

std::optional<EdgeId> Cec::lowest_f_ancestor(EdgeId e) const {
    for (auto cur = tree_.parent(e); cur; cur = tree_.parent(*cur)) {
        if (members_[*cur]) return cur;
    }
    return std::nullopt;
}

Cec edge_cover(const HyperedgeTree& t) {
    const auto order = t.post_order();
    return edge_cover(t, order);
}

Cec edge_cover(const HyperedgeTree& t, std::span<const EdgeId> order) {
    const std::size_t n = t.size();
    if (order.size() != n) throw std::invalid_argument("order must list every node once");
    std::vector<std::size_t> pos(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        if (order[i] >= n || pos[order[i]] != n) throw std::invalid_argument("order must list every node once");
        pos[order[i]] = i;
    }
    for (EdgeId e = 0; e < n; ++e) {
        if (auto p = t.parent(e); p && pos[e] > pos[*p]) {
            throw std::invalid_argument("order is not reverse topological");
        }
    }
    std::vector<bool> members(n, false);
    AttrSet covered;
    for (EdgeId e : order) {
        if (!(disappearing_attrs(t, e) - covered).empty()) {
            members[e] = true;
            covered |= t.graph().edge(e);
        }
    }
    return Cec(t, std::move(members));
}

SignaturePath signature_path(const Cec& cover, EdgeId f) {
    if (!cover.contains(f)) throw std::invalid_argument("signature path owner must be in F");
    const HyperedgeTree& t = cover.tree();
    if (!cover.contains(t.root())) throw std::invalid_argument("root of the tree is not in F");
    std::vector<EdgeId> nodes{f};
    for (auto cur = t.parent(f); cur && !cover.contains(*cur); cur = t.parent(*cur)) nodes.push_back(*cur);
    std::reverse(nodes.begin(), nodes.end());
    return SignaturePath{f, std::move(nodes)};
}

bool matches_distinct_clusters(std::span<const std::vector<EdgeId>> clusters, std::span<const EdgeId> group) {
    if (group.size() > clusters.size()) return false;
    std::vector<int> owner(clusters.size(), -1);  // cluster -> group slot
    std::function<bool(std::size_t, std::vector<bool>&)> augment = [&](std::size_t g, std::vector<bool>& seen) {
        for (std::size_t c = 0; c < clusters.size(); ++c) {
            if (seen[c]) continue;
            const auto& cl = clusters[c];
            if (std::find(cl.begin(), cl.end(), group[g]) == cl.end()) continue;
            seen[c] = true;
            if (owner[c] < 0 || augment(static_cast<std::size_t>(owner[c]), seen)) {
                owner[c] = static_cast<int>(g);
                return true;
            }
        }
        return false;
    };
    for (std::size_t g = 0; g < group.size(); ++g) {
        std::vector<bool> seen(clusters.size(), false);
        if (!augment(g, seen)) return false;
    }
    return true;
}

bool Clustering::is_k_group(std::span<const EdgeId> group) const { return matches_distinct_clusters(clusters, group); }

Clustering signature_clustering(const Cec& cover) {
    if (!cover.contains(cover.tree().root())) throw std::invalid_argument("root of the tree is not in F");
    Clustering c;
    for (EdgeId f : cover.members()) {
        c.owners.push_back(f);
        c.clusters.push_back(signature_path(cover, f).nodes);
    }
    return c;
}

namespace {

// fhat condition: no non-leaf proper descendant of `f` lies in F.
bool has_only_leaf_f_descendants(const Cec& cover, EdgeId f) {
    const HyperedgeTree& t = cover.tree();
    for (EdgeId d : t.subtree(f)) {
        if (d != f && cover.contains(d) && !t.is_leaf(d)) return false;
    }
    return true;
}

}  // namespace

AttrSet anchor_attributes(const Cec& cover, EdgeId leaf) {
    const HyperedgeTree& t = cover.tree();
    if (leaf >= t.size() || !cover.contains(leaf) || !t.is_leaf(leaf)) return {};
    auto fhat = cover.lowest_f_ancestor(leaf);
    if (!fhat || !has_only_leaf_f_descendants(cover, *fhat)) return {};
    const Hypergraph& g = t.graph();
    AttrSet candidates = g.edge(leaf) - g.edge(*fhat);
    for (EdgeId e : signature_path(cover, leaf).nodes) candidates &= g.edge(e);
    return candidates;
}

std::optional<Anchor> make_anchor(const Cec& cover, EdgeId leaf, AttrId attr) {
    if (!anchor_attributes(cover, leaf).contains(attr)) return std::nullopt;
    return Anchor{leaf, attr, *cover.lowest_f_ancestor(leaf)};
}

Anchor find_anchor(const Cec& cover) {
    const HyperedgeTree& t = cover.tree();
    const Hypergraph& g = t.graph();
    if (t.size() < 2) throw std::invalid_argument("an anchor needs at least two hyperedges");
    if (!g.is_clean()) throw std::invalid_argument("anchors are defined only for clean hypergraphs");
    for (EdgeId fhat : cover.members()) {
        if (t.is_leaf(fhat) || !has_only_leaf_f_descendants(cover, fhat)) continue;
        const EdgeId child = t.children(fhat).front();
        const AttrId attr = (g.edge(child) - g.edge(fhat)).lowest();
        for (EdgeId f : cover.members()) {
            if (g.edge(f).contains(attr)) {
                if (auto a = make_anchor(cover, f, attr)) return *a;
                break;
            }
        }
        throw std::logic_error("anchor construction failed on a clean hypergraph");
    }
    throw std::logic_error("no non-leaf member of F found");
}

ResidualMap ResidualMap::identity(std::size_t n) {
    ResidualMap m;
    m.forward.resize(n);
    m.inverse.resize(n);
    for (EdgeId e = 0; e < n; ++e) {
        m.forward[e] = e;
        m.inverse[e] = e;
    }
    return m;
}

ResidualMap ResidualMap::compose(const ResidualMap& then) const {
    ResidualMap out;
    out.forward.resize(forward.size());
    for (EdgeId e = 0; e < forward.size(); ++e) {
        if (forward[e]) out.forward[e] = then.forward.at(*forward[e]);
    }
    out.inverse.resize(then.inverse.size());
    for (EdgeId e = 0; e < then.inverse.size(); ++e) out.inverse[e] = inverse.at(then.inverse[e]);
    return out;
}

Residual remove_attribute(const Cec& cover, const Anchor& anchor) {
    const HyperedgeTree& t = cover.tree();
    Hypergraph reduced = t.graph().without_attribute(anchor.attribute);
    const bool subsumed = reduced.is_subsumed(anchor.leaf);
    std::vector<bool> flags = cover.member_flags();
    if (subsumed) flags[anchor.leaf] = false;
    HyperedgeTree tree(std::move(reduced), t.parents());
    return Residual{Cec(std::move(tree), std::move(flags)), ResidualMap::identity(t.size()), anchor, subsumed};
}

Cleansed cleanse(const Residual& residual) {
    const HyperedgeTree& t = residual.cover.tree();
    const std::size_t n = t.size();
    std::vector<EdgeId> origin;
    std::vector<LinkRemoval> removals;
    std::optional<HyperedgeTree> tree;

    if (residual.leaf_subsumed) {
        const EdgeId leaf = residual.anchor.leaf;
        for (EdgeId e = 0; e < n; ++e) {
            if (e != leaf) origin.push_back(e);
        }
        std::vector<EdgeId> local(n, 0);
        for (EdgeId i = 0; i < origin.size(); ++i) local[origin[i]] = i;
        std::vector<std::optional<EdgeId>> parent(origin.size());
        for (EdgeId i = 0; i < origin.size(); ++i) {
            if (auto p = t.parent(origin[i])) parent[i] = local[*p];
        }
        tree.emplace(t.graph().subgraph(origin), std::move(parent));
        removals.push_back({leaf, *t.parent(leaf), true});
    } else {
        CleansedTree c = cleanse_links(t);
        origin = std::move(c.origin);
        removals = std::move(c.removals);
        tree.emplace(std::move(c.tree));
    }

    std::vector<bool> flags(origin.size(), false);
    for (EdgeId i = 0; i < origin.size(); ++i) flags[i] = residual.cover.contains(origin[i]);
    for (const LinkRemoval& rm : removals) {
        if (residual.cover.contains(rm.small)) {
            throw std::logic_error("cleansing removed a member of the cover");
        }
    }

    ResidualMap step;
    step.forward.resize(n);
    step.inverse = origin;
    for (EdgeId i = 0; i < origin.size(); ++i) step.forward[origin[i]] = i;

    return Cleansed{Cec(std::move(*tree), std::move(flags)), residual.map.compose(step), std::move(removals)};
}

Decomposition decompose(const Cec& cover, const Anchor& anchor) {
    const HyperedgeTree& t = cover.tree();
    Decomposition d{anchor, signature_path(cover, anchor.leaf), {}, std::nullopt};
    std::vector<bool> on_path(t.size(), false);
    for (EdgeId e : d.sigpath.nodes) on_path[e] = true;

    for (EdgeId z = 0; z < t.size(); ++z) {
        auto p = t.parent(z);
        if (on_path[z] || !p || !on_path[*p]) continue;
        const EdgeId root = *p;
        std::vector<EdgeId> nodes = t.subtree(z);
        nodes.push_back(root);
        d.parts.push_back(make_subtree(
            cover, std::move(nodes),
            [&](EdgeId e) { return e == root ? std::nullopt : t.parent(e); },
            [&](EdgeId e) { return e == root || cover.contains(e); }, z));
    }

    const EdgeId top = d.sigpath.nodes.front();
    std::vector<bool> removed(t.size(), false);
    for (EdgeId e : t.subtree(top)) removed[e] = true;
    std::vector<EdgeId> rest;
    for (EdgeId e = 0; e < t.size(); ++e) {
        if (!removed[e]) rest.push_back(e);
    }
    if (!rest.empty()) {
        d.remainder = make_subtree(
            cover, std::move(rest), [&](EdgeId e) { return t.parent(e); },
            [&](EdgeId e) { return cover.contains(e); }, std::nullopt);
    }
    return d;
}

bool check_distinct_clusters_1(const Clustering& c_star, const ResidualMap& m, const Clustering& c,
                               std::span<const EdgeId> group) {
    if (!c_star.is_k_group(group)) throw std::invalid_argument("not a k-group of the derived clustering");
    std::vector<EdgeId> mapped;
    mapped.reserve(group.size());
    for (EdgeId e : group) mapped.push_back(m.inverse.at(e));
    return c.is_k_group(mapped);
}

std::vector<std::vector<EdgeId>> super_group_clusters(const Decomposition& d) {
    std::vector<std::vector<EdgeId>> out;
    auto add = [&](const SubTree& part, bool skip_root) {
        Clustering c = signature_clustering(part.cover);
        for (std::size_t i = 0; i < c.size(); ++i) {
            if (skip_root && c.owners[i] == part.cover.tree().root()) continue;
            std::vector<EdgeId> mapped;
            for (EdgeId e : c.clusters[i]) mapped.push_back(part.origin[e]);
            out.push_back(std::move(mapped));
        }
    };
    if (d.remainder) add(*d.remainder, false);
    for (const SubTree& part : d.parts) add(part, true);
    return out;
}

bool check_distinct_clusters_2(const Decomposition& d, const Clustering& c, std::span<const EdgeId> group) {
    if (!matches_distinct_clusters(super_group_clusters(d), group)) {
        throw std::invalid_argument("not a super-k-group of the decomposition");
    }
    return c.is_k_group(group);
}

}  // namespace acyclic_mpc
