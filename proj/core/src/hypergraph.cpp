#include "acyclic_mpc/hypergraph.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

namespace acyclic_mpc {

namespace {

bool single_char_names(const std::vector<std::string>& names) {
    return std::all_of(names.begin(), names.end(), [](const std::string& n) { return n.size() == 1; });
}

std::vector<std::vector<EdgeId>> undirected_adjacency(const std::vector<std::optional<EdgeId>>& parent) {
    std::vector<std::vector<EdgeId>> adj(parent.size());
    for (EdgeId e = 0; e < parent.size(); ++e) {
        if (parent[e]) {
            adj[e].push_back(*parent[e]);
            adj[*parent[e]].push_back(e);
        }
    }
    return adj;
}

std::vector<std::optional<EdgeId>> orient(const std::vector<std::vector<EdgeId>>& adj, EdgeId root) {
    std::vector<std::optional<EdgeId>> parent(adj.size());
    std::vector<bool> seen(adj.size(), false);
    std::deque<EdgeId> queue{root};
    seen[root] = true;
    while (!queue.empty()) {
        EdgeId u = queue.front();
        queue.pop_front();
        for (EdgeId v : adj[u]) {
            if (!seen[v]) {
                seen[v] = true;
                parent[v] = u;
                queue.push_back(v);
            }
        }
    }
    return parent;
}

}  // namespace

Hypergraph::Hypergraph(std::vector<std::string> attribute_names, std::vector<AttrSet> edges,
                       std::vector<std::string> edge_labels)
    : names_(std::move(attribute_names)), edges_(std::move(edges)), labels_(std::move(edge_labels)) {
    if (names_.size() > kMaxAttributes) {
        throw std::invalid_argument("too many attributes (limit 64)");
    }
    if (edges_.empty()) {
        throw std::invalid_argument("a hypergraph needs at least one hyperedge");
    }
    if (!labels_.empty() && labels_.size() != edges_.size()) {
        throw std::invalid_argument("edge label count does not match edge count");
    }
    const AttrSet universe = AttrSet::from_bits(names_.size() == 64 ? ~std::uint64_t{0}
                                                                    : (std::uint64_t{1} << names_.size()) - 1);
    for (AttrSet e : edges_) {
        if (!e.subset_of(universe)) {
            throw std::invalid_argument("hyperedge references an undeclared attribute");
        }
    }
    for (const auto& n : names_) {
        if (n.empty()) throw std::invalid_argument("attribute names must be nonempty");
    }
}

AttrSet Hypergraph::attributes() const {
    AttrSet all;
    for (AttrSet e : edges_) all |= e;
    return all;
}

std::optional<AttrId> Hypergraph::find_attribute(std::string_view name) const {
    for (AttrId a = 0; a < names_.size(); ++a) {
        if (names_[a] == name) return a;
    }
    return std::nullopt;
}

std::string Hypergraph::label(EdgeId e) const {
    if (!labels_.empty()) return labels_.at(e);
    return format(edges_.at(e));
}

std::optional<EdgeId> Hypergraph::find_edge(std::string_view label_text) const {
    for (EdgeId e = 0; e < edges_.size(); ++e) {
        if (label(e) == label_text) return e;
    }
    return std::nullopt;
}

std::string Hypergraph::format(AttrSet attrs) const {
    const bool compact = single_char_names(names_);
    std::string out;
    for (AttrId a : attrs.ids()) {
        if (!compact && !out.empty()) out += ',';
        out += names_.at(a);
    }
    return out;
}

AttrSet Hypergraph::parse_attrs(std::string_view text) const {
    AttrSet out;
    auto add = [&](std::string_view name) {
        auto id = find_attribute(name);
        if (!id) throw std::invalid_argument("unknown attribute '" + std::string(name) + "'");
        out.insert(*id);
    };
    if (single_char_names(names_)) {
        for (char c : text) add(std::string_view(&c, 1));
        return out;
    }
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t comma = text.find(',', start);
        if (comma == std::string_view::npos) comma = text.size();
        if (comma > start) add(text.substr(start, comma - start));
        start = comma + 1;
    }
    return out;
}

bool Hypergraph::is_subsumed(EdgeId e) const {
    for (EdgeId o = 0; o < edges_.size(); ++o) {
        if (o != e && edges_[e].subset_of(edges_[o])) return true;
    }
    return false;
}

bool Hypergraph::is_clean() const {
    for (EdgeId e = 0; e < edges_.size(); ++e) {
        if (is_subsumed(e)) return false;
    }
    return true;
}

Hypergraph Hypergraph::subgraph(std::span<const EdgeId> keep) const {
    std::vector<AttrSet> edges;
    std::vector<std::string> labels;
    for (EdgeId e : keep) {
        edges.push_back(edges_.at(e));
        if (!labels_.empty()) labels.push_back(labels_[e]);
    }
    return Hypergraph(names_, std::move(edges), std::move(labels));
}

Hypergraph Hypergraph::without_attribute(AttrId attr) const {
    std::vector<AttrSet> edges = edges_;
    for (AttrSet& e : edges) e.erase(attr);
    return Hypergraph(names_, std::move(edges));
}

HyperedgeTree::HyperedgeTree(Hypergraph graph, std::vector<std::optional<EdgeId>> parent)
    : graph_(std::move(graph)), parent_(std::move(parent)), children_(parent_.size()) {
    const std::size_t n = parent_.size();
    if (n != graph_.num_edges()) {
        throw std::invalid_argument("tree must have exactly one node per hyperedge");
    }
    std::size_t roots = 0;
    for (EdgeId e = 0; e < n; ++e) {
        if (!parent_[e]) {
            ++roots;
            root_ = e;
            continue;
        }
        if (*parent_[e] >= n || *parent_[e] == e) {
            throw std::invalid_argument("invalid parent reference");
        }
        children_[*parent_[e]].push_back(e);
    }
    if (roots != 1) throw std::invalid_argument("tree must have exactly one root");
    // children_ is already ascending because e is visited in order.
    std::size_t reached = 0;
    std::vector<EdgeId> stack{root_};
    std::vector<bool> seen(n, false);
    seen[root_] = true;
    while (!stack.empty()) {
        EdgeId u = stack.back();
        stack.pop_back();
        ++reached;
        for (EdgeId c : children_[u]) {
            if (seen[c]) throw std::invalid_argument("parent array contains a cycle");
            seen[c] = true;
            stack.push_back(c);
        }
    }
    if (reached != n) throw std::invalid_argument("parent array contains a cycle");
}

bool HyperedgeTree::is_raw_leaf(EdgeId e) const {
    const std::size_t degree = children_.at(e).size() + (parent_.at(e) ? 1 : 0);
    return degree <= 1;
}

bool HyperedgeTree::is_ancestor_or_self(EdgeId a, EdgeId d) const {
    std::optional<EdgeId> cur = d;
    while (cur) {
        if (*cur == a) return true;
        cur = parent_[*cur];
    }
    return false;
}

std::vector<EdgeId> HyperedgeTree::post_order() const {
    std::vector<EdgeId> out;
    out.reserve(size());
    // Iterative DFS: (node, next child index).
    std::vector<std::pair<EdgeId, std::size_t>> stack{{root_, 0}};
    while (!stack.empty()) {
        auto& [u, i] = stack.back();
        if (i < children_[u].size()) {
            EdgeId c = children_[u][i++];
            stack.emplace_back(c, 0);
        } else {
            out.push_back(u);
            stack.pop_back();
        }
    }
    return out;
}

std::vector<EdgeId> HyperedgeTree::pre_order() const { return subtree(root_); }

std::vector<EdgeId> HyperedgeTree::subtree(EdgeId e) const {
    std::vector<EdgeId> out;
    std::vector<EdgeId> stack{e};
    while (!stack.empty()) {
        EdgeId u = stack.back();
        stack.pop_back();
        out.push_back(u);
        const auto& ch = children_[u];
        for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.push_back(*it);
    }
    return out;
}

HyperedgeTree HyperedgeTree::rerooted(EdgeId new_root) const {
    return HyperedgeTree(graph_, orient(undirected_adjacency(parent_), new_root));
}

EdgeId HyperedgeTree::lowest_raw_leaf() const {
    for (EdgeId e = 0; e < size(); ++e) {
        if (is_raw_leaf(e)) return e;
    }
    return root_;  // unreachable for a finite tree
}

std::optional<HyperedgeTree> build_join_tree(const Hypergraph& g) {
    const std::size_t n = g.num_edges();
    std::vector<bool> alive(n, true);
    std::vector<std::optional<EdgeId>> link(n);  // undirected link to the witness
    std::size_t remaining = n;

    while (remaining > 1) {
        bool removed = false;
        for (EdgeId e = 0; e < n && !removed; ++e) {
            if (!alive[e]) continue;
            AttrSet others;
            for (EdgeId o = 0; o < n; ++o) {
                if (alive[o] && o != e) others |= g.edge(o);
            }
            const AttrSet shared = g.edge(e) & others;
            for (EdgeId w = 0; w < n; ++w) {
                if (!alive[w] || w == e) continue;
                if (shared.subset_of(g.edge(w))) {
                    link[e] = w;
                    alive[e] = false;
                    --remaining;
                    removed = true;
                    break;
                }
            }
        }
        if (!removed) return std::nullopt;
    }

    HyperedgeTree unrooted(g, link);  // rooted at the last survivor
    return unrooted.rerooted(unrooted.lowest_raw_leaf());
}

bool validate_tree(const HyperedgeTree& t) {
    const Hypergraph& g = t.graph();
    for (AttrId x : g.attributes().ids()) {
        std::size_t tops = 0;
        for (EdgeId e = 0; e < t.size(); ++e) {
            if (!g.edge(e).contains(x)) continue;
            auto p = t.parent(e);
            if (!p || !g.edge(*p).contains(x)) ++tops;
        }
        if (tops != 1) return false;
    }
    return true;
}

EdgeId summit(const HyperedgeTree& t, AttrId attr) {
    const Hypergraph& g = t.graph();
    for (EdgeId e : t.pre_order()) {
        if (g.edge(e).contains(attr)) return e;
    }
    throw std::invalid_argument("attribute does not occur in any hyperedge");
}

AttrSet disappearing_attrs(const HyperedgeTree& t, EdgeId e) {
    const AttrSet own = t.graph().edge(e);
    auto p = t.parent(e);
    return p ? own - t.graph().edge(*p) : own;
}

CleansedTree cleanse_links(const HyperedgeTree& t) {
    const Hypergraph& g = t.graph();
    const std::size_t n = t.size();
    std::vector<std::optional<EdgeId>> parent = t.parents();
    std::vector<std::vector<EdgeId>> children(n);
    for (EdgeId e = 0; e < n; ++e) {
        auto ch = t.children(e);
        children[e].assign(ch.begin(), ch.end());
    }
    std::vector<bool> alive(n, true);
    EdgeId root = t.root();
    std::vector<LinkRemoval> removals;

    auto reattach_children = [&](EdgeId from, EdgeId to) {
        for (EdgeId c : children[from]) {
            if (c == to) continue;
            parent[c] = to;
            children[to].push_back(c);
        }
        children[from].clear();
        std::sort(children[to].begin(), children[to].end());
    };

    auto preorder = [&] {
        std::vector<EdgeId> out;
        std::vector<EdgeId> stack{root};
        while (!stack.empty()) {
            EdgeId u = stack.back();
            stack.pop_back();
            out.push_back(u);
            for (auto it = children[u].rbegin(); it != children[u].rend(); ++it) stack.push_back(*it);
        }
        return out;
    };

    for (;;) {
        bool changed = false;
        for (EdgeId x : preorder()) {
            if (!parent[x]) continue;
            const EdgeId y = *parent[x];
            const AttrSet xs = g.edge(x);
            const AttrSet ys = g.edge(y);
            if (xs.subset_of(ys) && (!ys.subset_of(xs) || x > y)) {
                // Parent absorbs the child.
                auto& siblings = children[y];
                siblings.erase(std::find(siblings.begin(), siblings.end(), x));
                reattach_children(x, y);
                alive[x] = false;
                parent[x].reset();
                removals.push_back({x, y, true});
                changed = true;
            } else if (ys.subset_of(xs)) {
                // Child takes the parent's place.
                const std::optional<EdgeId> grand = parent[y];
                reattach_children(y, x);
                parent[x] = grand;
                if (grand) {
                    auto& gs = children[*grand];
                    *std::find(gs.begin(), gs.end(), y) = x;
                    std::sort(gs.begin(), gs.end());
                } else {
                    root = x;
                }
                alive[y] = false;
                parent[y].reset();
                removals.push_back({y, x, false});
                changed = true;
            }
            if (changed) break;
        }
        if (!changed) break;
    }

    std::vector<EdgeId> origin;
    std::vector<EdgeId> renumber(n, 0);
    for (EdgeId e = 0; e < n; ++e) {
        if (alive[e]) {
            renumber[e] = static_cast<EdgeId>(origin.size());
            origin.push_back(e);
        }
    }
    std::vector<std::optional<EdgeId>> new_parent(origin.size());
    for (EdgeId i = 0; i < origin.size(); ++i) {
        if (auto p = parent[origin[i]]) new_parent[i] = renumber[*p];
    }
    return CleansedTree{HyperedgeTree(g.subgraph(origin), std::move(new_parent)), std::move(origin),
                        std::move(removals)};
}

}  // namespace acyclic_mpc
