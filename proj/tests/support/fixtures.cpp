#include "fixtures.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>

namespace fixtures {

namespace {

const std::vector<std::string> kRunningEdges = {"ABC", "BD",  "BO",  "EFG", "BCE", "CEF", "CEJ",
                                                "HI",  "LM",  "EHJ", "KL",  "HK",  "HN"};

std::vector<std::string> letters(std::size_t n) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) out.emplace_back(1, static_cast<char>('A' + i));
    return out;
}

}  // namespace

Hypergraph running_graph() {
    const auto names = letters(15);
    std::vector<AttrSet> edges;
    for (const std::string& e : kRunningEdges) {
        AttrSet s;
        for (char c : e) s.insert(static_cast<AttrId>(c - 'A'));
        edges.push_back(s);
    }
    return Hypergraph(names, edges);
}

HyperedgeTree running_tree() {
    Hypergraph g = running_graph();
    auto at = [&](const char* name) { return std::optional<EdgeId>(id(g, name)); };
    std::vector<std::optional<EdgeId>> parent(g.num_edges());
    parent[id(g, "ABC")] = at("BCE");
    parent[id(g, "BD")] = at("BCE");
    parent[id(g, "BO")] = at("BCE");
    parent[id(g, "EFG")] = at("CEF");
    parent[id(g, "BCE")] = at("CEJ");
    parent[id(g, "CEF")] = at("CEJ");
    parent[id(g, "CEJ")] = at("EHJ");
    parent[id(g, "HI")] = at("EHJ");
    parent[id(g, "LM")] = at("KL");
    parent[id(g, "EHJ")] = at("HK");
    parent[id(g, "KL")] = at("HK");
    parent[id(g, "HK")] = at("HN");
    return HyperedgeTree(std::move(g), std::move(parent));
}

EdgeId id(const Hypergraph& g, const std::string& label) {
    auto e = g.find_edge(label);
    if (!e) throw std::invalid_argument("no edge " + label);
    return *e;
}

std::vector<EdgeId> ids(const Hypergraph& g, const std::vector<std::string>& labels) {
    std::vector<EdgeId> out;
    for (const auto& l : labels) out.push_back(id(g, l));
    std::sort(out.begin(), out.end());
    return out;
}

RandomQuery random_acyclic(std::mt19937_64& rng, std::size_t max_edges, std::size_t max_attrs, bool clean) {
    auto pick = [&](std::size_t lo, std::size_t hi) {
        return lo + static_cast<std::size_t>(rng() % (hi - lo + 1));
    };
    while (true) {
        const std::size_t n = pick(1, max_edges);
        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        std::vector<std::optional<EdgeId>> parent(n);
        std::vector<std::vector<std::size_t>> adj(n);
        for (std::size_t i = 1; i < n; ++i) {
            const std::size_t p = perm[pick(0, i - 1)];
            parent[perm[i]] = static_cast<EdgeId>(p);
            adj[perm[i]].push_back(p);
            adj[p].push_back(perm[i]);
        }
        std::vector<AttrSet> edges(n);
        std::size_t attrs = pick(1, max_attrs);
        for (std::size_t a = 0; a < attrs; ++a) {
            std::vector<std::size_t> nodes{pick(0, n - 1)};
            const std::size_t want = pick(1, n);
            while (nodes.size() < want) {
                std::vector<std::size_t> frontier;
                for (std::size_t x : nodes) {
                    for (std::size_t y : adj[x]) {
                        if (std::find(nodes.begin(), nodes.end(), y) == nodes.end()) frontier.push_back(y);
                    }
                }
                if (frontier.empty()) break;
                nodes.push_back(frontier[rng() % frontier.size()]);
            }
            for (std::size_t x : nodes) edges[x].insert(static_cast<AttrId>(a));
        }
        for (std::size_t x = 0; x < n; ++x) {
            if (!edges[x].empty()) continue;
            if (attrs < max_attrs) {
                edges[x].insert(static_cast<AttrId>(attrs++));
            } else if (!adj[x].empty()) {
                const std::size_t y = adj[x][rng() % adj[x].size()];
                if (edges[y].empty()) break;
                const auto ys = edges[y].ids();
                edges[x].insert(ys[rng() % ys.size()]);
            }
        }
        if (std::any_of(edges.begin(), edges.end(), [](AttrSet s) { return s.empty(); })) continue;
        // Compact attribute ids so that every name is in use.
        AttrSet used;
        for (AttrSet s : edges) used |= s;
        std::vector<AttrSet> compact;
        for (AttrSet s : edges) {
            AttrSet c;
            for (AttrId a : s.ids()) c.insert(static_cast<AttrId>(used.rank(a)));
            compact.push_back(c);
        }
        Hypergraph g(letters(used.size()), compact);
        if (clean && !g.is_clean()) continue;
        return {g, HyperedgeTree(g, parent)};
    }
}

Instance random_instance(const Hypergraph& g, std::uint64_t seed, std::uint64_t size, std::uint64_t domain,
                         Skew skew) {
    GeneratorSpec spec;
    spec.seed = seed;
    spec.size = size;
    spec.domain = domain;
    spec.skew = skew;
    spec.heavy_fraction = 0.3;
    std::vector<Relation> rels;
    for (EdgeId e = 0; e < g.num_edges(); ++e) rels.push_back(generate_relation(g, g.edge(e), spec, e));
    return Instance(g, std::move(rels));
}

Instance planted_instance(const Hypergraph& g, std::uint64_t seed, std::uint64_t planted, std::uint64_t noise,
                          std::uint64_t domain, Skew skew, const std::vector<std::string>& skewed) {
    GeneratorSpec spec;
    spec.seed = seed;
    spec.size = planted;
    spec.domain = domain;
    spec.skew = skew;
    spec.heavy_fraction = 0.3;
    spec.skewed = skewed;
    const Relation full = generate_relation(g, g.attributes(), spec, 1U << 20);
    spec.size = noise;
    std::vector<Relation> rels;
    for (EdgeId e = 0; e < g.num_edges(); ++e) {
        Relation r = full.project(g.edge(e));
        if (noise > 0) r.append(generate_relation(g, g.edge(e), spec, e));
        r.sort_unique();
        rels.push_back(std::move(r));
    }
    return Instance(g, std::move(rels));
}

long double join_count(const Instance& q, const HyperedgeTree& t) {
    // weight[e][i]: number of ways tuple i of R(e) extends over e's subtree.
    std::vector<std::vector<long double>> weight(t.size());
    for (EdgeId e : t.post_order()) {
        const Relation& r = q.relations[e];
        weight[e].assign(r.size(), 1.0L);
        for (EdgeId c : t.children(e)) {
            const Relation& rc = q.relations[c];
            const AttrSet on = r.scheme() & rc.scheme();
            std::map<std::vector<Value>, long double> sums;
            for (std::size_t i = 0; i < rc.size(); ++i) {
                std::vector<Value> k;
                for (AttrId a : on.ids()) k.push_back(rc.value(i, a));
                sums[k] += weight[c][i];
            }
            for (std::size_t i = 0; i < r.size(); ++i) {
                std::vector<Value> k;
                for (AttrId a : on.ids()) k.push_back(r.value(i, a));
                auto it = sums.find(k);
                weight[e][i] *= it == sums.end() ? 0.0L : it->second;
            }
        }
    }
    long double total = 0;
    for (long double w : weight[t.root()]) total += w;
    return total;
}

std::vector<EdgeId> random_bottom_up_order(const HyperedgeTree& t, std::mt19937_64& rng) {
    std::vector<std::size_t> pending(t.size());
    for (EdgeId e = 0; e < t.size(); ++e) pending[e] = t.children(e).size();
    std::vector<EdgeId> ready;
    for (EdgeId e = 0; e < t.size(); ++e) {
        if (pending[e] == 0) ready.push_back(e);
    }
    std::vector<EdgeId> order;
    while (!ready.empty()) {
        const std::size_t i = rng() % ready.size();
        const EdgeId x = ready[i];
        ready.erase(ready.begin() + static_cast<std::ptrdiff_t>(i));
        order.push_back(x);
        if (auto p = t.parent(x); p && --pending[*p] == 0) ready.push_back(*p);
    }
    return order;
}

}  // namespace fixtures
