#include "acyclic_mpc/oracle.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

namespace acyclic_mpc::oracle {

namespace {

using Row = std::vector<Value>;

struct Table {
    AttrSet scheme;
    std::vector<Row> rows;
};

Table to_table(const Relation& r) {
    Table t{r.scheme(), {}};
    for (std::size_t i = 0; i < r.size(); ++i) {
        auto u = r.tuple(i);
        t.rows.emplace_back(u.begin(), u.end());
    }
    return t;
}

Row key_of(const Row& row, AttrSet scheme, AttrSet on) {
    Row k;
    for (AttrId a : on.ids()) k.push_back(row[scheme.rank(a)]);
    return k;
}

Table reduce(const Table& big, const Table& small) {
    const AttrSet on = big.scheme & small.scheme;
    std::set<Row> keys;
    for (const Row& r : small.rows) keys.insert(key_of(r, small.scheme, on));
    Table out{big.scheme, {}};
    for (const Row& r : big.rows) {
        if (keys.count(key_of(r, big.scheme, on))) out.rows.push_back(r);
    }
    return out;
}

Table merge_join(Table a, Table b) {
    const AttrSet on = a.scheme & b.scheme;
    const AttrSet scheme = a.scheme | b.scheme;
    auto by_key = [on](AttrSet s) {
        return [on, s](const Row& x, const Row& y) { return key_of(x, s, on) < key_of(y, s, on); };
    };
    std::sort(a.rows.begin(), a.rows.end(), by_key(a.scheme));
    std::sort(b.rows.begin(), b.rows.end(), by_key(b.scheme));
    Table out{scheme, {}};
    std::size_t i = 0, j = 0;
    while (i < a.rows.size() && j < b.rows.size()) {
        const Row ka = key_of(a.rows[i], a.scheme, on);
        const Row kb = key_of(b.rows[j], b.scheme, on);
        if (ka < kb) {
            ++i;
        } else if (kb < ka) {
            ++j;
        } else {
            std::size_t i2 = i, j2 = j;
            while (i2 < a.rows.size() && key_of(a.rows[i2], a.scheme, on) == ka) ++i2;
            while (j2 < b.rows.size() && key_of(b.rows[j2], b.scheme, on) == kb) ++j2;
            for (std::size_t x = i; x < i2; ++x) {
                for (std::size_t y = j; y < j2; ++y) {
                    Row r(scheme.size());
                    for (AttrId at : scheme.ids()) {
                        r[scheme.rank(at)] = a.scheme.contains(at) ? a.rows[x][a.scheme.rank(at)]
                                                                   : b.rows[y][b.scheme.rank(at)];
                    }
                    out.rows.push_back(std::move(r));
                }
            }
            i = i2;
            j = j2;
        }
    }
    return out;
}

Relation to_relation(const Table& t) {
    std::set<Row> rows(t.rows.begin(), t.rows.end());
    Relation out(t.scheme);
    for (const Row& r : rows) out.push_back(r);
    return out;
}

}  // namespace

Relation join(const Instance& q, std::size_t cap) {
    const AttrSet all = q.graph.attributes();
    Relation out(all);
    for (const Relation& r : q.relations) {
        if (r.empty()) return out;
    }
    const std::vector<AttrId> attrs = all.ids();
    std::vector<std::set<Row>> sets;
    for (const Relation& r : q.relations) {
        std::set<Row> s;
        for (std::size_t i = 0; i < r.size(); ++i) s.emplace(r.tuple(i).begin(), r.tuple(i).end());
        sets.push_back(std::move(s));
    }
    // For every attribute: the smallest relation holding it proposes values,
    // and relations whose highest attribute it is get checked.
    std::vector<std::size_t> proposer(attrs.size());
    std::vector<std::vector<std::size_t>> finishing(attrs.size());
    for (std::size_t i = 0; i < attrs.size(); ++i) {
        std::size_t best = q.relations.size();
        for (std::size_t e = 0; e < q.relations.size(); ++e) {
            const AttrSet s = q.relations[e].scheme();
            if (!s.contains(attrs[i])) continue;
            if (best == q.relations.size() || q.relations[e].size() < q.relations[best].size()) best = e;
            if (s.ids().back() == attrs[i]) finishing[i].push_back(e);
        }
        proposer[i] = best;
    }

    Row assign(attrs.size());
    auto value_of = [&](AttrId a) { return assign[all.rank(a)]; };
    auto recurse = [&](auto&& self, std::size_t level) -> void {
        if (level == attrs.size()) {
            if (out.size() >= cap) throw std::length_error("oracle join output exceeds the cap");
            out.push_back(assign);
            return;
        }
        const AttrId a = attrs[level];
        const Relation& gen = q.relations[proposer[level]];
        const AttrSet gs = gen.scheme();
        std::set<Value> candidates;
        for (std::size_t i = 0; i < gen.size(); ++i) {
            bool ok = true;
            for (AttrId b : gs.ids()) {
                if (b >= a) break;
                if (gen.value(i, b) != value_of(b)) {
                    ok = false;
                    break;
                }
            }
            if (ok) candidates.insert(gen.value(i, a));
        }
        for (Value v : candidates) {
            assign[level] = v;
            bool ok = true;
            for (std::size_t e : finishing[level]) {
                Row k;
                for (AttrId b : q.relations[e].scheme().ids()) k.push_back(value_of(b));
                if (!sets[e].count(k)) {
                    ok = false;
                    break;
                }
            }
            if (ok) self(self, level + 1);
        }
    };
    recurse(recurse, 0);
    return out;
}

Relation yannakakis(const Instance& q, const HyperedgeTree& t) {
    std::vector<Table> tabs;
    for (const Relation& r : q.relations) tabs.push_back(to_table(r));
    for (const Table& tb : tabs) {
        if (tb.rows.empty()) return Relation(q.graph.attributes());
    }
    for (EdgeId x : t.post_order()) {
        if (auto p = t.parent(x)) tabs[*p] = reduce(tabs[*p], tabs[x]);
    }
    for (EdgeId x : t.pre_order()) {
        if (auto p = t.parent(x)) tabs[x] = reduce(tabs[x], tabs[*p]);
    }
    Table acc = tabs[t.root()];
    for (EdgeId x : t.pre_order()) {
        if (x != t.root()) acc = merge_join(std::move(acc), tabs[x]);
    }
    return to_relation(acc);
}

std::size_t min_cover(const Hypergraph& g) {
    const std::size_t n = g.num_edges();
    if (n > 20) throw std::length_error("too many edges for an exhaustive cover search");
    const AttrSet all = g.attributes();
    if (all.empty()) return 0;
    std::size_t best = n;
    for (std::uint32_t mask = 1; mask < (std::uint32_t{1} << n); ++mask) {
        const auto k = static_cast<std::size_t>(std::popcount(mask));
        if (k >= best) continue;
        AttrSet covered;
        for (EdgeId e = 0; e < n; ++e) {
            if ((mask >> e) & 1U) covered |= g.edge(e);
        }
        if (covered == all) best = k;
    }
    return best;
}

bool is_acyclic(const Hypergraph& g) {
    const std::size_t n = g.num_edges();
    if (n > 8) throw std::length_error("too many edges for an exhaustive tree search");
    if (n <= 1) return true;
    auto satisfies = [&](const std::vector<std::pair<std::size_t, std::size_t>>& links) {
        for (AttrId a : g.attributes().ids()) {
            std::size_t nodes = 0, inside = 0;
            for (EdgeId e = 0; e < n; ++e) nodes += g.edge(e).contains(a) ? 1 : 0;
            for (auto [u, v] : links) {
                inside += g.edge(static_cast<EdgeId>(u)).contains(a) && g.edge(static_cast<EdgeId>(v)).contains(a);
            }
            if (inside + 1 != nodes) return false;
        }
        return true;
    };
    std::vector<std::size_t> seq(n - 2, 0);
    while (true) {
        std::vector<std::size_t> degree(n, 1);
        for (std::size_t s : seq) ++degree[s];
        std::vector<std::pair<std::size_t, std::size_t>> links;
        for (std::size_t s : seq) {
            std::size_t leaf = 0;
            while (degree[leaf] != 1) ++leaf;
            links.emplace_back(leaf, s);
            --degree[leaf];
            --degree[s];
        }
        std::size_t u = n, v = n;
        for (std::size_t i = 0; i < n; ++i) {
            if (degree[i] == 1) (u == n ? u : v) = i;
        }
        links.emplace_back(u, v);
        if (satisfies(links)) return true;

        std::size_t i = 0;
        while (i < seq.size() && ++seq[i] == n) seq[i++] = 0;
        if (i == seq.size()) return false;
    }
}

std::vector<std::vector<EdgeId>> clusters(const Cec& cover) {
    const HyperedgeTree& t = cover.tree();
    std::vector<std::vector<EdgeId>> out;
    for (EdgeId f = 0; f < t.size(); ++f) {
        if (!cover.contains(f)) continue;
        std::vector<EdgeId> c{f};
        for (auto y = t.parent(f); y && !cover.contains(*y); y = t.parent(*y)) c.push_back(*y);
        std::sort(c.begin(), c.end());
        out.push_back(std::move(c));
    }
    return out;
}

std::vector<std::vector<EdgeId>> k_groups(std::span<const std::vector<EdgeId>> cl, std::size_t k) {
    std::set<std::vector<EdgeId>> found;
    if (k > cl.size()) return {};
    std::vector<std::size_t> pick(k);
    std::iota(pick.begin(), pick.end(), 0);
    while (true) {
        std::vector<std::size_t> idx(k, 0);
        bool empty = std::any_of(pick.begin(), pick.end(), [&](std::size_t c) { return cl[c].empty(); });
        while (!empty) {
            std::vector<EdgeId> g;
            for (std::size_t i = 0; i < k; ++i) g.push_back(cl[pick[i]][idx[i]]);
            std::sort(g.begin(), g.end());
            found.insert(std::move(g));
            std::size_t i = 0;
            while (i < k && ++idx[i] == cl[pick[i]].size()) idx[i++] = 0;
            if (i == k) break;
        }
        // Next combination of k cluster indices.
        std::size_t i = k;
        while (i > 0 && pick[i - 1] == cl.size() - k + i - 1) --i;
        if (i == 0) break;
        ++pick[i - 1];
        for (std::size_t j = i; j < k; ++j) pick[j] = pick[j - 1] + 1;
    }
    return {found.begin(), found.end()};
}

std::vector<std::vector<EdgeId>> super_k_groups(const Decomposition& d, std::size_t k) {
    std::vector<std::vector<EdgeId>> pool;
    auto add = [&](const SubTree& s, bool skip_root) {
        const EdgeId root = s.cover.tree().root();
        for (auto c : clusters(s.cover)) {
            if (skip_root && std::find(c.begin(), c.end(), root) != c.end()) continue;
            for (EdgeId& e : c) e = s.origin[e];
            pool.push_back(std::move(c));
        }
    };
    if (d.remainder) add(*d.remainder, false);
    for (const SubTree& p : d.parts) add(p, true);
    return k_groups(pool, k);
}

bool is_k_group(std::span<const std::vector<EdgeId>> cl, std::span<const EdgeId> group) {
    std::vector<bool> used(cl.size(), false);
    auto place = [&](auto&& self, std::size_t i) -> bool {
        if (i == group.size()) return true;
        for (std::size_t c = 0; c < cl.size(); ++c) {
            if (used[c] || std::find(cl[c].begin(), cl[c].end(), group[i]) == cl[c].end()) continue;
            used[c] = true;
            if (self(self, i + 1)) return true;
            used[c] = false;
        }
        return false;
    };
    return place(place, 0);
}

OracleResult evaluate(const Instance& q, std::size_t cap) {
    OracleResult r;
    r.join = join(q, cap);
    r.min_cover_size = min_cover(q.graph);
    r.agm_exponent = r.min_cover_size;
    return r;
}

}  // namespace acyclic_mpc::oracle
