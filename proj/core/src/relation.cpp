#include "acyclic_mpc/relation.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "tuple_key.hpp"

namespace acyclic_mpc {

void Relation::push_back(std::span<const Value> t) {
    if (t.size() != width_) throw std::invalid_argument("tuple width does not match scheme");
    data_.insert(data_.end(), t.begin(), t.end());
    ++count_;
}

void Relation::append(const Relation& other) {
    if (other.scheme_ != scheme_) throw std::invalid_argument("append: scheme mismatch");
    data_.insert(data_.end(), other.data_.begin(), other.data_.end());
    count_ += other.count_;
}

Relation Relation::project(AttrSet attrs) const {
    if (!attrs.subset_of(scheme_)) throw std::invalid_argument("projection outside the scheme");
    Relation out(attrs);
    const auto cols = detail::columns_of(scheme_, attrs);
    out.data_.reserve(count_ * cols.size());
    for (std::size_t i = 0; i < count_; ++i) {
        const Value* row = data_.data() + i * width_;
        for (std::size_t c : cols) out.data_.push_back(row[c]);
    }
    out.count_ = count_;
    return out;
}

void Relation::sort_unique() {
    if (count_ <= 1) return;
    if (width_ == 0) {
        count_ = 1;
        return;
    }
    std::vector<std::size_t> order(count_);
    for (std::size_t i = 0; i < count_; ++i) order[i] = i;
    const Value* base = data_.data();
    const std::size_t w = width_;
    auto less = [&](std::size_t a, std::size_t b) {
        return std::lexicographical_compare(base + a * w, base + a * w + w, base + b * w, base + b * w + w);
    };
    auto same = [&](std::size_t a, std::size_t b) { return std::equal(base + a * w, base + a * w + w, base + b * w); };
    std::sort(order.begin(), order.end(), less);
    std::vector<Value> out;
    out.reserve(data_.size());
    std::size_t kept = 0;
    for (std::size_t k = 0; k < order.size(); ++k) {
        if (k > 0 && same(order[k], order[k - 1])) continue;
        out.insert(out.end(), base + order[k] * w, base + order[k] * w + w);
        ++kept;
    }
    data_ = std::move(out);
    count_ = kept;
}

Instance::Instance(Hypergraph g, std::vector<Relation> rels) : graph(std::move(g)), relations(std::move(rels)) {
    if (relations.size() != graph.num_edges()) {
        throw std::invalid_argument("instance needs one relation per hyperedge");
    }
    for (EdgeId e = 0; e < relations.size(); ++e) {
        if (relations[e].scheme() != graph.edge(e)) {
            throw std::invalid_argument("relation scheme differs from its hyperedge");
        }
    }
}

std::uint64_t Instance::input_size() const {
    std::uint64_t m = 0;
    for (const auto& r : relations) m += r.size();
    return m;
}

std::uint64_t Instance::input_words() const {
    std::uint64_t m = 0;
    for (const auto& r : relations) m += r.words();
    return m;
}

Relation semi_join(const Relation& big, const Relation& small) {
    if (!small.scheme().subset_of(big.scheme())) {
        throw std::invalid_argument("semi-join: small scheme is not contained in big scheme");
    }
    Relation out(big.scheme());
    if (small.empty()) return out;
    const auto cols = detail::columns_of(big.scheme(), small.scheme());
    std::unordered_set<detail::Key, detail::KeyHash> keys;
    keys.reserve(small.size());
    for (std::size_t i = 0; i < small.size(); ++i) {
        auto t = small.tuple(i);
        keys.emplace(t.begin(), t.end());
    }
    detail::Key probe(cols.size());
    for (std::size_t i = 0; i < big.size(); ++i) {
        auto t = big.tuple(i);
        for (std::size_t c = 0; c < cols.size(); ++c) probe[c] = t[cols[c]];
        if (keys.contains(probe)) out.push_back(t);
    }
    return out;
}

Relation natural_join(const Relation& a, const Relation& b) {
    const AttrSet shared = a.scheme() & b.scheme();
    const AttrSet out_scheme = a.scheme() | b.scheme();
    Relation out(out_scheme);

    const auto a_key = detail::columns_of(a.scheme(), shared);
    const auto b_key = detail::columns_of(b.scheme(), shared);
    // For each output column: take it from `a` when present, else from `b`.
    std::vector<std::pair<bool, std::size_t>> source;
    for (AttrId x : out_scheme.ids()) {
        if (a.scheme().contains(x)) {
            source.emplace_back(true, a.scheme().rank(x));
        } else {
            source.emplace_back(false, b.scheme().rank(x));
        }
    }

    std::unordered_map<detail::Key, std::vector<std::size_t>, detail::KeyHash> index;
    detail::Key key(b_key.size());
    for (std::size_t j = 0; j < b.size(); ++j) {
        auto t = b.tuple(j);
        for (std::size_t c = 0; c < b_key.size(); ++c) key[c] = t[b_key[c]];
        index[key].push_back(j);
    }

    std::vector<Value> row(source.size());
    key.resize(a_key.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        auto ta = a.tuple(i);
        for (std::size_t c = 0; c < a_key.size(); ++c) key[c] = ta[a_key[c]];
        auto it = index.find(key);
        if (it == index.end()) continue;
        for (std::size_t j : it->second) {
            auto tb = b.tuple(j);
            for (std::size_t c = 0; c < source.size(); ++c) {
                row[c] = source[c].first ? ta[source[c].second] : tb[source[c].second];
            }
            out.push_back(row);
        }
    }
    return out;
}

Relation join_along_tree(const HyperedgeTree& t, std::span<const Relation> rels) {
    if (rels.size() != t.size()) throw std::invalid_argument("one relation per tree node expected");
    std::vector<Relation> r(rels.begin(), rels.end());
    const auto post = t.post_order();
    for (EdgeId e : post) {
        if (auto p = t.parent(e)) {
            r[*p] = semi_join(r[*p], r[e].project(r[e].scheme() & r[*p].scheme()));
        }
    }
    const auto pre = t.pre_order();
    for (EdgeId e : pre) {
        if (auto p = t.parent(e)) {
            r[e] = semi_join(r[e], r[*p].project(r[e].scheme() & r[*p].scheme()));
        }
    }
    Relation out = r[t.root()];
    for (EdgeId e : pre) {
        if (e == t.root()) continue;
        out = natural_join(out, r[e]);
        out.sort_unique();
    }
    out.sort_unique();
    return out;
}

CleanQuery clean(const HyperedgeTree& t, const Instance& q) {
    CleansedTree c = cleanse_links(t);
    std::vector<Relation> rels = q.relations;
    for (const LinkRemoval& rm : c.removals) {
        rels[rm.big] = semi_join(rels[rm.big], rels[rm.small]);
    }
    std::vector<Relation> kept;
    kept.reserve(c.origin.size());
    for (EdgeId e : c.origin) kept.push_back(std::move(rels[e]));
    HyperedgeTree rooted = c.tree.rerooted(c.tree.lowest_raw_leaf());
    Instance inst(rooted.graph(), std::move(kept));
    return CleanQuery{std::move(inst), std::move(rooted), std::move(c.origin), std::move(c.removals)};
}

}  // namespace acyclic_mpc
