#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "acyclic_mpc/attr_set.hpp"
#include "acyclic_mpc/hypergraph.hpp"

namespace acyclic_mpc {

using Value = std::uint64_t;

/// A bag of tuples over a fixed scheme, stored row-major in one flat buffer.
/// Column i holds the attribute of rank i in the scheme.
class Relation {
public:
    Relation() = default;
    explicit Relation(AttrSet scheme) : scheme_(scheme), width_(scheme.size()) {}

    AttrSet scheme() const { return scheme_; }
    std::size_t width() const { return width_; }
    std::size_t size() const { return count_; }
    bool empty() const { return count_ == 0; }

    /// Words needed to ship the relation: one per attribute value.
    std::uint64_t words() const { return static_cast<std::uint64_t>(count_) * width_; }

    std::span<const Value> tuple(std::size_t i) const {
        return {data_.data() + i * width_, width_};
    }
    Value value(std::size_t i, AttrId attr) const { return data_[i * width_ + scheme_.rank(attr)]; }

    void push_back(std::span<const Value> t);
    void append(const Relation& other);
    void reserve(std::size_t tuples) { data_.reserve(tuples * width_); }
    void clear() {
        data_.clear();
        count_ = 0;
    }

    /// Projection onto `attrs` (a subset of the scheme); duplicates are kept.
    Relation project(AttrSet attrs) const;

    /// Sorts tuples lexicographically and drops duplicates.
    void sort_unique();

    const std::vector<Value>& data() const { return data_; }

    friend bool operator==(const Relation&, const Relation&) = default;

private:
    AttrSet scheme_;
    std::size_t width_ = 0;
    std::size_t count_ = 0;
    std::vector<Value> data_;
};

/// A query: one relation per hyperedge of `graph`.
struct Instance {
    Hypergraph graph;
    std::vector<Relation> relations;

    Instance() = default;
    /// Throws std::invalid_argument when the counts or schemes disagree.
    Instance(Hypergraph g, std::vector<Relation> rels);

    /// m: total number of tuples.
    std::uint64_t input_size() const;
    std::uint64_t input_words() const;
};

/// Tuples of `big` whose projection onto small's scheme occurs in `small`.
/// Throws std::invalid_argument unless small's scheme is a subset of big's.
Relation semi_join(const Relation& big, const Relation& small);

/// Hash join on the shared attributes. The output is not deduplicated.
Relation natural_join(const Relation& a, const Relation& b);

/// Join of `rels[e]` over all nodes of `t` (relations indexed by edge id):
/// a bottom-up and top-down semi-join pass followed by joins in pre-order.
/// The output is sorted and duplicate free.
Relation join_along_tree(const HyperedgeTree& t, std::span<const Relation> rels);

struct CleanQuery {
    Instance instance;
    HyperedgeTree tree;
    /// origin[new id] = edge id in the input.
    std::vector<EdgeId> origin;
    std::vector<LinkRemoval> removals;
};

/// Removes subsumed hyperedges by repeatedly contracting a tree link whose
/// endpoints are nested; each dropped relation is first semi-joined into the
/// surviving neighbour. The result is rooted at its lowest-id raw leaf.
CleanQuery clean(const HyperedgeTree& t, const Instance& q);

}  // namespace acyclic_mpc
