#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "acyclic_mpc/relation.hpp"

namespace acyclic_mpc {

struct LoadReport {
    std::size_t rounds = 0;
    std::vector<std::uint64_t> per_round_load;
    std::uint64_t max_load = 0;
    std::size_t round_cap = 0;

    bool within_cap() const { return rounds <= round_cap; }
};

/// Message ledger of p machines. Only word counts are kept; the data itself
/// travels in DistRelation values owned by the caller.
class SimCluster {
public:
    SimCluster(std::size_t machines, std::size_t round_cap);

    std::size_t machines() const { return machines_; }
    std::size_t round_cap() const { return round_cap_; }

    /// Records a message of `words` words in `round`. Messages a machine
    /// sends to itself are free.
    void send(std::size_t round, std::size_t from, std::size_t to, std::uint64_t words);

    /// Marks rounds [0, rounds) as executed even if some carried no traffic.
    void reserve_rounds(std::size_t rounds);

    std::size_t rounds() const { return received_.size(); }
    std::uint64_t received(std::size_t round, std::size_t machine) const;
    std::uint64_t sent(std::size_t round, std::size_t machine) const;
    std::uint64_t total_received(std::size_t round) const;
    std::uint64_t total_sent(std::size_t round) const;

    LoadReport finish() const;

private:
    void grow(std::size_t round);

    std::size_t machines_;
    std::size_t round_cap_;
    std::vector<std::vector<std::uint64_t>> received_;
    std::vector<std::vector<std::uint64_t>> sent_;
};

/// Logical machines ("positions") backed by physical machines. A position
/// may be replicated on several machines that run the same computation; a
/// message between two positions travels between aligned replicas.
class MachineBlock {
public:
    MachineBlock() = default;
    /// Every position must list the same positive number of replicas.
    explicit MachineBlock(std::vector<std::vector<std::size_t>> positions);

    static MachineBlock contiguous(std::size_t first, std::size_t count);

    std::size_t size() const { return positions_.size(); }
    bool empty() const { return positions_.empty(); }
    std::size_t replicas() const { return positions_.empty() ? 0 : positions_.front().size(); }
    std::span<const std::size_t> machines(std::size_t pos) const { return positions_.at(pos); }

    MachineBlock slice(std::size_t first, std::size_t count) const;

    /// The first prod(dims) positions read as a grid in row-major order
    /// (last axis fastest). Position i of the result stands for all cells
    /// whose coordinate on `axis` is i.
    MachineBlock axis(std::span<const std::size_t> dims, std::size_t axis) const;

    friend bool operator==(const MachineBlock&, const MachineBlock&) = default;

private:
    std::vector<std::vector<std::size_t>> positions_;
};

/// One fragment per position of some block.
struct DistRelation {
    AttrSet scheme;
    std::vector<Relation> fragments;

    DistRelation() = default;
    DistRelation(AttrSet s, std::size_t positions) : scheme(s), fragments(positions, Relation(s)) {}

    std::uint64_t size() const;
    std::uint64_t words() const;
    /// Concatenation of all fragments.
    Relation collect() const;
};

/// Free initial placement: tuple i goes to position i mod positions.
DistRelation place_round_robin(const Relation& r, std::size_t positions);

/// Sends the tuples of every relation round-robin across `to`, continuing
/// the rotation from one relation to the next, so that every target
/// receives within one tuple of the mean. Throws std::invalid_argument when
/// `to` is empty.
std::vector<DistRelation> scatter_balanced(SimCluster& c, std::size_t round, const MachineBlock& from,
                                           std::span<const DistRelation> rels, const MachineBlock& to);

/// Every target position receives the full relation.
Relation broadcast(SimCluster& c, std::size_t round, const MachineBlock& from, const DistRelation& r,
                   const MachineBlock& to);

/// Sort-based semi-join over two rounds (`round` and `round + 1`). Records of
/// both inputs are sorted by key, small before big, and cut into
/// word-balanced ranges, one per position; the second round tells each
/// position whether its first key has a partner in an earlier range.
/// Throws std::invalid_argument unless small's scheme is inside big's.
DistRelation semi_join(SimCluster& c, std::size_t round, const MachineBlock& block, const DistRelation& big,
                       const DistRelation& small);

/// Splits factor j into dims[j] round-robin shards and ships shard i to
/// every grid cell whose j-th coordinate is i; each cell then forms the
/// product of its shards locally. The result lives on the first prod(dims)
/// positions of `grid`. Throws std::invalid_argument if the grid does not
/// fit or the factor schemes overlap.
DistRelation cartesian_product(SimCluster& c, std::size_t round, const MachineBlock& from,
                               std::span<const DistRelation> factors, const MachineBlock& grid,
                               std::span<const std::size_t> dims);

/// Product of relations over pairwise disjoint schemes.
Relation local_product(std::span<const Relation> factors);

}  // namespace acyclic_mpc
