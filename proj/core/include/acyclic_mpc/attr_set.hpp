#pragma once

#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <vector>

namespace acyclic_mpc {

using AttrId = std::uint32_t;

/// Upper bound on the number of distinct attributes in one query.
inline constexpr std::size_t kMaxAttributes = 64;

/// A set of attribute ids stored as a 64-bit mask.
///
/// Tuples over a scheme store their values in ascending attribute-id order,
/// so rank() doubles as the column index of an attribute inside a tuple.
class AttrSet {
public:
    constexpr AttrSet() = default;

    constexpr AttrSet(std::initializer_list<AttrId> ids) {
        for (AttrId id : ids) insert(id);
    }

    static constexpr AttrSet from_bits(std::uint64_t bits) {
        AttrSet s;
        s.bits_ = bits;
        return s;
    }

    constexpr std::uint64_t bits() const { return bits_; }
    constexpr bool empty() const { return bits_ == 0; }
    constexpr std::size_t size() const { return static_cast<std::size_t>(std::popcount(bits_)); }

    constexpr bool contains(AttrId id) const { return (bits_ >> id) & 1U; }
    constexpr void insert(AttrId id) { bits_ |= std::uint64_t{1} << id; }
    constexpr void erase(AttrId id) { bits_ &= ~(std::uint64_t{1} << id); }

    constexpr bool subset_of(AttrSet other) const { return (bits_ & ~other.bits_) == 0; }
    constexpr bool intersects(AttrSet other) const { return (bits_ & other.bits_) != 0; }

    /// Column index of `id` within a tuple over this set. `id` must be a member.
    constexpr std::size_t rank(AttrId id) const {
        return static_cast<std::size_t>(std::popcount(bits_ & ((std::uint64_t{1} << id) - 1)));
    }

    /// Lowest member; the set must be nonempty.
    constexpr AttrId lowest() const { return static_cast<AttrId>(std::countr_zero(bits_)); }

    std::vector<AttrId> ids() const {
        std::vector<AttrId> out;
        out.reserve(size());
        for (std::uint64_t b = bits_; b != 0; b &= b - 1) {
            out.push_back(static_cast<AttrId>(std::countr_zero(b)));
        }
        return out;
    }

    friend constexpr AttrSet operator|(AttrSet a, AttrSet b) { return from_bits(a.bits_ | b.bits_); }
    friend constexpr AttrSet operator&(AttrSet a, AttrSet b) { return from_bits(a.bits_ & b.bits_); }
    friend constexpr AttrSet operator-(AttrSet a, AttrSet b) { return from_bits(a.bits_ & ~b.bits_); }
    constexpr AttrSet& operator|=(AttrSet o) { bits_ |= o.bits_; return *this; }
    constexpr AttrSet& operator&=(AttrSet o) { bits_ &= o.bits_; return *this; }
    constexpr AttrSet& operator-=(AttrSet o) { bits_ &= ~o.bits_; return *this; }

    friend constexpr bool operator==(AttrSet, AttrSet) = default;
    friend constexpr auto operator<=>(AttrSet a, AttrSet b) { return a.bits_ <=> b.bits_; }

private:
    std::uint64_t bits_ = 0;
};

}  // namespace acyclic_mpc
