#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "acyclic_mpc/attr_set.hpp"

namespace acyclic_mpc::detail {

using Key = std::vector<std::uint64_t>;

struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept {
        std::uint64_t h = 0x9e3779b97f4a7c15ULL ^ k.size();
        for (std::uint64_t v : k) {
            h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
            h *= 0xff51afd7ed558ccdULL;
        }
        return static_cast<std::size_t>(h ^ (h >> 33));
    }
};

/// Column positions, inside a tuple over `scheme`, of the members of `sub`.
inline std::vector<std::size_t> columns_of(AttrSet scheme, AttrSet sub) {
    std::vector<std::size_t> cols;
    cols.reserve(sub.size());
    for (AttrId x : sub.ids()) cols.push_back(scheme.rank(x));
    return cols;
}

}  // namespace acyclic_mpc::detail
