#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "acyclic_mpc/cec.hpp"
#include "acyclic_mpc/relation.hpp"

namespace acyclic_mpc {

using BigInt = boost::multiprecision::cpp_int;

/// How a relation's size is measured: by cardinality or by words shipped.
enum class SizeUnit { Tuples, Words };

std::vector<std::uint64_t> relation_sizes(const Instance& q, SizeUnit unit = SizeUnit::Tuples);

/// Product of sizes over a multiset of edges; 1 for the empty group.
BigInt q_product(std::span<const std::uint64_t> sizes, std::span<const EdgeId> group);
BigInt q_product(const Instance& q, std::span<const EdgeId> group, SizeUnit unit = SizeUnit::Tuples);

/// Largest product over all k-groups drawn from `clusters`: the product of
/// the k largest per-cluster maxima. k = 0 gives 1. Throws
/// std::out_of_range when k exceeds the number of clusters.
BigInt max_k_product(std::span<const std::uint64_t> sizes, std::span<const std::vector<EdgeId>> clusters,
                     std::size_t k);
BigInt max_k_product(std::span<const std::uint64_t> sizes, const Clustering& c, std::size_t k);
BigInt max_k_product(const Instance& q, const Clustering& c, std::size_t k, SizeUnit unit = SizeUnit::Tuples);

/// Same maximum restricted to clusters not owned by the tree root.
BigInt max_k_product_nonroot(std::span<const std::uint64_t> sizes, const Clustering& c, EdgeId root,
                             std::size_t k);

/// Converts exactly when the value fits, otherwise rounds.
long double to_long_double(const BigInt& v);

struct LoadRow {
    std::size_t k;
    BigInt product;
    long double root;  ///< (P_k / p)^(1/k)
};

struct LoadProfile {
    long double L = 0;
    std::vector<LoadRow> per_k;
};

/// L = max over k of (P_k / p)^(1/k). Throws std::invalid_argument if p = 0.
LoadProfile induced_load(std::span<const std::uint64_t> sizes, const Clustering& c, std::uint64_t p);
LoadProfile induced_load(const Instance& q, const Clustering& c, std::uint64_t p, SizeUnit unit = SizeUnit::Tuples);

/// 1 + max over k of P_k / L^k.
long double allocation_demand(std::span<const std::uint64_t> sizes, const Clustering& c, long double L);

/// Ceiling that ignores relative rounding noise below 1e-12, so that an
/// exact integer computed through roots and powers is not bumped up by one.
std::uint64_t machine_ceil(long double x);

/// ceil(c_alloc * demand). Throws std::invalid_argument unless L > 0.
std::uint64_t allocate_config_machines(std::span<const std::uint64_t> sizes, const Clustering& c, long double L,
                                       long double c_alloc);
std::uint64_t allocate_config_machines(const Instance& q_eta, const Clustering& c, long double L,
                                       long double c_alloc, SizeUnit unit = SizeUnit::Tuples);

struct LightBudget {
    std::uint64_t p_bar = 1;
    std::vector<std::uint64_t> p_z;
    std::uint64_t p_eta = 1;
};

struct LightAudit {
    std::uint64_t product = 0;
    std::uint64_t p_eta = 0;
    double ratio = 0;
    bool ok = true;
};

struct AuditReport {
    std::uint64_t total = 0;
    std::uint64_t p = 0;
    double ratio = 0;
    bool total_ok = true;
    std::vector<LightAudit> lights;

    bool ok() const;
};

AuditReport audit_budgets(std::span<const std::uint64_t> allocs, std::uint64_t p,
                          std::span<const LightBudget> lights = {});

}  // namespace acyclic_mpc
