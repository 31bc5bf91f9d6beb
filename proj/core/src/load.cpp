#include "acyclic_mpc/load.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace acyclic_mpc {

std::vector<std::uint64_t> relation_sizes(const Instance& q, SizeUnit unit) {
    std::vector<std::uint64_t> out;
    out.reserve(q.relations.size());
    for (const Relation& r : q.relations) out.push_back(unit == SizeUnit::Words ? r.words() : r.size());
    return out;
}

BigInt q_product(std::span<const std::uint64_t> sizes, std::span<const EdgeId> group) {
    BigInt p = 1;
    for (EdgeId e : group) p *= sizes[e];
    return p;
}

BigInt q_product(const Instance& q, std::span<const EdgeId> group, SizeUnit unit) {
    return q_product(relation_sizes(q, unit), group);
}

BigInt max_k_product(std::span<const std::uint64_t> sizes, std::span<const std::vector<EdgeId>> clusters,
                     std::size_t k) {
    if (k > clusters.size()) throw std::out_of_range("k exceeds the number of clusters");
    std::vector<std::uint64_t> best;
    best.reserve(clusters.size());
    for (const auto& cl : clusters) {
        std::uint64_t m = 0;
        for (EdgeId e : cl) m = std::max(m, sizes[e]);
        best.push_back(m);
    }
    std::sort(best.begin(), best.end(), std::greater<>());
    BigInt p = 1;
    for (std::size_t i = 0; i < k; ++i) p *= best[i];
    return p;
}

BigInt max_k_product(std::span<const std::uint64_t> sizes, const Clustering& c, std::size_t k) {
    return max_k_product(sizes, std::span<const std::vector<EdgeId>>(c.clusters), k);
}

BigInt max_k_product(const Instance& q, const Clustering& c, std::size_t k, SizeUnit unit) {
    return max_k_product(relation_sizes(q, unit), c, k);
}

BigInt max_k_product_nonroot(std::span<const std::uint64_t> sizes, const Clustering& c, EdgeId root,
                             std::size_t k) {
    std::vector<std::vector<EdgeId>> rest;
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (c.owners[i] != root) rest.push_back(c.clusters[i]);
    }
    return max_k_product(sizes, std::span<const std::vector<EdgeId>>(rest), k);
}

long double to_long_double(const BigInt& v) { return v.convert_to<long double>(); }

LoadProfile induced_load(std::span<const std::uint64_t> sizes, const Clustering& c, std::uint64_t p) {
    if (p == 0) throw std::invalid_argument("machine count must be positive");
    LoadProfile out;
    for (std::size_t k = 1; k <= c.size(); ++k) {
        BigInt pk = max_k_product(sizes, c, k);
        const long double root =
            std::pow(to_long_double(pk) / static_cast<long double>(p), 1.0L / static_cast<long double>(k));
        out.L = std::max(out.L, root);
        out.per_k.push_back({k, std::move(pk), root});
    }
    return out;
}

LoadProfile induced_load(const Instance& q, const Clustering& c, std::uint64_t p, SizeUnit unit) {
    return induced_load(relation_sizes(q, unit), c, p);
}

long double allocation_demand(std::span<const std::uint64_t> sizes, const Clustering& c, long double L) {
    if (!(L > 0)) throw std::invalid_argument("load must be positive");
    long double worst = 0;
    long double lk = 1;
    for (std::size_t k = 1; k <= c.size(); ++k) {
        lk *= L;
        worst = std::max(worst, to_long_double(max_k_product(sizes, c, k)) / lk);
    }
    return 1 + worst;
}

std::uint64_t machine_ceil(long double x) {
    const long double v = std::ceil(x * (1 - 1e-12L));
    return v < 0 ? 0 : static_cast<std::uint64_t>(v);
}

std::uint64_t allocate_config_machines(std::span<const std::uint64_t> sizes, const Clustering& c, long double L,
                                       long double c_alloc) {
    return machine_ceil(c_alloc * allocation_demand(sizes, c, L));
}

std::uint64_t allocate_config_machines(const Instance& q_eta, const Clustering& c, long double L,
                                       long double c_alloc, SizeUnit unit) {
    return allocate_config_machines(relation_sizes(q_eta, unit), c, L, c_alloc);
}

bool AuditReport::ok() const {
    return total_ok && std::all_of(lights.begin(), lights.end(), [](const LightAudit& a) { return a.ok; });
}

AuditReport audit_budgets(std::span<const std::uint64_t> allocs, std::uint64_t p, std::span<const LightBudget> lights) {
    AuditReport r;
    r.p = p;
    for (std::uint64_t a : allocs) r.total += a;
    r.ratio = p == 0 ? 0.0 : static_cast<double>(r.total) / static_cast<double>(p);
    r.total_ok = r.total <= p;
    for (const LightBudget& b : lights) {
        LightAudit a;
        a.product = b.p_bar;
        for (std::uint64_t pz : b.p_z) a.product *= pz;
        a.p_eta = b.p_eta;
        a.ratio = b.p_eta == 0 ? 0.0 : static_cast<double>(a.product) / static_cast<double>(b.p_eta);
        a.ok = a.product <= b.p_eta;
        r.lights.push_back(a);
    }
    return r;
}

}  // namespace acyclic_mpc
