#include "acyclic_mpc/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>

namespace acyclic_mpc {

namespace {

using Rels = std::vector<DistRelation>;

struct Outcome {
    DistRelation rel;
    std::size_t end;
};

struct Context {
    SimCluster& cluster;
    const EngineConfig& cfg;
    std::vector<LevelAudit>& levels;
    std::vector<Configuration>& top_configs;
};

// Candidate heavy thresholds, as multiples of L.
constexpr double kLadder[] = {1, 1.5, 2, 3, 4, 6, 8, 12, 16, 24, 32, 48, 64};

void require(bool ok, const std::string& what) {
    if (!ok) throw LemmaViolation(what);
}

std::uint64_t machines_for(long double scale, long double demand) {
    return std::max<std::uint64_t>(1, machine_ceil(scale * demand));
}

std::vector<std::uint64_t> word_sizes(const Rels& rels) {
    std::vector<std::uint64_t> out;
    out.reserve(rels.size());
    for (const auto& r : rels) out.push_back(r.words());
    return out;
}

bool any_empty(const Rels& rels) {
    return std::any_of(rels.begin(), rels.end(), [](const DistRelation& r) { return r.size() == 0; });
}

// Which configuration a value of the anchor attribute belongs to.
class Classifier {
public:
    explicit Classifier(const std::vector<Configuration>& configs) {
        for (std::size_t i = 0; i < configs.size(); ++i) {
            if (configs[i].heavy) {
                heavy_.emplace(configs[i].lo, i);
            } else {
                light_lo_.push_back(configs[i].lo);
                light_idx_.push_back(i);
            }
        }
    }

    std::size_t operator()(Value x) const {
        if (auto it = heavy_.find(x); it != heavy_.end()) return it->second;
        auto it = std::upper_bound(light_lo_.begin(), light_lo_.end(), x);
        return light_idx_[static_cast<std::size_t>(it - light_lo_.begin()) - 1];
    }

private:
    std::map<Value, std::size_t> heavy_;
    std::vector<Value> light_lo_;
    std::vector<std::size_t> light_idx_;
};

// R(e, eta) for every configuration; edges without the anchor attribute are
// shared unchanged.
std::vector<Rels> split_relations(const Rels& rels, AttrId attr, const std::vector<Configuration>& configs) {
    Classifier cls(configs);
    std::vector<Rels> out(configs.size());
    for (const DistRelation& r : rels) {
        if (!r.scheme.contains(attr)) {
            for (auto& o : out) o.push_back(r);
            continue;
        }
        for (auto& o : out) o.emplace_back(r.scheme, r.fragments.size());
        const std::size_t e = out.front().size() - 1;
        for (std::size_t a = 0; a < r.fragments.size(); ++a) {
            const Relation& f = r.fragments[a];
            for (std::size_t i = 0; i < f.size(); ++i) {
                out[cls(f.value(i, attr))][e].fragments[a].push_back(f.tuple(i));
            }
        }
    }
    return out;
}

// Words of R(e, eta) per configuration and edge, without materializing.
std::vector<std::vector<std::uint64_t>> split_sizes(const Rels& rels, AttrId attr,
                                                    const std::vector<Configuration>& configs) {
    Classifier cls(configs);
    std::vector<std::vector<std::uint64_t>> out(configs.size(), std::vector<std::uint64_t>(rels.size(), 0));
    for (std::size_t e = 0; e < rels.size(); ++e) {
        const DistRelation& r = rels[e];
        if (!r.scheme.contains(attr)) {
            for (auto& o : out) o[e] = r.words();
            continue;
        }
        for (const Relation& f : r.fragments) {
            for (std::size_t i = 0; i < f.size(); ++i) out[cls(f.value(i, attr))][e] += f.width();
        }
    }
    return out;
}

void add_frequencies(std::map<Value, std::uint64_t>& freq, const Relation& r, AttrId attr) {
    for (std::size_t i = 0; i < r.size(); ++i) freq[r.value(i, attr)] += r.width();
}

DistRelation augment(const DistRelation& in, AttrId attr, Value value) {
    AttrSet scheme = in.scheme;
    scheme.insert(attr);
    const std::size_t at = scheme.rank(attr);
    DistRelation out(scheme, in.fragments.size());
    std::vector<Value> row(scheme.size());
    for (std::size_t a = 0; a < in.fragments.size(); ++a) {
        const Relation& f = in.fragments[a];
        out.fragments[a].reserve(f.size());
        for (std::size_t i = 0; i < f.size(); ++i) {
            auto t = f.tuple(i);
            std::copy(t.begin(), t.begin() + static_cast<std::ptrdiff_t>(at), row.begin());
            row[at] = value;
            std::copy(t.begin() + static_cast<std::ptrdiff_t>(at), t.end(), row.begin() + static_cast<std::ptrdiff_t>(at) + 1);
            out.fragments[a].push_back(row);
        }
    }
    return out;
}

// `rels` lives on `from`; the result lives on `block`.
Outcome solve(Context& ctx, const MachineBlock& from, const MachineBlock& block, std::size_t round, const Cec& cover,
              const Rels& rels, std::size_t depth);

// Ships everything to a single machine and joins there.
Outcome solve_single(Context& ctx, const MachineBlock& parent, const MachineBlock& target, std::size_t round,
                     const Cec& cover, const Rels& rels) {
    Rels shipped = scatter_balanced(ctx.cluster, round, parent, rels, target);
    std::vector<Relation> local;
    for (const auto& r : shipped) local.push_back(r.fragments.front());
    DistRelation out(cover.graph().attributes(), 1);
    out.fragments[0] = join_along_tree(cover.tree(), local);
    return {std::move(out), round + 1};
}

Outcome solve_heavy(Context& ctx, const MachineBlock& parent, const MachineBlock& target, std::size_t round,
                    const Cec& cover, const Anchor& anchor, const Rels& rels, Value value, std::size_t depth) {
    // Step 1.
    Rels work = scatter_balanced(ctx.cluster, round, parent, rels, target);
    std::size_t r = round + 1;

    // Step 2: drop the anchor attribute locally.
    Residual residual = remove_attribute(cover, anchor);
    for (DistRelation& d : work) {
        if (!d.scheme.contains(anchor.attribute)) continue;
        AttrSet s = d.scheme;
        s.erase(anchor.attribute);
        for (Relation& f : d.fragments) f = f.project(s);
        d.scheme = s;
    }

    // Step 3: cleanse, mirroring every contraction with a semi-join.
    Cleansed cleansed = cleanse(residual);
    if (ctx.cfg.verify_lemmas) {
        require(edge_cover(residual.cover.tree()) == residual.cover, "residual cover differs from recomputation");
        require(edge_cover(cleansed.cover.tree()) == cleansed.cover, "cleansed cover differs from recomputation");
    }
    for (const LinkRemoval& rm : cleansed.removals) {
        work[rm.big] = semi_join(ctx.cluster, r, target, work[rm.big], work[rm.small]);
        r += 2;
    }
    Rels sub;
    for (EdgeId e : cleansed.map.inverse) sub.push_back(std::move(work[e]));
    if (ctx.cfg.verify_lemmas) {
        for (EdgeId i = 0; i < sub.size(); ++i) {
            require(sub[i].size() <= rels[cleansed.map.inverse[i]].size(), "residual relation grew");
        }
        // Words shrink by one column per tuple, so compare cardinalities.
        std::vector<std::uint64_t> tb, ta;
        for (const auto& d : rels) tb.push_back(d.size());
        for (const auto& d : sub) ta.push_back(d.size());
        const Clustering c = signature_clustering(cover);
        const Clustering cs = signature_clustering(cleansed.cover);
        for (std::size_t k = 1; k <= cs.size(); ++k) {
            require(max_k_product(ta, cs, k) <= max_k_product(tb, c, k), "max product grew after simplification");
        }
    }

    // Step 4 and Step 5.
    Outcome o = solve(ctx, target, target, r, cleansed.cover, sub, depth + 1);
    return {augment(o.rel, anchor.attribute, value), o.end};
}

struct Grid {
    std::vector<std::size_t> dims;
    long double scale = 0;
};

// Largest common scale c <= c_max whose per-factor counts ceil(c * demand)
// multiply to at most `budget`.
Grid grid_dims(const std::vector<long double>& demand, std::size_t budget, long double c_max) {
    auto dims_for = [&](long double c) {
        std::vector<std::size_t> dims;
        for (long double dem : demand) dims.push_back(machines_for(c, dem));
        return dims;
    };
    auto fits = [&](long double c) {
        long double prod = 1;
        for (std::size_t x : dims_for(c)) prod *= static_cast<long double>(x);
        return prod <= static_cast<long double>(budget);
    };
    long double c = c_max;
    if (!fits(c)) {
        long double lo = 0, hi = c;
        for (int it = 0; it < 100; ++it) {
            const long double mid = (lo + hi) / 2;
            (fits(mid) ? lo : hi) = mid;
        }
        c = lo;
    }
    return {dims_for(c), c};
}

std::vector<std::uint64_t> factor_words(const std::vector<Rels>& factor_rels) {
    std::vector<std::uint64_t> words;
    for (const Rels& fr : factor_rels) {
        std::uint64_t w = 0;
        for (const DistRelation& x : fr) w += x.words();
        words.push_back(w);
    }
    return words;
}

// Hands spare machines, one axis step at a time, to the factor with the
// most words per machine.
void spend_spare(std::vector<std::size_t>& dims, const std::vector<std::uint64_t>& words, std::size_t budget) {
    for (;;) {
        std::size_t prod = 1;
        for (std::size_t x : dims) prod *= x;
        std::optional<std::size_t> best;
        for (std::size_t j = 0; j < dims.size(); ++j) {
            if (prod / dims[j] * (dims[j] + 1) > budget) continue;
            if (!best || words[j] * dims[*best] > words[*best] * dims[j]) best = j;
        }
        if (!best) return;
        ++dims[*best];
    }
}

long double worst_share(const std::vector<std::size_t>& dims, const std::vector<std::uint64_t>& words) {
    long double worst = 0;
    for (std::size_t j = 0; j < dims.size(); ++j) {
        worst = std::max(worst, static_cast<long double>(words[j]) / static_cast<long double>(dims[j]));
    }
    return worst;
}

// Demand-scaled dims can strand a factor with many words on one axis cell
// when the budget is tight. A purely word-driven grid competes with it and
// the smaller worst share wins.
Grid choose_grid(const std::vector<long double>& demand, const std::vector<Rels>& factor_rels, std::size_t budget,
                 long double c_max) {
    const std::vector<std::uint64_t> words = factor_words(factor_rels);
    Grid scaled = grid_dims(demand, budget, c_max);
    spend_spare(scaled.dims, words, budget);
    std::vector<std::size_t> greedy(demand.size(), 1);
    spend_spare(greedy, words, budget);
    if (worst_share(greedy, words) < worst_share(scaled.dims, words)) {
        long double c = c_max;
        for (std::size_t j = 0; j < demand.size(); ++j) {
            c = std::min(c, static_cast<long double>(greedy[j]) / demand[j]);
        }
        return {std::move(greedy), c};
    }
    return scaled;
}

// The factor queries of a decomposition: parts by z, then the remainder.
std::vector<const SubTree*> factors_of(const Decomposition& d) {
    std::vector<const SubTree*> out;
    for (const SubTree& part : d.parts) out.push_back(&part);
    if (d.remainder) out.push_back(&*d.remainder);
    return out;
}

Outcome solve_light(Context& ctx, const MachineBlock& parent, const MachineBlock& target, std::size_t round,
                    const Cec& cover, const Anchor& anchor, const Rels& rels, long double L, std::size_t depth,
                    LightBudget& budget, double& grid_scale) {
    const Hypergraph& g = cover.graph();
    Decomposition d = decompose(cover, anchor);
    if (ctx.cfg.verify_lemmas) {
        for (const SubTree& part : d.parts) {
            require(edge_cover(part.cover.tree()) == part.cover, "decomposed cover differs from recomputation");
        }
        if (d.remainder) {
            require(edge_cover(d.remainder->cover.tree()) == d.remainder->cover,
                    "remainder cover differs from recomputation");
        }
    }

    // Step 2.
    std::vector<Relation> path_rels;
    for (EdgeId e : d.sigpath.nodes) path_rels.push_back(broadcast(ctx.cluster, round, parent, rels[e], target));

    // Step 3: one grid axis per factor query. The factors are solved one
    // after another, each reading its input straight from `parent`.
    const std::vector<const SubTree*> factors = factors_of(d);
    std::vector<Rels> factor_rels;
    std::vector<long double> demand;
    for (const SubTree* f : factors) {
        Rels fr;
        for (EdgeId e : f->origin) fr.push_back(rels[e]);
        demand.push_back(allocation_demand(word_sizes(fr), signature_clustering(f->cover), L));
        factor_rels.push_back(std::move(fr));
    }
    const Grid grid = choose_grid(demand, factor_rels, target.size(), ctx.cfg.c_alloc);
    const std::vector<std::size_t>& dims = grid.dims;
    grid_scale = static_cast<double>(grid.scale);
    budget.p_eta = target.size();
    budget.p_z.clear();
    budget.p_bar = 1;
    for (std::size_t j = 0; j < factors.size(); ++j) {
        if (factors[j]->z) {
            budget.p_z.push_back(dims[j]);
        } else {
            budget.p_bar = dims[j];
        }
    }

    std::size_t r = round + 1;
    std::vector<DistRelation> results;
    for (std::size_t j = 0; j < factors.size(); ++j) {
        const MachineBlock axis = target.axis(dims, j);
        Outcome o = solve(ctx, parent, axis, r, factors[j]->cover, factor_rels[j], depth + 1);
        r = o.end;
        // An empty factor empties the whole product.
        if (o.rel.size() == 0) return {DistRelation(g.attributes(), target.size()), r};
        results.push_back(std::move(o.rel));
    }

    // Step 4: a small join tree over the broadcast path relations and the
    // factor results, joined locally in every grid cell.
    const std::size_t k = d.sigpath.nodes.size();
    std::vector<AttrSet> schemes;
    std::vector<std::optional<EdgeId>> parent_of;
    std::optional<EdgeId> remainder_node;
    for (std::size_t j = 0; j < factors.size(); ++j) {
        if (!factors[j]->z) remainder_node = static_cast<EdgeId>(k + j);
    }
    for (std::size_t i = 0; i < k; ++i) {
        schemes.push_back(g.edge(d.sigpath.nodes[i]));
        parent_of.push_back(i == 0 ? remainder_node : std::optional<EdgeId>(static_cast<EdgeId>(i - 1)));
    }
    for (std::size_t j = 0; j < factors.size(); ++j) {
        schemes.push_back(results[j].scheme);
        if (factors[j]->z) {
            const EdgeId top = *cover.tree().parent(*factors[j]->z);
            const auto it = std::find(d.sigpath.nodes.begin(), d.sigpath.nodes.end(), top);
            parent_of.push_back(static_cast<EdgeId>(it - d.sigpath.nodes.begin()));
        } else {
            parent_of.push_back(std::nullopt);
        }
    }
    HyperedgeTree local_tree(Hypergraph(g.attribute_names(), schemes), parent_of);

    std::size_t cells = 1;
    for (std::size_t x : dims) cells *= x;
    DistRelation out(g.attributes(), target.size());
    for (std::size_t cell = 0; cell < cells; ++cell) {
        std::vector<Relation> local = path_rels;
        std::size_t rest = cell;
        std::vector<std::size_t> coord(dims.size());
        for (std::size_t j = dims.size(); j-- > 0;) {
            coord[j] = rest % dims[j];
            rest /= dims[j];
        }
        for (std::size_t j = 0; j < factors.size(); ++j) local.push_back(results[j].fragments[coord[j]]);
        out.fragments[cell] = join_along_tree(local_tree, local);
    }
    return {std::move(out), r};
}

struct Split {
    double lambda = 1;
    long double scale = 0;
    std::vector<Configuration> configs;
    std::vector<std::vector<std::uint64_t>> sizes;  ///< words of R(e, eta)
    std::vector<long double> demand;
};

Outcome solve(Context& ctx, const MachineBlock& from, const MachineBlock& block, std::size_t round, const Cec& cover,
              const Rels& rels, std::size_t depth) {
    const HyperedgeTree& t = cover.tree();
    const Hypergraph& g = t.graph();
    const std::size_t n = block.size();
    const bool resident = from == block;
    if (any_empty(rels)) return {DistRelation(g.attributes(), n), round};
    if (t.size() == 1) {
        if (resident) return {rels.front(), round};
        return {scatter_balanced(ctx.cluster, round, from, rels, block).front(), round + 1};
    }
    if (n == 1 && !resident) return solve_single(ctx, from, block, round, cover, rels);
    if (n == 1) {
        std::vector<Relation> local;
        for (const auto& r : rels) local.push_back(r.fragments.front());
        DistRelation out(g.attributes(), 1);
        out.fragments[0] = join_along_tree(t, local);
        return {std::move(out), round};
    }

    const std::vector<std::uint64_t> sizes = word_sizes(rels);
    const Clustering clustering = signature_clustering(cover);
    const long double L = std::max<long double>(induced_load(sizes, clustering, n).L, 1e-9L);
    const Anchor anchor = find_anchor(cover);
    const SignaturePath path = signature_path(cover, anchor.leaf);

    std::map<Value, std::uint64_t> freq_map;
    for (EdgeId e : path.nodes) {
        for (const Relation& f : rels[e].fragments) add_frequencies(freq_map, f, anchor.attribute);
    }
    const FrequencyTable freq(freq_map.begin(), freq_map.end());

    // Candidate thresholds are compared by the largest per-machine volume
    // any configuration would receive in one of its own rounds: the whole
    // of Q_eta spread over its machines, or for a light interval the larger
    // of its broadcast and its biggest factor share on the grid.
    const Decomposition decomposition = decompose(cover, anchor);
    const std::vector<const SubTree*> factors = factors_of(decomposition);
    std::vector<Clustering> factor_clusterings;
    for (const SubTree* f : factors) factor_clusterings.push_back(signature_clustering(f->cover));

    auto estimate = [&](const Split& s) {
        long double worst = 0;
        for (std::size_t i = 0; i < s.configs.size(); ++i) {
            const auto& sz = s.sizes[i];
            if (std::find(sz.begin(), sz.end(), 0) != sz.end()) continue;
            const auto a = static_cast<long double>(machines_for(s.scale, s.demand[i]));
            long double words = 0;
            for (std::uint64_t x : sz) words += static_cast<long double>(x);
            long double est = words / a;
            if (!s.configs[i].heavy && a > 1) {
                std::vector<long double> dem;
                std::vector<long double> fw;
                for (std::size_t j = 0; j < factors.size(); ++j) {
                    std::vector<std::uint64_t> fs;
                    for (EdgeId e : factors[j]->origin) fs.push_back(sz[e]);
                    dem.push_back(allocation_demand(fs, factor_clusterings[j], L));
                    fw.push_back(static_cast<long double>(std::accumulate(fs.begin(), fs.end(), std::uint64_t{0})));
                }
                const Grid grid = grid_dims(dem, static_cast<std::size_t>(a), ctx.cfg.c_alloc);
                est = static_cast<long double>(s.configs[i].frequency);
                for (std::size_t j = 0; j < factors.size(); ++j) {
                    est = std::max(est, fw[j] / static_cast<long double>(grid.dims[j]));
                }
            }
            worst = std::max(worst, est);
        }
        return worst;
    };

    Split best;
    long double best_score = std::numeric_limits<long double>::infinity();
    for (double lambda : kLadder) {
        Split s;
        s.lambda = lambda;
        s.configs = split_configurations(freq, lambda * L);
        const std::size_t count = s.configs.size();
        if (count <= n) {
            s.sizes = split_sizes(rels, anchor.attribute, s.configs);
            for (const auto& sz : s.sizes) s.demand.push_back(allocation_demand(sz, clustering, L));
            s.scale = fit_scale(s.demand, n, ctx.cfg.c_alloc);
            if (s.scale > 0) {
                const long double score = estimate(s);
                if (score < best_score) {
                    best_score = score;
                    best = std::move(s);
                }
            }
        }
        if (count <= 1) break;
    }
    if (best.configs.empty()) {
        throw BudgetExhausted("configurations do not fit on " + std::to_string(n) + " machines");
    }

    LevelAudit audit;
    audit.depth = depth;
    audit.machines = n;
    audit.edges = t.size();
    audit.attributes = g.attributes().size();
    audit.L = L;
    audit.lambda = best.lambda;
    audit.scale = static_cast<double>(best.scale);
    audit.configs_ok = static_cast<double>(best.configs.size()) <= ctx.cfg.c_cfg * static_cast<double>(n);

    std::vector<std::uint64_t> alloc;
    for (std::size_t i = 0; i < best.configs.size(); ++i) {
        alloc.push_back(machines_for(best.scale, best.demand[i]));
        best.configs[i].machines = alloc.back();
        audit.heavy += best.configs[i].heavy ? 1 : 0;
        audit.light += best.configs[i].heavy ? 0 : 1;
    }
    if (depth == 0 && ctx.top_configs.empty()) ctx.top_configs = best.configs;

    std::vector<Rels> parts = split_relations(rels, anchor.attribute, best.configs);
    for (EdgeId e = 0; e < rels.size(); ++e) {
        if (!rels[e].scheme.contains(anchor.attribute)) continue;
        std::uint64_t total = 0;
        for (const Rels& p : parts) total += p[e].size();
        if (total != rels[e].size()) audit.partition_ok = false;
    }

    const std::size_t level_index = ctx.levels.size();
    ctx.levels.push_back(audit);

    std::vector<LightBudget> lights;
    std::vector<double> grid_scales;
    DistRelation out(g.attributes(), n);
    std::size_t end = round;
    std::size_t offset = 0;
    for (std::size_t i = 0; i < best.configs.size(); ++i) {
        const Configuration& cfg = best.configs[i];
        const MachineBlock target = block.slice(offset, alloc[i]);
        Outcome o{DistRelation(g.attributes(), target.size()), round};
        if (any_empty(parts[i])) {
            // Empty join: nothing to ship.
        } else if (alloc[i] == 1) {
            o = solve_single(ctx, from, target, round, cover, parts[i]);
        } else if (cfg.heavy) {
            o = solve_heavy(ctx, from, target, round, cover, anchor, parts[i], cfg.lo, depth);
        } else {
            LightBudget lb;
            double gs = 0;
            o = solve_light(ctx, from, target, round, cover, anchor, parts[i], L, depth, lb, gs);
            lights.push_back(std::move(lb));
            grid_scales.push_back(gs);
        }
        for (std::size_t a = 0; a < o.rel.fragments.size(); ++a) {
            out.fragments[offset + a].append(o.rel.fragments[a]);
        }
        end = std::max(end, o.end);
        offset += alloc[i];
    }

    LevelAudit& stored = ctx.levels[level_index];
    stored.budget = audit_budgets(alloc, n, lights);
    stored.grid_scales = std::move(grid_scales);
    return {std::move(out), end};
}

}  // namespace

FrequencyTable frequency_table(const Cec& cover, const Anchor& anchor, std::span<const Relation> rels) {
    std::map<Value, std::uint64_t> freq;
    for (EdgeId e : signature_path(cover, anchor.leaf).nodes) add_frequencies(freq, rels[e], anchor.attribute);
    return FrequencyTable(freq.begin(), freq.end());
}

std::vector<Configuration> split_configurations(const FrequencyTable& freq, long double threshold) {
    std::vector<Configuration> heavy;
    std::vector<Configuration> light;
    Configuration cur;  // light interval being built, starts at 0
    for (const auto& [value, f] : freq) {
        if (static_cast<long double>(f) >= threshold) {
            Configuration h;
            h.heavy = true;
            h.lo = h.hi = value;
            h.frequency = f;
            heavy.push_back(h);
            continue;
        }
        if (cur.frequency > 0 && static_cast<long double>(cur.frequency + f) > threshold) {
            cur.hi = value - 1;
            light.push_back(cur);
            cur = Configuration{};
            cur.lo = value;
        }
        cur.frequency += f;
    }
    cur.hi = std::numeric_limits<Value>::max();
    light.push_back(cur);

    std::vector<Configuration> out = std::move(heavy);
    out.insert(out.end(), light.begin(), light.end());
    return out;
}

long double fit_scale(std::span<const long double> demands, std::uint64_t budget, long double c_max) {
    if (demands.size() > budget) return 0;
    auto total = [&](long double c) {
        std::uint64_t s = 0;
        for (long double d : demands) s += machines_for(c, d);
        return s;
    };
    if (total(c_max) <= budget) return c_max;
    long double lo = 0, hi = c_max;
    for (int it = 0; it < 100; ++it) {
        const long double mid = (lo + hi) / 2;
        (total(mid) <= budget ? lo : hi) = mid;
    }
    return lo > 0 ? lo : std::numeric_limits<long double>::min();
}

double EngineResult::ratio() const {
    return profile.L > 0 ? static_cast<double>(static_cast<long double>(load.max_load) / profile.L) : 0.0;
}

bool EngineResult::audits_ok() const {
    return std::all_of(levels.begin(), levels.end(),
                       [](const LevelAudit& a) { return a.budget.ok() && a.partition_ok; });
}

bool EngineResult::configs_ok() const {
    return std::all_of(levels.begin(), levels.end(), [](const LevelAudit& a) { return a.configs_ok; });
}

EngineResult run_engine(const Instance& q, const HyperedgeTree& t, std::size_t machines, const EngineConfig& cfg) {
    if (machines == 0) throw std::invalid_argument("machine count must be positive");
    if (t.size() != q.graph.num_edges()) throw std::invalid_argument("tree does not match the query");
    if (!validate_tree(t)) throw std::invalid_argument("tree violates the connectedness requirement");

    const std::size_t cap =
        cfg.round_cap ? cfg.round_cap : 2 * (q.graph.attributes().size() + q.graph.num_edges());
    SimCluster cluster(machines, cap);
    const MachineBlock all = MachineBlock::contiguous(0, machines);

    EngineResult res;
    res.input_words = q.input_words();
    Rels rels;
    for (const Relation& r : q.relations) rels.push_back(place_round_robin(r, machines));

    std::size_t round = 0;
    HyperedgeTree tree = t;
    res.kept_edges.resize(t.size());
    for (EdgeId e = 0; e < t.size(); ++e) res.kept_edges[e] = e;
    if (!q.graph.is_clean()) {
        CleansedTree c = cleanse_links(t);
        for (const LinkRemoval& rm : c.removals) {
            if (machines == 1) {
                rels[rm.big].fragments[0] = semi_join(rels[rm.big].fragments[0], rels[rm.small].fragments[0]);
            } else {
                rels[rm.big] = semi_join(cluster, round, all, rels[rm.big], rels[rm.small]);
                round += 2;
            }
        }
        Rels kept;
        for (EdgeId e : c.origin) kept.push_back(std::move(rels[e]));
        rels = std::move(kept);
        res.kept_edges = c.origin;
        tree = c.tree.rerooted(c.tree.lowest_raw_leaf());
    }

    // The clustering needs the root inside the cover.
    if (!edge_cover(tree).contains(tree.root())) tree = tree.rerooted(tree.lowest_raw_leaf());
    res.cover = edge_cover(tree);
    res.clustering = signature_clustering(res.cover);
    res.profile = induced_load(word_sizes(rels), res.clustering, machines);

    Context ctx{cluster, cfg, res.levels, res.top_configs};
    Outcome o = solve(ctx, all, all, round, res.cover, rels, 0);
    cluster.reserve_rounds(o.end);
    res.output = o.rel.collect();
    res.output.sort_unique();
    res.load = cluster.finish();
    return res;
}

}  // namespace acyclic_mpc
