// Acceptance harness: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "acyclic_mpc/cec.hpp"
#include "acyclic_mpc/engine.hpp"
#include "acyclic_mpc/oracle.hpp"
#include "acyclic_mpc/report.hpp"
#include "fixtures.hpp"

using namespace acyclic_mpc;
namespace fx = fixtures;

namespace {

using Clock = std::chrono::steady_clock;
using Groups = std::vector<std::vector<EdgeId>>;

struct Outcome {
    bool ok = true;
    std::string detail;
    std::size_t violations = 0;

    void fail(const std::string& why) {
        if (violations++ < 5) detail += (detail.empty() ? "" : "; ") + why;
        ok = false;
    }
};

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

Groups sorted_groups(Groups g) {
    for (auto& x : g) std::sort(x.begin(), x.end());
    std::sort(g.begin(), g.end());
    return g;
}

Groups named(const Hypergraph& g, const std::vector<std::vector<std::string>>& names) {
    Groups out;
    for (const auto& c : names) out.push_back(fx::ids(g, c));
    return sorted_groups(out);
}

Groups mapped(const SubTree& s, const Groups& clusters) {
    Groups out;
    for (const auto& c : clusters) {
        std::vector<EdgeId> m;
        for (EdgeId e : c) m.push_back(s.origin[e]);
        out.push_back(m);
    }
    return sorted_groups(out);
}

// ---------------------------------------------------------------------------
// Corpus of small random acyclic hypergraphs.

struct CorpusEntry {
    Hypergraph graph;
    std::vector<HyperedgeTree> trees;  ///< join trees rooted at raw leaves
};

std::vector<CorpusEntry> make_corpus(std::size_t count, bool clean, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<CorpusEntry> out;
    while (out.size() < count) {
        fx::RandomQuery q = fx::random_acyclic(rng, 6, 10, clean);
        CorpusEntry c{q.graph, {}};
        if (auto t = build_join_tree(q.graph)) c.trees.push_back(*t);
        std::vector<EdgeId> leaves;
        for (EdgeId e = 0; e < q.witness.size(); ++e) {
            if (q.witness.is_raw_leaf(e)) leaves.push_back(e);
        }
        c.trees.push_back(q.witness.rerooted(leaves[rng() % leaves.size()]));
        out.push_back(std::move(c));
    }
    return out;
}

struct AnchorCase {
    const HyperedgeTree* tree;
    Cec cover;
    Anchor anchor;
};

std::vector<AnchorCase> all_anchors(const std::vector<CorpusEntry>& corpus) {
    std::vector<AnchorCase> out;
    for (const CorpusEntry& c : corpus) {
        if (c.graph.num_edges() < 2) continue;
        for (const HyperedgeTree& t : c.trees) {
            Cec cover = edge_cover(t);
            for (EdgeId f : cover.members()) {
                for (AttrId a : anchor_attributes(cover, f).ids()) {
                    out.push_back({&t, cover, *make_anchor(cover, f, a)});
                }
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

Outcome criterion1() {
    Outcome o;
    const auto t0 = Clock::now();
    const HyperedgeTree t = fx::running_tree();
    const Hypergraph& g = t.graph();
    const Cec cover = edge_cover(t);

    const auto want_f = fx::ids(g, {"ABC", "BD", "BO", "EFG", "HI", "LM", "EHJ", "HK", "HN"});
    if (cover.members() != want_f) o.fail("edge cover differs");

    const Groups want_c = named(g, {{"BO", "BCE", "CEJ"},
                                    {"ABC", "BCE", "CEJ"},
                                    {"BD", "BCE", "CEJ"},
                                    {"EFG", "CEF", "CEJ"},
                                    {"HI"},
                                    {"EHJ"},
                                    {"LM", "KL"},
                                    {"HK"},
                                    {"HN"}});
    if (sorted_groups(signature_clustering(cover).clusters) != want_c) o.fail("clustering differs");

    const AttrId C = *g.find_attribute("C");
    const AttrId I = *g.find_attribute("I");
    if (!make_anchor(cover, fx::id(g, "ABC"), C)) o.fail("(ABC, C) rejected");
    if (!make_anchor(cover, fx::id(g, "HI"), I)) o.fail("(HI, I) rejected");
    if (!anchor_attributes(cover, fx::id(g, "BD")).empty()) o.fail("BD accepted as anchor leaf");
    if (!anchor_attributes(cover, fx::id(g, "LM")).empty()) o.fail("LM accepted as anchor leaf");

    const Anchor anchor = *make_anchor(cover, fx::id(g, "ABC"), C);
    const Decomposition d = decompose(cover, anchor);
    std::vector<EdgeId> zs;
    for (const SubTree& p : d.parts) zs.push_back(*p.z);
    std::sort(zs.begin(), zs.end());
    if (zs != fx::ids(g, {"BO", "BD", "CEF"})) o.fail("Z differs");
    if (d.sigpath.nodes != std::vector<EdgeId>{fx::id(g, "CEJ"), fx::id(g, "BCE"), fx::id(g, "ABC")}) {
        o.fail("signature path differs");
    }
    for (const SubTree& p : d.parts) {
        const Groups got = mapped(p, signature_clustering(p.cover).clusters);
        Groups want;
        const std::string z = g.label(*p.z);
        if (z == "CEF") want = named(g, {{"CEJ"}, {"EFG", "CEF"}});
        if (z == "BO") want = named(g, {{"BCE"}, {"BO"}});
        if (z == "BD") want = named(g, {{"BCE"}, {"BD"}});
        if (got != want) o.fail("clustering of part " + z + " differs");
    }
    if (!d.remainder) {
        o.fail("remainder missing");
    } else if (mapped(*d.remainder, signature_clustering(d.remainder->cover).clusters) !=
               named(g, {{"HI"}, {"EHJ"}, {"LM", "KL"}, {"HK"}, {"HN"}})) {
        o.fail("remainder clustering differs");
    }
    const double secs = seconds_since(t0);
    if (secs >= 1.0) o.fail("took " + std::to_string(secs) + " s");
    o.detail = o.ok ? "cover, clusters, anchors and decomposition match" : o.detail;
    return o;
}

Outcome criterion2(const std::vector<CorpusEntry>& corpus) {
    Outcome o;
    const auto t0 = Clock::now();
    std::mt19937_64 rng(2024);
    std::size_t trees = 0;
    for (const CorpusEntry& c : corpus) {
        if (!oracle::is_acyclic(c.graph)) o.fail("generator produced a cyclic graph");
        if (!build_join_tree(c.graph)) o.fail("no join tree for an acyclic graph");
        const std::size_t rho = oracle::min_cover(c.graph);
        for (const HyperedgeTree& t : c.trees) {
            ++trees;
            if (!validate_tree(t)) o.fail("invalid join tree");
            const Cec f = edge_cover(t);
            if (f.size() != rho) o.fail("cover of size " + std::to_string(f.size()) + " vs optimum " + std::to_string(rho));
            for (int i = 0; i < 5; ++i) {
                const auto order = fx::random_bottom_up_order(t, rng);
                if (!(edge_cover(t, order) == f)) o.fail("cover depends on the processing order");
            }
            if (c.graph.is_clean()) {
                for (EdgeId e = 0; e < t.size(); ++e) {
                    if (t.is_raw_leaf(e) && !f.contains(e)) o.fail("raw leaf outside the cover");
                }
            }
        }
    }
    const double secs = seconds_since(t0);
    if (secs >= 60.0) o.fail("took " + std::to_string(secs) + " s");
    if (o.ok) {
        std::ostringstream s;
        s << corpus.size() << " graphs, " << trees << " trees, " << secs << " s";
        o.detail = s.str();
    }
    return o;
}

Outcome criterion3(const std::vector<AnchorCase>& cases) {
    Outcome o;
    for (const AnchorCase& c : cases) {
        const Residual res = remove_attribute(c.cover, c.anchor);
        if (!(edge_cover(res.cover.tree()) == res.cover)) o.fail("residual cover differs from recomputation");
        const Hypergraph& gp = res.cover.graph();
        for (EdgeId e = 0; e < gp.num_edges(); ++e) {
            if (gp.is_subsumed(e) && res.cover.contains(e)) o.fail("subsumed residual edge in the cover");
        }
        if (res.leaf_subsumed) {
            const Hypergraph& g = c.cover.graph();
            for (EdgeId e = 0; e < g.num_edges(); ++e) {
                if (e != c.anchor.leaf && g.edge(e).contains(c.anchor.attribute)) {
                    o.fail("anchor attribute not exclusive in a subsumed anchor leaf");
                }
            }
        }
        const Cleansed cl = cleanse(res);
        if (!(edge_cover(cl.cover.tree()) == cl.cover)) o.fail("cleansed cover differs from recomputation");
        if (!cl.cover.graph().is_clean()) o.fail("cleansed graph not clean");

        const Decomposition d = decompose(c.cover, c.anchor);
        for (const SubTree& p : d.parts) {
            if (!(edge_cover(p.cover.tree()) == p.cover)) o.fail("part cover differs from recomputation");
        }
        if (d.remainder && !(edge_cover(d.remainder->cover.tree()) == d.remainder->cover)) {
            o.fail("remainder cover differs from recomputation");
        }
    }
    if (o.ok) o.detail = std::to_string(cases.size()) + " anchors checked";
    return o;
}

Outcome criterion4(const std::vector<AnchorCase>& cases) {
    Outcome o;
    std::size_t groups = 0;
    for (const AnchorCase& c : cases) {
        const Groups base = oracle::clusters(c.cover);

        const Cleansed cl = cleanse(remove_attribute(c.cover, c.anchor));
        const Groups star = oracle::clusters(cl.cover);
        for (std::size_t k = 1; k <= star.size(); ++k) {
            for (const auto& grp : oracle::k_groups(star, k)) {
                ++groups;
                std::vector<EdgeId> pre;
                for (EdgeId e : grp) pre.push_back(cl.map.inverse[e]);
                if (!oracle::is_k_group(base, pre)) o.fail("k-group of the residual clustering not a k-group");
            }
        }

        const Decomposition d = decompose(c.cover, c.anchor);
        std::size_t pool = 0;
        if (d.remainder) pool += d.remainder->cover.size();
        for (const SubTree& p : d.parts) pool += p.cover.size() - 1;
        for (std::size_t k = 1; k <= pool; ++k) {
            for (const auto& grp : oracle::super_k_groups(d, k)) {
                ++groups;
                if (!oracle::is_k_group(base, grp)) o.fail("super-k-group not a k-group");
            }
        }
    }
    if (o.ok) o.detail = std::to_string(groups) + " groups over " + std::to_string(cases.size()) + " anchors";
    return o;
}

// ---------------------------------------------------------------------------
// Engine suite shared by criteria 5 to 9.

struct Workload {
    std::string name;
    Instance instance;
    HyperedgeTree tree;
    std::size_t machines;
};

Hypergraph graph_of(const std::vector<std::string>& edges) {
    std::set<char> letters;
    for (const auto& e : edges) letters.insert(e.begin(), e.end());
    std::vector<std::string> names;
    for (char ch : letters) names.emplace_back(1, ch);
    std::vector<AttrSet> sets;
    for (const auto& e : edges) {
        AttrSet s;
        for (char ch : e) s.insert(static_cast<AttrId>(std::distance(letters.begin(), letters.find(ch))));
        sets.push_back(s);
    }
    return Hypergraph(names, sets);
}

constexpr long double kMaxOutput = 300000;

std::vector<Workload> make_workloads() {
    struct Schema {
        std::string name;
        HyperedgeTree tree;
    };
    std::vector<Schema> schemas;
    schemas.push_back({"running", fx::running_tree()});
    schemas.push_back({"path", *build_join_tree(graph_of({"AB", "BC", "CD", "DE"}))});
    schemas.push_back({"star", *build_join_tree(graph_of({"AB", "AC", "AD", "AE"}))});
    schemas.push_back({"unclean", *build_join_tree(graph_of({"AB", "ABC", "CD", "D", "CE"}))});
    std::mt19937_64 rng(77);
    for (int i = 0; i < 5; ++i) {
        // Edges joined on nothing would make the output a cartesian product.
        while (true) {
            fx::RandomQuery q = fx::random_acyclic(rng, 6, 8, true);
            if (q.graph.num_edges() < 3) continue;
            HyperedgeTree t = *build_join_tree(q.graph);
            bool linked = true;
            for (EdgeId e = 0; e < t.size(); ++e) {
                if (auto p = t.parent(e); p && !t.graph().edge(e).intersects(t.graph().edge(*p))) linked = false;
            }
            if (!linked) continue;
            schemas.push_back({"random" + std::to_string(i), t});
            break;
        }
    }

    const std::vector<std::pair<Skew, std::string>> skews = {
        {Skew::Uniform, "uniform"}, {Skew::Zipf, "zipf"}, {Skew::Heavy, "heavy"}};
    const std::size_t machines[] = {1, 4, 16, 64};
    std::vector<Workload> out;
    std::uint64_t seed = 1;
    for (const Schema& s : schemas) {
        const Hypergraph& g = s.tree.graph();
        // Skew the attribute the engine splits on first, when there is one.
        std::vector<std::string> skewed;
        if (g.is_clean() && g.num_edges() > 1) {
            const Cec f = edge_cover(s.tree);
            if (f.contains(s.tree.root())) skewed.push_back(g.attribute_name(find_anchor(f).attribute));
        }
        for (const auto& [skew, sname] : skews) {
            for (std::size_t p : machines) {
                for (int rep = 0; rep < 2; ++rep) {
                    const std::uint64_t planted = 150 + 100 * static_cast<std::uint64_t>(rep);
                    Instance inst = fx::planted_instance(g, seed++, planted, planted, 400, skew,
                                                         skew == Skew::Uniform ? std::vector<std::string>{} : skewed);
                    if (fx::join_count(inst, s.tree) > kMaxOutput) continue;
                    out.push_back({s.name + "/" + sname + "/p" + std::to_string(p) + "/" + std::to_string(rep),
                                   std::move(inst), s.tree, p});
                }
            }
        }
    }
    return out;
}

struct EngineOutcomes {
    Outcome correctness, load, budget, configs;
    double max_ratio = 0;
    double seconds = 0;
};

EngineOutcomes run_suite(const std::vector<Workload>& ws, bool verbose, const std::string& only) {
    EngineOutcomes r;
    const auto t0 = Clock::now();
    EngineConfig cfg;
    cfg.verify_lemmas = true;
    std::string worst;
    for (const Workload& w : ws) {
        if (!only.empty() && w.name.rfind(only, 0) != 0) continue;
        EngineResult res;
        try {
            res = run_engine(w.instance, w.tree, w.machines, cfg);
        } catch (const std::exception& e) {
            r.correctness.fail(w.name + ": " + e.what());
            continue;
        }
        if (!(res.output == oracle::yannakakis(w.instance, w.tree))) r.correctness.fail(w.name + ": output mismatch");
        if (verbose) {
            std::printf("  %-24s m=%-7llu out=%-8zu L=%-10.1Lf max=%-8llu ratio=%.3f rounds=%zu/%zu levels=%zu\n",
                        w.name.c_str(), static_cast<unsigned long long>(res.input_words), res.output.size(),
                        res.profile.L, static_cast<unsigned long long>(res.load.max_load), res.ratio(),
                        res.load.rounds, res.load.round_cap, res.levels.size());
            std::printf("    rounds:");
            for (auto x : res.load.per_round_load) std::printf(" %llu", static_cast<unsigned long long>(x));
            std::printf("\n");
            for (const LevelAudit& a : res.levels) {
                if (a.depth > 1) continue;
                std::printf("    depth=%zu n=%zu edges=%zu L=%.1Lf lambda=%g scale=%.3f heavy=%zu light=%zu alloc=%llu\n",
                            a.depth, a.machines, a.edges, a.L, a.lambda, a.scale, a.heavy, a.light,
                            static_cast<unsigned long long>(a.budget.total));
            }
            std::fflush(stdout);
        }

        const double ratio = res.ratio();
        if (ratio > r.max_ratio) {
            r.max_ratio = ratio;
            worst = w.name;
        }
        if (ratio > cfg.c_load) {
            std::ostringstream s;
            s << w.name << ": ratio " << ratio;
            r.load.fail(s.str());
        }
        const long double bound = static_cast<long double>(res.input_words) /
                                  std::pow(static_cast<long double>(w.machines), 1.0L / res.cover.size());
        if (res.profile.L > bound * (1 + 1e-12L)) r.load.fail(w.name + ": L exceeds m/p^(1/|F|)");
        if (!res.audits_ok()) r.budget.fail(w.name + ": budget audit");
        if (!res.configs_ok()) r.configs.fail(w.name + ": configuration count");
    }
    r.seconds = seconds_since(t0);
    if (r.seconds >= 300) r.correctness.fail("took " + std::to_string(r.seconds) + " s");
    std::ostringstream s;
    s << ws.size() << " instances, " << r.seconds << " s";
    if (r.correctness.ok) r.correctness.detail = s.str();
    std::ostringstream l;
    l << "max ratio " << r.max_ratio << " (" << worst << ")";
    r.load.detail = r.load.ok ? l.str() : l.str() + "; " + r.load.detail;
    if (r.budget.ok) r.budget.detail = "all allocations within budget";
    if (r.configs.ok) r.configs.detail = "configuration counts within c_cfg * p";
    return r;
}

Outcome criterion9(const std::vector<Workload>& ws) {
    Outcome o;
    std::size_t checked = 0;
    for (std::size_t i = 0; i < ws.size(); i += 7) {
        const Workload& w = ws[i];
        RunInfo info;
        info.machines = w.machines;
        info.seed = i;
        std::string first;
        for (int run = 0; run < 2; ++run) {
            const EngineResult res = run_engine(w.instance, w.tree, w.machines, info.config);
            const std::string text = dump_report(make_report(w.instance, w.tree, res, info));
            if (run == 0) {
                first = text;
            } else if (text != first) {
                o.fail(w.name + ": reports differ");
            }
        }
        ++checked;
    }
    if (o.ok) o.detail = std::to_string(checked) + " report pairs identical";
    return o;
}

int report(int n, const Outcome& o) {
    std::printf("%s criterion %d: %s\n", o.ok ? "PASS" : "FAIL", n, o.detail.c_str());
    std::fflush(stdout);
    return o.ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    const bool verbose = argc > 1 && std::string(argv[1]) == "--verbose";
    const std::string only = argc > 2 ? argv[2] : "";
    int failures = 0;
    failures += report(1, criterion1());

    std::vector<CorpusEntry> corpus = make_corpus(1000, true, 11);
    std::vector<CorpusEntry> mixed = make_corpus(300, false, 12);
    std::vector<CorpusEntry> all = corpus;
    all.insert(all.end(), mixed.begin(), mixed.end());
    failures += report(2, criterion2(all));

    const std::vector<AnchorCase> anchors = all_anchors(corpus);
    failures += report(3, criterion3(anchors));
    failures += report(4, criterion4(anchors));

    const std::vector<Workload> ws = make_workloads();
    const EngineOutcomes e = run_suite(ws, verbose, only);
    failures += report(5, e.correctness);
    failures += report(6, e.load);
    failures += report(7, e.budget);
    failures += report(8, e.configs);
    failures += report(9, criterion9(ws));
    return failures == 0 ? 0 : 1;
}
