#include "acyclic_mpc/report.hpp"

#include <cmath>

namespace acyclic_mpc {

namespace {

using nlohmann::ordered_json;

ordered_json num(long double v) { return static_cast<double>(v); }

ordered_json parents_json(const HyperedgeTree& t) {
    ordered_json out = ordered_json::array();
    for (EdgeId e = 0; e < t.size(); ++e) {
        if (auto p = t.parent(e)) {
            out.push_back(*p);
        } else {
            out.push_back(nullptr);
        }
    }
    return out;
}

ordered_json labels(const Hypergraph& g, std::span<const EdgeId> ids) {
    ordered_json out = ordered_json::array();
    for (EdgeId e : ids) out.push_back(g.label(e));
    return out;
}

}  // namespace

ordered_json make_report(const Instance& q, const HyperedgeTree& tree, const EngineResult& r, const RunInfo& info) {
    const Hypergraph& g = q.graph;
    ordered_json j;

    ordered_json hg;
    hg["attributes"] = g.attributes().size();
    hg["edges"] = ordered_json::array();
    for (EdgeId e = 0; e < g.num_edges(); ++e) {
        hg["edges"].push_back({{"name", g.label(e)}, {"scheme", g.format(g.edge(e))}, {"tuples", q.relations[e].size()}});
    }
    hg["clean"] = g.is_clean();
    hg["input_tuples"] = q.input_size();
    hg["input_words"] = r.input_words;
    j["hypergraph"] = hg;
    j["tree"] = {{"root", tree.root()}, {"parents", parents_json(tree)}};

    // Cover and clustering are reported with the names of the input edges.
    std::vector<EdgeId> members;
    for (EdgeId e : r.cover.members()) members.push_back(r.kept_edges[e]);
    j["kept_edges"] = labels(g, r.kept_edges);
    j["cover"] = labels(g, members);
    ordered_json cl = ordered_json::array();
    for (std::size_t i = 0; i < r.clustering.size(); ++i) {
        std::vector<EdgeId> c;
        for (EdgeId e : r.clustering.clusters[i]) c.push_back(r.kept_edges[e]);
        cl.push_back({{"owner", g.label(r.kept_edges[r.clustering.owners[i]])}, {"edges", labels(g, c)}});
    }
    j["clustering"] = cl;

    ordered_json load;
    load["unit"] = "words";
    load["L"] = num(r.profile.L);
    ordered_json per_k = ordered_json::array();
    for (const LoadRow& row : r.profile.per_k) {
        per_k.push_back({{"k", row.k}, {"P_k", row.product.str()}, {"root", num(row.root)}});
    }
    load["per_k"] = per_k;
    j["load"] = load;

    std::size_t heavy = 0;
    for (const Configuration& c : r.top_configs) heavy += c.heavy ? 1 : 0;
    j["configurations"] = {{"total", r.top_configs.size()},
                           {"heavy", heavy},
                           {"light", r.top_configs.size() - heavy}};

    ordered_json levels = ordered_json::array();
    for (const LevelAudit& a : r.levels) {
        ordered_json lights = ordered_json::array();
        for (const LightAudit& la : a.budget.lights) {
            lights.push_back({{"product", la.product}, {"p_eta", la.p_eta}, {"ok", la.ok}});
        }
        levels.push_back({{"depth", a.depth},
                          {"machines", a.machines},
                          {"edges", a.edges},
                          {"attributes", a.attributes},
                          {"L", num(a.L)},
                          {"lambda", a.lambda},
                          {"scale", a.scale},
                          {"heavy", a.heavy},
                          {"light", a.light},
                          {"configs_ok", a.configs_ok},
                          {"partition_ok", a.partition_ok},
                          {"allocated", a.budget.total},
                          {"allocation_ok", a.budget.total_ok},
                          {"lights", lights},
                          {"grid_scales", a.grid_scales}});
    }
    j["levels"] = levels;

    ordered_json run;
    run["machines"] = info.machines;
    if (info.seed) {
        run["seed"] = *info.seed;
    } else {
        run["seed"] = nullptr;
    }
    run["constants"] = {{"c_load", info.config.c_load}, {"c_alloc", info.config.c_alloc}, {"c_cfg", info.config.c_cfg}};
    run["rounds"] = r.load.rounds;
    run["round_cap"] = r.load.round_cap;
    run["per_round_load"] = r.load.per_round_load;
    run["max_load"] = r.load.max_load;
    run["ratio"] = r.ratio();
    run["within_load_bound"] = r.ratio() <= info.config.c_load;
    run["audits_ok"] = r.audits_ok();
    run["configs_ok"] = r.configs_ok();
    run["output_tuples"] = r.output.size();
    if (info.verified) {
        run["verify"] = *info.verified;
    } else {
        run["verify"] = nullptr;
    }
    j["run"] = run;
    return j;
}

std::string dump_report(const ordered_json& report) { return report.dump(2) + "\n"; }

}  // namespace acyclic_mpc
