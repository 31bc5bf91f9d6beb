#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "acyclic_mpc/cec.hpp"
#include "acyclic_mpc/engine.hpp"
#include "acyclic_mpc/oracle.hpp"
#include "acyclic_mpc/report.hpp"
#include "acyclic_mpc/workload.hpp"

namespace {

using namespace acyclic_mpc;
using nlohmann::json;
using nlohmann::ordered_json;

enum Exit { kOk = 0, kInternal = 1, kInput = 2, kMismatch = 3 };

struct VerifyMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void setup_logging() {
    auto logger = spdlog::stderr_color_mt("acyclic_mpc");
    spdlog::set_default_logger(logger);
    spdlog::set_pattern("[%l] %v");
    spdlog::set_level(spdlog::level::warn);
    if (const char* env = std::getenv("ACYCLIC_MPC_LOG")) {
        const auto level = spdlog::level::from_str(env);
        // from_str maps unknown names to "off"; only honour real ones.
        if (level != spdlog::level::off || std::string(env) == "off") spdlog::set_level(level);
    }
}

EngineConfig parse_constants(const std::string& text) {
    EngineConfig cfg;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw InputError("constant '" + item + "' is not name=value");
        const std::string name = item.substr(0, eq);
        double value = 0;
        try {
            std::size_t used = 0;
            value = std::stod(item.substr(eq + 1), &used);
            if (used != item.size() - eq - 1) throw std::invalid_argument(name);
        } catch (const std::exception&) {
            throw InputError("constant '" + name + "' needs a number");
        }
        if (!(value > 0)) throw InputError("constant '" + name + "' must be positive");
        if (name == "c_load") {
            cfg.c_load = value;
        } else if (name == "c_alloc") {
            cfg.c_alloc = value;
        } else if (name == "c_cfg") {
            cfg.c_cfg = value;
        } else {
            throw InputError("unknown constant '" + name + "'");
        }
    }
    return cfg;
}

std::vector<std::optional<EdgeId>> read_parents(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw InputError("cannot parse " + path.string() + ": " + e.what());
    }
    return parse_parents(j.is_object() ? j.at("parents") : j);
}

// Explicit parent array (flag first, then the query file), else GYO.
HyperedgeTree pick_tree(const Hypergraph& g, const QuerySpec& spec, const std::string& tree_path) {
    std::optional<std::vector<std::optional<EdgeId>>> parents = spec.parents;
    if (!tree_path.empty()) parents = read_parents(tree_path);
    if (!parents) {
        auto t = build_join_tree(g);
        if (!t) throw InputError("query is not acyclic");
        spdlog::info("join tree built by ear elimination, root {}", g.label(t->root()));
        return *t;
    }
    HyperedgeTree t;
    try {
        t = HyperedgeTree(g, *parents);
    } catch (const std::invalid_argument& e) {
        throw InputError(std::string("bad parent array: ") + e.what());
    }
    if (!validate_tree(t)) {
        if (!build_join_tree(g)) throw InputError("query is not acyclic");
        throw InputError("parent array breaks the connectedness requirement");
    }
    return t;
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path);
    out << text;
}

struct RunArgs {
    std::string query;
    std::size_t machines = 1;
    std::optional<std::uint64_t> seed;
    bool verify = false;
    bool verify_lemmas = false;
    std::string report;
    std::string constants;
    std::string tree;
};

int cmd_run(const RunArgs& a) {
    const QuerySpec spec = QuerySpec::load(a.query);
    EngineConfig cfg = parse_constants(a.constants);
    cfg.verify_lemmas = a.verify_lemmas;
    if (a.machines == 0) throw InputError("--machines must be positive");

    const Instance q = materialize(spec, a.seed);
    const HyperedgeTree t = pick_tree(q.graph, spec, a.tree);
    spdlog::info("{} relations, {} tuples, {} machines", q.graph.num_edges(), q.input_size(), a.machines);

    const EngineResult r = run_engine(q, t, a.machines, cfg);
    spdlog::info("L = {:.2f} words, max load {} words, ratio {:.3f}, {} rounds", static_cast<double>(r.profile.L),
                 r.load.max_load, r.ratio(), r.load.rounds);

    RunInfo info{a.machines, a.seed, cfg, std::nullopt};
    if (a.verify) {
        const Relation expected = oracle::yannakakis(q, t);
        info.verified = expected == r.output;
        spdlog::info("oracle join has {} tuples, engine {}", expected.size(), r.output.size());
    }
    write_text(a.report, dump_report(make_report(q, t, r, info)));

    if (r.ratio() > cfg.c_load) spdlog::warn("load ratio {:.3f} exceeds c_load = {}", r.ratio(), cfg.c_load);
    if (!r.audits_ok()) spdlog::warn("machine budget audit failed");
    if (!r.configs_ok()) spdlog::warn("configuration count exceeds c_cfg * p");
    if (info.verified && !*info.verified) throw VerifyMismatch("engine output differs from the oracle join");
    return kOk;
}

int cmd_gen(const std::string& query, const std::string& out_dir, std::optional<std::uint64_t> seed) {
    const QuerySpec spec = QuerySpec::load(query);
    const Instance q = materialize(spec, seed);
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw InputError("cannot create " + out_dir + ": " + ec.message());

    ordered_json doc;
    doc["attributes"] = spec.attributes;
    doc["relations"] = ordered_json::array();
    for (std::size_t i = 0; i < spec.relations.size(); ++i) {
        const std::string file = spec.relations[i].name + ".csv";
        std::ofstream out(std::filesystem::path(out_dir) / file);
        if (!out) throw InputError("cannot write " + file);
        write_csv(out, q.relations[i], q.graph);
        doc["relations"].push_back({{"name", spec.relations[i].name}, {"scheme", spec.relations[i].scheme}, {"csv", file}});
        spdlog::info("{}: {} tuples", file, q.relations[i].size());
    }
    if (spec.parents) {
        ordered_json parents = ordered_json::array();
        for (const auto& p : *spec.parents) {
            if (p) {
                parents.push_back(*p);
            } else {
                parents.push_back(nullptr);
            }
        }
        doc["parents"] = parents;
    }
    write_text((std::filesystem::path(out_dir) / "query.json").string(), doc.dump(2) + "\n");
    return kOk;
}

int cmd_cover(const std::string& query, const std::string& tree_path, const std::string& out) {
    const QuerySpec spec = QuerySpec::load(query);
    const Hypergraph g = spec_graph(spec);
    HyperedgeTree t = pick_tree(g, spec, tree_path);
    auto labels = [&](const std::vector<EdgeId>& ids) {
        ordered_json a = ordered_json::array();
        for (EdgeId e : ids) a.push_back(g.label(e));
        return a;
    };

    ordered_json doc;
    Cec f = edge_cover(t);
    if (!f.contains(t.root())) {
        t = t.rerooted(t.lowest_raw_leaf());
        f = edge_cover(t);
    }
    ordered_json parents = ordered_json::array();
    for (const auto& p : t.parents()) {
        if (p) {
            parents.push_back(g.label(*p));
        } else {
            parents.push_back(nullptr);
        }
    }
    doc["tree"] = {{"root", g.label(t.root())}, {"parents", parents}};
    doc["clean"] = g.is_clean();
    doc["cover"] = labels(f.members());
    if (f.contains(t.root())) {
        ordered_json paths = ordered_json::object();
        for (EdgeId owner : f.members()) paths[g.label(owner)] = labels(signature_path(f, owner).nodes);
        doc["signature_paths"] = paths;
    }
    if (g.is_clean() && g.num_edges() >= 2) {
        const Anchor a = find_anchor(f);
        doc["anchor"] = {{"leaf", g.label(a.leaf)}, {"attribute", g.attribute_name(a.attribute)}};
    }
    write_text(out, doc.dump(2) + "\n");
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    setup_logging();
    CLI::App app{"Simulated MPC evaluation of acyclic join queries"};
    app.require_subcommand(1);

    RunArgs run;
    auto* run_cmd = app.add_subcommand("run", "Evaluate a query on a simulated cluster and print a JSON report");
    run_cmd->add_option("--query", run.query, "Query document (JSON)")->required();
    run_cmd->add_option("--machines,-p", run.machines, "Number of simulated machines")->default_val(1);
    run_cmd->add_option("--seed", run.seed, "Override every generator seed");
    run_cmd->add_flag("--verify", run.verify, "Compare the output with a reference join");
    run_cmd->add_flag("--verify-lemmas", run.verify_lemmas, "Recompute covers at every recursion step");
    run_cmd->add_option("--report", run.report, "Report path (stdout when omitted)");
    run_cmd->add_option("--constants", run.constants, "c_load=..,c_alloc=..,c_cfg=..");
    run_cmd->add_option("--tree", run.tree, "JSON parent array for the join tree");

    std::string gen_query, gen_out;
    std::optional<std::uint64_t> gen_seed;
    auto* gen_cmd = app.add_subcommand("gen", "Write generated relations as CSV plus a query document");
    gen_cmd->add_option("--query", gen_query, "Query document (JSON)")->required();
    gen_cmd->add_option("--out", gen_out, "Output directory")->required();
    gen_cmd->add_option("--seed", gen_seed, "Override every generator seed");

    std::string cover_query, cover_tree, cover_out;
    auto* cover_cmd = app.add_subcommand("cover", "Print the join tree, edge cover and signature paths");
    cover_cmd->add_option("--query", cover_query, "Query document (JSON)")->required();
    cover_cmd->add_option("--tree", cover_tree, "JSON parent array for the join tree");
    cover_cmd->add_option("--out", cover_out, "Output path (stdout when omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kInput;
    }

    try {
        if (*run_cmd) return cmd_run(run);
        if (*gen_cmd) return cmd_gen(gen_query, gen_out, gen_seed);
        return cmd_cover(cover_query, cover_tree, cover_out);
    } catch (const InputError& e) {
        spdlog::error("{}", e.what());
        return kInput;
    } catch (const VerifyMismatch& e) {
        spdlog::error("{}", e.what());
        return kMismatch;
    } catch (const LemmaViolation& e) {
        spdlog::critical("lemma violation: {}", e.what());
        return kInternal;
    } catch (const BudgetExhausted& e) {
        spdlog::critical("machine budget exhausted: {}", e.what());
        return kInternal;
    } catch (const std::exception& e) {
        spdlog::critical("{}", e.what());
        return kInternal;
    }
}
