#include <benchmark/benchmark.h>

#include "acyclic_mpc/cec.hpp"
#include "acyclic_mpc/engine.hpp"
#include "acyclic_mpc/oracle.hpp"
#include "acyclic_mpc/simcluster.hpp"
#include "acyclic_mpc/workload.hpp"

namespace {

using namespace acyclic_mpc;

struct Loaded {
    Instance q;
    HyperedgeTree t;
};

const Loaded& running() {
    static const Loaded l = [] {
        const QuerySpec spec = QuerySpec::load(ACYCLIC_MPC_QUERY_DIR "/running.json");
        Instance q = materialize(spec);
        HyperedgeTree t(q.graph, *spec.parents);
        return Loaded{std::move(q), std::move(t)};
    }();
    return l;
}

void BM_JoinTree(benchmark::State& state) {
    const Hypergraph& g = running().q.graph;
    for (auto _ : state) benchmark::DoNotOptimize(build_join_tree(g));
}
BENCHMARK(BM_JoinTree);

void BM_EdgeCover(benchmark::State& state) {
    const HyperedgeTree& t = running().t;
    for (auto _ : state) benchmark::DoNotOptimize(edge_cover(t));
}
BENCHMARK(BM_EdgeCover);

void BM_Decompose(benchmark::State& state) {
    const Cec f = edge_cover(running().t);
    const Anchor a = find_anchor(f);
    for (auto _ : state) benchmark::DoNotOptimize(decompose(f, a));
}
BENCHMARK(BM_Decompose);

void BM_Simplify(benchmark::State& state) {
    const Cec f = edge_cover(running().t);
    const Anchor a = find_anchor(f);
    for (auto _ : state) benchmark::DoNotOptimize(cleanse(remove_attribute(f, a)));
}
BENCHMARK(BM_Simplify);

void BM_Engine(benchmark::State& state) {
    const Loaded& l = running();
    const auto p = static_cast<std::size_t>(state.range(0));
    double ratio = 0;
    for (auto _ : state) {
        const EngineResult r = run_engine(l.q, l.t, p);
        ratio = r.ratio();
        benchmark::DoNotOptimize(r.output.size());
    }
    state.counters["ratio"] = ratio;
}
BENCHMARK(BM_Engine)->Arg(1)->Arg(4)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_Yannakakis(benchmark::State& state) {
    const Loaded& l = running();
    for (auto _ : state) benchmark::DoNotOptimize(oracle::yannakakis(l.q, l.t).size());
}
BENCHMARK(BM_Yannakakis)->Unit(benchmark::kMillisecond);

Relation wide(std::size_t n) {
    Relation r(AttrSet{0, 1, 2});
    for (Value i = 0; i < n; ++i) r.push_back(std::vector<Value>{i % 97, i, i * 7});
    return r;
}

void BM_Scatter(benchmark::State& state) {
    const auto p = static_cast<std::size_t>(state.range(0));
    const std::vector<DistRelation> in = {place_round_robin(wide(100000), p)};
    const MachineBlock all = MachineBlock::contiguous(0, p);
    for (auto _ : state) {
        SimCluster c(p, 4);
        benchmark::DoNotOptimize(scatter_balanced(c, 0, all, in, all));
    }
}
BENCHMARK(BM_Scatter)->Arg(4)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_SemiJoin(benchmark::State& state) {
    const auto p = static_cast<std::size_t>(state.range(0));
    const Relation big = wide(100000);
    Relation small(AttrSet{0});
    for (Value v = 0; v < 97; v += 2) small.push_back(std::vector<Value>{v});
    const DistRelation dbig = place_round_robin(big, p);
    const DistRelation dsmall = place_round_robin(small, p);
    const MachineBlock all = MachineBlock::contiguous(0, p);
    for (auto _ : state) {
        SimCluster c(p, 4);
        benchmark::DoNotOptimize(semi_join(c, 0, all, dbig, dsmall).size());
    }
}
BENCHMARK(BM_SemiJoin)->Arg(4)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
