#include <random>

#include <gtest/gtest.h>

#include "acyclic_mpc/hypergraph.hpp"
#include "acyclic_mpc/oracle.hpp"
#include "fixtures.hpp"

namespace {

using namespace acyclic_mpc;
using fixtures::id;

Hypergraph graph_of(const std::vector<std::string>& edges, std::size_t attrs) {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < attrs; ++i) names.emplace_back(1, static_cast<char>('A' + i));
    std::vector<AttrSet> sets;
    for (const std::string& e : edges) {
        AttrSet s;
        for (char c : e) s.insert(static_cast<AttrId>(c - 'A'));
        sets.push_back(s);
    }
    return Hypergraph(names, sets);
}

TEST(Hypergraph, RejectsUndeclaredAttribute) {
    EXPECT_THROW(Hypergraph({"A"}, {AttrSet{0, 1}}), std::invalid_argument);
    EXPECT_THROW(Hypergraph({"A"}, {}), std::invalid_argument);
}

TEST(Hypergraph, FormatAndParseRoundTrip) {
    const Hypergraph g = fixtures::running_graph();
    EXPECT_EQ(g.format(g.edge(id(g, "CEJ"))), "CEJ");
    EXPECT_EQ(g.parse_attrs("JEC"), g.edge(id(g, "CEJ")));
    EXPECT_THROW(g.parse_attrs("Z"), std::invalid_argument);
}

TEST(JoinTree, RunningExampleHasTree) {
    const auto t = build_join_tree(fixtures::running_graph());
    ASSERT_TRUE(t.has_value());
    EXPECT_TRUE(validate_tree(*t));
    EXPECT_TRUE(t->is_raw_leaf(t->root()));
    EXPECT_EQ(t->root(), t->lowest_raw_leaf());
}

TEST(JoinTree, TextbookTreeIsValid) { EXPECT_TRUE(validate_tree(fixtures::running_tree())); }

TEST(JoinTree, TriangleIsCyclic) {
    EXPECT_FALSE(build_join_tree(graph_of({"AB", "BC", "CA"}, 3)).has_value());
}

TEST(JoinTree, DisconnectedAttributeRejected) {
    const Hypergraph g = graph_of({"AB", "CD", "BE"}, 5);
    const HyperedgeTree t(g, {EdgeId{1}, EdgeId{2}, std::nullopt});
    EXPECT_FALSE(validate_tree(t));
}

TEST(JoinTree, ParentArrayMustBeATree) {
    const Hypergraph g = graph_of({"AB", "BC"}, 3);
    EXPECT_THROW(HyperedgeTree(g, {EdgeId{1}, EdgeId{0}}), std::invalid_argument);
    EXPECT_THROW(HyperedgeTree(g, {std::nullopt, std::nullopt}), std::invalid_argument);
}

TEST(JoinTree, AgreesWithExhaustiveAcyclicity) {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> edges(1, 6), attrs(1, 6), coin(0, 2);
    for (int trial = 0; trial < 400; ++trial) {
        const std::size_t n = edges(rng);
        const std::size_t a = attrs(rng);
        std::vector<std::string> names;
        for (std::size_t i = 0; i < a; ++i) names.emplace_back(1, static_cast<char>('A' + i));
        std::vector<AttrSet> sets;
        for (std::size_t e = 0; e < n; ++e) {
            AttrSet s;
            for (std::size_t i = 0; i < a; ++i) {
                if (coin(rng) == 0) s.insert(static_cast<AttrId>(i));
            }
            if (s.empty()) s.insert(static_cast<AttrId>(e % a));
            sets.push_back(s);
        }
        const Hypergraph g(names, sets);
        const auto t = build_join_tree(g);
        EXPECT_EQ(t.has_value(), oracle::is_acyclic(g)) << trial;
        if (t) EXPECT_TRUE(validate_tree(*t));
    }
}

TEST(JoinTree, RerootKeepsConnectedness) {
    const HyperedgeTree t = fixtures::running_tree();
    for (EdgeId e = 0; e < t.size(); ++e) {
        const HyperedgeTree r = t.rerooted(e);
        EXPECT_EQ(r.root(), e);
        EXPECT_TRUE(validate_tree(r));
    }
}

TEST(Summit, RunningExample) {
    const HyperedgeTree t = fixtures::running_tree();
    const Hypergraph& g = t.graph();
    EXPECT_EQ(summit(t, *g.find_attribute("C")), id(g, "CEJ"));
    EXPECT_EQ(summit(t, *g.find_attribute("E")), id(g, "EHJ"));
    EXPECT_EQ(disappearing_attrs(t, id(g, "EHJ")), g.parse_attrs("EJ"));
    EXPECT_EQ(disappearing_attrs(t, id(g, "CEJ")), g.parse_attrs("C"));
}

TEST(Cleanse, RemovesNestedNeighboursInScanOrder) {
    const HyperedgeTree t = fixtures::running_tree();
    const Hypergraph& g = t.graph();
    const HyperedgeTree without_c(g.without_attribute(*g.find_attribute("C")), t.parents());
    const Hypergraph& h = without_c.graph();
    EXPECT_TRUE(h.is_subsumed(id(g, "CEJ")));
    EXPECT_TRUE(h.is_subsumed(id(g, "CEF")));
    EXPECT_FALSE(h.is_clean());

    const CleansedTree c = cleanse_links(without_c);
    ASSERT_EQ(c.removals.size(), 2u);
    EXPECT_EQ(c.removals[0].small, id(g, "CEJ"));
    EXPECT_EQ(c.removals[0].big, id(g, "EHJ"));
    EXPECT_TRUE(c.removals[0].big_was_parent);
    EXPECT_EQ(c.removals[1].small, id(g, "CEF"));
    EXPECT_EQ(c.removals[1].big, id(g, "EFG"));
    EXPECT_FALSE(c.removals[1].big_was_parent);
    EXPECT_TRUE(c.tree.graph().is_clean());
    EXPECT_TRUE(validate_tree(c.tree));
    EXPECT_EQ(c.tree.size(), 11u);
}

}  // namespace
