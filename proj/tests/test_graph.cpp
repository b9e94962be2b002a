#include <gtest/gtest.h>

#include <numeric>

#include <maqaoa/generators.hpp>
#include <maqaoa/graph.hpp>
#include <maqaoa/maxcut.hpp>

#include "oracles.hpp"

using namespace maqaoa;

TEST(EdgeList, ParsesStarOnFiveVertices) {
    const Graph g = parse_edge_list("0 1\n0 2\n0 3\n0 4");
    EXPECT_EQ(g.num_vertices(), 5);
    EXPECT_EQ(g.num_edges(), 4);
    EXPECT_EQ(g, star_graph(5));
}

TEST(EdgeList, SingleEdge) {
    const Graph g = parse_edge_list("0 1");
    EXPECT_EQ(g.num_vertices(), 2);
    EXPECT_EQ(g.num_edges(), 1);
}

TEST(EdgeList, RejectsDuplicateWithLineNumber) {
    try {
        parse_edge_list("0 1\n1 0");
        FAIL() << "duplicate accepted";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
    }
}

TEST(EdgeList, RejectsMalformedLines) {
    EXPECT_THROW(parse_edge_list("0 1\n2 2\n"), ParseError);
    EXPECT_THROW(parse_edge_list("0 1\n2\n"), ParseError);
    EXPECT_THROW(parse_edge_list("0 x\n"), ParseError);
    EXPECT_THROW(parse_edge_list("0 1 2\n"), ParseError);
    EXPECT_THROW(parse_edge_list("-1 2\n"), ParseError);
    try {
        parse_edge_list("# header\n0 1\n\n3 3\n");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 4u);
    }
}

TEST(EdgeList, CommentsAndBlankLinesIgnored) {
    const Graph g = parse_edge_list("# a path\n\n0 1   # first\n  1 2\n");
    EXPECT_EQ(g.num_edges(), 2);
    EXPECT_EQ(g.num_vertices(), 3);
}

TEST(EdgeList, WriterRoundTripsAndKeepsIsolatedVertices) {
    const Graph g(6, {{3, 1}, {0, 2}, {1, 0}});
    const std::string text = write_edge_list(g);
    const Graph back = parse_edge_list(text);
    EXPECT_EQ(back, g);
    EXPECT_EQ(back.num_vertices(), 6);
    EXPECT_EQ(write_edge_list(back), text);
}

TEST(Graph, EdgesSortedAndIndexed) {
    const Graph g(4, {{2, 3}, {1, 0}, {0, 2}});
    ASSERT_EQ(g.num_edges(), 3);
    EXPECT_EQ(g.edge(0), (Edge{0, 1}));
    EXPECT_EQ(g.edge(1), (Edge{0, 2}));
    EXPECT_EQ(g.edge(2), (Edge{2, 3}));
    EXPECT_EQ(g.edge_index(3, 2), 2);
    EXPECT_FALSE(g.edge_index(1, 3).has_value());
}

TEST(Graph, AdjacencyConsistentWithEdges) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng = make_rng(seed);
        const Graph g = random_gnp(15, 0.3, rng);
        int degree_sum = 0;
        for (Vertex v = 0; v < g.num_vertices(); ++v) {
            degree_sum += g.degree(v);
            const auto nb = g.neighbors(v);
            const auto inc = g.incident_edges(v);
            ASSERT_EQ(nb.size(), inc.size());
            ASSERT_TRUE(std::is_sorted(nb.begin(), nb.end()));
            for (std::size_t i = 0; i < nb.size(); ++i) {
                const Edge e = g.edge(inc[i]);
                EXPECT_TRUE((e.u == v && e.v == nb[i]) || (e.v == v && e.u == nb[i]));
            }
        }
        EXPECT_EQ(degree_sum, 2 * g.num_edges());
    }
}

TEST(Graph, RejectsSelfLoopsDuplicatesAndRange) {
    EXPECT_THROW(Graph(3, {{1, 1}}), DomainError);
    EXPECT_THROW(Graph(3, {{0, 1}, {1, 0}}), DomainError);
    EXPECT_THROW(Graph(3, {{0, 3}}), DomainError);
}

TEST(StarGraph, CentreIsVertexZero) {
    const Graph s = star_graph(5);
    EXPECT_EQ(s.num_edges(), 4);
    EXPECT_EQ(s.degree(0), 4);
    for (const auto& e : s.edges())
        EXPECT_EQ(e.u, 0);
    EXPECT_EQ(star_graph(2), parse_edge_list("0 1"));
    const Graph big = star_graph(100);
    EXPECT_EQ(big.num_edges(), 99);
    EXPECT_EQ(big.max_degree(), 99);
    EXPECT_THROW(star_graph(1), DomainError);
}

TEST(Triangles, SmallGraphs) {
    const Graph k3 = complete_graph(3);
    for (const auto& e : k3.edges())
        EXPECT_EQ(triangles_through_edge(k3, e), 1);
    const Graph k4 = complete_graph(4);
    for (const auto& e : k4.edges())
        EXPECT_EQ(triangles_through_edge(k4, e), 2);
    EXPECT_EQ(triangle_count(k4), 4);
    EXPECT_EQ(triangle_count(star_graph(5)), 0);
    EXPECT_THROW(triangles_through_edge(star_graph(5), Edge{1, 2}), DomainError);
}

TEST(Triangles, MatchTripleScanOracle) {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        Rng rng = make_rng(seed);
        const Graph g = random_gnp(12, 0.4, rng);
        EXPECT_EQ(triangle_count(g), oracle::triangles(g));
        long long through = 0;
        for (const auto& e : g.edges())
            through += triangles_through_edge(g, e);
        EXPECT_EQ(through, 3 * oracle::triangles(g));
        EXPECT_EQ(is_triangle_free(g), oracle::triangles(g) == 0);
    }
}

TEST(Structure, ConnectivityAndBipartiteness) {
    EXPECT_TRUE(is_connected(cycle_graph(5)));
    EXPECT_FALSE(is_bipartite(cycle_graph(5)));
    EXPECT_TRUE(is_bipartite(cycle_graph(6)));
    EXPECT_EQ(component_count(Graph(5, {{0, 1}, {2, 3}})), 3);
}

TEST(RegularGenerator, CubicFiftyAndHundred) {
    for (int n : {50, 100}) {
        const Graph g = random_regular_triangle_free(n, 3, 11);
        EXPECT_EQ(g.num_edges(), 3 * n / 2);
        for (Vertex v = 0; v < n; ++v)
            EXPECT_EQ(g.degree(v), 3);
        EXPECT_EQ(triangle_count(g), 0);
        EXPECT_TRUE(is_connected(g));
    }
}

TEST(RegularGenerator, DeterministicInSeed) {
    EXPECT_EQ(write_edge_list(random_regular_triangle_free(30, 3, 5)),
              write_edge_list(random_regular_triangle_free(30, 3, 5)));
    EXPECT_NE(random_regular_triangle_free(30, 3, 5), random_regular_triangle_free(30, 3, 6));
}

TEST(RegularGenerator, Errors) {
    // K4 is the only cubic graph on four vertices and it has triangles
    RegularGeneratorOptions quick;
    quick.max_attempts = 200;
    EXPECT_THROW(random_regular_triangle_free(4, 3, 1, quick), GenerationError);
    EXPECT_THROW(random_regular_triangle_free(5, 3, 1), DomainError);
    EXPECT_THROW(random_regular_triangle_free(3, 3, 1), DomainError);
}

TEST(StrippedGenerator, TriangleFreeAndDeterministic) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Graph g = random_gnp_triangle_stripped(50, 0.08, seed);
        EXPECT_EQ(oracle::triangles(g), 0);
        EXPECT_EQ(g, random_gnp_triangle_stripped(50, 0.08, seed));
    }
    EXPECT_THROW(random_gnp_triangle_stripped(10, 0.0, 1), DomainError);
    EXPECT_THROW(random_gnp_triangle_stripped(10, 1.0, 1), DomainError);
}

TEST(StrippedGenerator, ForcedTriangleLosesOneEdge) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Graph g = random_gnp_triangle_stripped(3, 0.999999, seed);
        EXPECT_LE(g.num_edges(), 2);
        EXPECT_TRUE(is_triangle_free(g));
    }
}

TEST(StrippedGenerator, EnsembleMeanEdgeCounts) {
    // expected m before stripping: C(50,2) 0.08 = 98; stripping removes about
    // one edge per triangle (expected C(50,3) 0.08^3 = 10.0 triangles)
    double m50 = 0;
    for (std::uint64_t s = 0; s < 200; ++s)
        m50 += random_gnp_triangle_stripped(50, 0.08, s).num_edges();
    m50 /= 200;
    EXPECT_NEAR(m50, 87.2, 2.0);
    double m100 = 0;
    for (std::uint64_t s = 0; s < 100; ++s)
        m100 += random_gnp_triangle_stripped(100, 0.035, s).num_edges();
    m100 /= 100;
    EXPECT_NEAR(m100, 167.34, 4.0);
}

TEST(ConnectedGenerator, AlwaysConnected) {
    for (std::uint64_t s = 0; s < 50; ++s)
        EXPECT_TRUE(is_connected(random_gnp_connected(8, 0.5, s)));
}

TEST(Metadata, Fields) {
    const auto j = graph_metadata(star_graph(4), 7, "star");
    EXPECT_EQ(j["n"], 4);
    EXPECT_EQ(j["m"], 3);
    EXPECT_EQ(j["degrees"], nlohmann::json({3, 1, 1, 1}));
    EXPECT_EQ(j["triangle_count"], 0);
    EXPECT_EQ(j["seed"], 7);
    EXPECT_EQ(j["generator"], "star");
    EXPECT_TRUE(graph_metadata(star_graph(4), std::nullopt, "x")["seed"].is_null());
}

// ---------------------------------------------------------------------------
// MaxCut
// ---------------------------------------------------------------------------

TEST(MaxCut, SmallExamples) {
    EXPECT_EQ(maxcut_bruteforce(star_graph(5)).value, 4);
    EXPECT_EQ(maxcut_bruteforce(complete_graph(2)).value, 1);
    EXPECT_EQ(maxcut_bruteforce(cycle_graph(5)).value, oracle::maxcut(cycle_graph(5)));
    EXPECT_EQ(maxcut_bruteforce(cycle_graph(5)).value, 4);
    EXPECT_EQ(maxcut_bruteforce(complete_graph(6)).value, 9);
    EXPECT_EQ(maxcut_bruteforce(Graph(3, {})).value, 0);
}

TEST(MaxCut, BipartiteGraphsCutEveryEdge) {
    for (int n : {2, 5, 9, 17})
        EXPECT_EQ(maxcut(star_graph(n)).value, n - 1);
    for (int n : {4, 10, 30, 60})
        EXPECT_EQ(maxcut(cycle_graph(n)).value, n);
    for (int n : {3, 20, 40})
        EXPECT_EQ(maxcut(path_graph(n)).value, n - 1);
    // random trees
    for (std::uint64_t s = 0; s < 20; ++s) {
        Rng rng = make_rng(s);
        std::vector<Edge> e;
        const int n = 40;
        for (int v = 1; v < n; ++v)
            e.push_back({static_cast<Vertex>(uniform_index(rng, static_cast<std::uint64_t>(v))), v});
        const Graph t(n, e);
        EXPECT_EQ(maxcut(t).value, t.num_edges());
    }
}

TEST(MaxCut, BruteForceMatchesEnumerationOracle) {
    for (std::uint64_t s = 0; s < 60; ++s) {
        Rng rng = make_rng(s);
        const int n = 2 + static_cast<int>(uniform_index(rng, 11));
        const Graph g = random_gnp(n, uniform_real(rng, 0.1, 0.9), rng);
        EXPECT_EQ(maxcut_bruteforce(g).value, oracle::maxcut(g)) << write_edge_list(g);
    }
}

TEST(MaxCut, FrontierSolverMatchesBruteForce) {
    for (std::uint64_t s = 0; s < 80; ++s) {
        Rng rng = make_rng(1000 + s);
        const int n = 8 + static_cast<int>(uniform_index(rng, 13));
        const Graph g = random_gnp(n, uniform_real(rng, 0.1, 0.6), rng);
        EXPECT_EQ(maxcut_exact(g).value, maxcut_bruteforce(g).value) << write_edge_list(g);
    }
}

TEST(MaxCut, LargeSparseGraphsBoundedAndConsistent) {
    for (std::uint64_t s = 0; s < 5; ++s) {
        const Graph g = random_regular_triangle_free(100, 3, s);
        const int c = maxcut(g).value;
        EXPECT_LE(c, g.num_edges());
        EXPECT_GE(c, (g.num_edges() + 1) / 2);
    }
}

TEST(MaxCut, LimitsEnforced) {
    EXPECT_THROW(maxcut_bruteforce(path_graph(27)), ResourceError);
    EXPECT_THROW(maxcut_exact(complete_graph(40)), ResourceError);
}
