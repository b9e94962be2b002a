#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "errors.hpp"
#include "graph.hpp"
#include "random.hpp"

namespace maqaoa {

struct RegularGeneratorOptions {
    int max_attempts = 10'000;
    bool require_connected = true;
};

/// Uniform-ish random d-regular graph with no triangles, by the pairing
/// (configuration) model: n*d half-edges are shuffled and paired, and the
/// whole pairing is redrawn whenever it yields a loop, a multi-edge, a
/// triangle or (optionally) a disconnected graph.
inline Graph random_regular_triangle_free(int n, int degree, std::uint64_t seed,
                                          RegularGeneratorOptions opts = {}) {
    if (n < 1 || degree < 0)
        throw DomainError("regular graph needs n >= 1 and degree >= 0");
    if ((static_cast<long long>(n) * degree) % 2 != 0)
        throw DomainError("n * degree must be even");
    if (n < degree + 1)
        throw DomainError("regular graph needs n >= degree + 1");

    Rng rng = make_rng(seed);
    std::vector<Vertex> points;
    points.reserve(static_cast<std::size_t>(n) * degree);
    std::vector<Edge> edges;
    edges.reserve(points.capacity() / 2);

    for (int attempt = 0; attempt < opts.max_attempts; ++attempt) {
        points.clear();
        for (Vertex v = 0; v < n; ++v)
            for (int k = 0; k < degree; ++k)
                points.push_back(v);
        shuffle(points, rng);

        edges.clear();
        bool simple = true;
        for (std::size_t i = 0; i + 1 < points.size(); i += 2) {
            if (points[i] == points[i + 1]) {
                simple = false;
                break;
            }
            edges.push_back({std::min(points[i], points[i + 1]), std::max(points[i], points[i + 1])});
        }
        if (!simple)
            continue;
        std::sort(edges.begin(), edges.end());
        if (std::adjacent_find(edges.begin(), edges.end()) != edges.end())
            continue;

        Graph g(n, edges);
        if (!is_triangle_free(g))
            continue;
        if (opts.require_connected && !is_connected(g))
            continue;
        return g;
    }
    throw GenerationError("no triangle-free " + std::to_string(degree) + "-regular graph on " +
                          std::to_string(n) + " vertices after " +
                          std::to_string(opts.max_attempts) + " attempts");
}

/// Plain G(n, p): each of the n(n-1)/2 pairs, in lexicographic order, is an
/// edge with probability p.
inline Graph random_gnp(int n, double p_edge, Rng& rng) {
    if (n < 1)
        throw DomainError("G(n,p) needs n >= 1");
    if (!(p_edge >= 0.0 && p_edge <= 1.0))
        throw DomainError("edge probability must lie in [0, 1]");
    std::vector<Edge> edges;
    for (Vertex a = 0; a < n; ++a)
        for (Vertex b = a + 1; b < n; ++b)
            if (bernoulli(rng, p_edge))
                edges.push_back({a, b});
    return Graph(n, std::move(edges));
}

/// G(n, p) made triangle-free: while a triangle remains, take the
/// lexicographically first one and delete one of its three edges uniformly
/// at random. The result need not be connected.
inline Graph random_gnp_triangle_stripped(int n, double p_edge, std::uint64_t seed) {
    if (!(p_edge > 0.0 && p_edge < 1.0))
        throw DomainError("edge probability must lie in (0, 1)");
    Rng rng = make_rng(seed);
    Graph start = random_gnp(n, p_edge, rng);

    const auto un = static_cast<std::size_t>(n);
    std::vector<std::vector<char>> adj(un, std::vector<char>(un, 0));
    for (const auto& e : start.edges())
        adj[e.u][e.v] = adj[e.v][e.u] = 1;

    // Deleting edges never creates a triangle, so the scan can resume where
    // the previous triangle was found.
    for (Vertex a = 0; a < n; ++a) {
        for (Vertex b = a + 1; b < n; ++b) {
            if (!adj[a][b])
                continue;
            for (Vertex c = b + 1; c < n && adj[a][b]; ++c) {
                if (!adj[a][c] || !adj[b][c])
                    continue;
                const Edge tri[3] = {{a, b}, {a, c}, {b, c}};
                const Edge& drop = tri[uniform_index(rng, 3)];
                adj[drop.u][drop.v] = adj[drop.v][drop.u] = 0;
            }
        }
    }

    std::vector<Edge> edges;
    for (Vertex a = 0; a < n; ++a)
        for (Vertex b = a + 1; b < n; ++b)
            if (adj[a][b])
                edges.push_back({a, b});
    return Graph(n, std::move(edges));
}

/// G(n, p) conditioned on connectivity by rejection.
inline Graph random_gnp_connected(int n, double p_edge, std::uint64_t seed,
                                  int max_attempts = 100'000) {
    Rng rng = make_rng(seed);
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        Graph g = random_gnp(n, p_edge, rng);
        if (is_connected(g))
            return g;
    }
    throw GenerationError("no connected G(" + std::to_string(n) + "," + std::to_string(p_edge) +
                          ") sample after " + std::to_string(max_attempts) + " attempts");
}

} // namespace maqaoa
