#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <string>
#include <vector>

#include "errors.hpp"
#include "graph.hpp"

namespace maqaoa {

/// Number of cut edges; always within [0, m].
struct CutValue {
    int value = 0;

    auto operator<=>(const CutValue&) const = default;
};

inline constexpr int kExhaustiveMaxCutLimit = 26;

/// Exact MaxCut by scanning all 2^(n-1) bipartitions in Gray-code order.
/// The last vertex is pinned to one side, which loses nothing by symmetry.
inline CutValue maxcut_bruteforce(const Graph& g, int max_vertices = kExhaustiveMaxCutLimit) {
    const int n = g.num_vertices();
    if (n > max_vertices)
        throw ResourceError("exhaustive MaxCut refused for n=" + std::to_string(n) +
                            " (limit " + std::to_string(max_vertices) +
                            "); supply C_max or use maxcut_exact");
    if (n <= 1)
        return {0};

    std::vector<char> side(static_cast<std::size_t>(n), 0);
    int cut = 0;
    int best = 0;
    const std::uint64_t steps = std::uint64_t{1} << (n - 1);
    for (std::uint64_t k = 1; k < steps; ++k) {
        const int v = std::countr_zero(k);
        int delta = 0;
        for (Vertex u : g.neighbors(v))
            delta += side[u] == side[v] ? 1 : -1;
        side[v] ^= 1;
        cut += delta;
        best = std::max(best, cut);
    }
    return {best};
}

namespace detail {

struct EliminationOrder {
    std::vector<Vertex> order;
    int width = 0; // largest frontier reached while adding a vertex
};

/// Greedy vertex order that keeps the set of "processed vertices with
/// unprocessed neighbours" small.
inline EliminationOrder greedy_order(const Graph& g, Vertex start) {
    const int n = g.num_vertices();
    std::vector<int> remaining(static_cast<std::size_t>(n));
    std::vector<char> done(static_cast<std::size_t>(n), 0);
    std::vector<char> in_frontier(static_cast<std::size_t>(n), 0);
    for (Vertex v = 0; v < n; ++v)
        remaining[v] = g.degree(v);
    int frontier = 0;
    EliminationOrder result;

    auto size_after = [&](Vertex v) {
        int closing = 0;
        for (Vertex u : g.neighbors(v))
            if (done[u] && remaining[u] == 1)
                ++closing;
        return frontier + 1 - closing - (remaining[v] == 0 ? 1 : 0);
    };

    for (int step = 0; step < n; ++step) {
        Vertex pick = start;
        int pick_size = size_after(start);
        int pick_links = 0;
        if (step > 0) {
            pick = -1;
            for (Vertex v = 0; v < n; ++v) {
                if (done[v])
                    continue;
                int links = 0;
                for (Vertex u : g.neighbors(v))
                    links += done[u];
                const int s = size_after(v);
                if (pick == -1 || s < pick_size || (s == pick_size && links > pick_links)) {
                    pick = v;
                    pick_size = s;
                    pick_links = links;
                }
            }
        }
        result.width = std::max(result.width, frontier + 1);
        done[pick] = 1;
        in_frontier[pick] = 1;
        ++frontier;
        for (Vertex u : g.neighbors(pick)) {
            --remaining[u];
            if (done[u] && in_frontier[u] && remaining[u] == 0) {
                in_frontier[u] = 0;
                --frontier;
            }
        }
        if (remaining[pick] == 0) {
            in_frontier[pick] = 0;
            --frontier;
        }
        result.order.push_back(pick);
    }
    return result;
}

} // namespace detail

inline constexpr int kMaxCutFrontierLimit = 25;

/// Exact MaxCut by dynamic programming over a vertex order: the table holds,
/// for every side assignment of the current frontier, the best cut among
/// edges already fully processed. Cost is O(n * 2^w) for frontier width w,
/// which stays small for sparse graphs (random cubic graphs on 100 vertices
/// typically have w below 20).
inline CutValue maxcut_exact(const Graph& g, int max_frontier = kMaxCutFrontierLimit) {
    const int n = g.num_vertices();
    if (n <= 1 || g.num_edges() == 0)
        return {0};

    detail::EliminationOrder plan;
    for (Vertex s = 0; s < n; ++s) {
        auto candidate = detail::greedy_order(g, s);
        if (s == 0 || candidate.width < plan.width)
            plan = std::move(candidate);
    }
    if (plan.width > max_frontier)
        throw ResourceError("MaxCut frontier width " + std::to_string(plan.width) +
                            " exceeds limit " + std::to_string(max_frontier));

    std::vector<int> remaining(static_cast<std::size_t>(n));
    for (Vertex v = 0; v < n; ++v)
        remaining[v] = g.degree(v);
    std::vector<int> position(static_cast<std::size_t>(n), -1);
    std::vector<Vertex> frontier;
    std::vector<int> table{0};
    std::vector<int> next;

    auto drop_position = [&](int k) {
        const std::size_t half = table.size() / 2;
        next.assign(half, 0);
        const std::uint64_t low_mask = (std::uint64_t{1} << k) - 1;
        for (std::uint64_t m = 0; m < half; ++m) {
            const std::uint64_t full = (m & low_mask) | ((m & ~low_mask) << 1);
            next[m] = std::max(table[full], table[full | (std::uint64_t{1} << k)]);
        }
        table.swap(next);
        position[frontier[k]] = -1;
        frontier.erase(frontier.begin() + k);
        for (std::size_t i = 0; i < frontier.size(); ++i)
            position[frontier[i]] = static_cast<int>(i);
    };

    for (Vertex v : plan.order) {
        std::uint64_t nb_mask = 0;
        for (Vertex u : g.neighbors(v))
            if (position[u] >= 0)
                nb_mask |= std::uint64_t{1} << position[u];
        const int nb_count = std::popcount(nb_mask);
        const std::size_t size = table.size();
        next.assign(size * 2, 0);
        for (std::uint64_t m = 0; m < size; ++m) {
            const int c = std::popcount(m & nb_mask);
            next[m] = table[m] + c;
            next[m | size] = table[m] + nb_count - c;
        }
        table.swap(next);
        position[v] = static_cast<int>(frontier.size());
        frontier.push_back(v);

        for (Vertex u : g.neighbors(v))
            --remaining[u];

        for (std::size_t k = frontier.size(); k-- > 0;) {
            const Vertex u = frontier[k];
            if (remaining[u] == 0)
                drop_position(static_cast<int>(k));
        }
    }
    // every vertex has been dropped by now, leaving a single cell
    return {*std::max_element(table.begin(), table.end())};
}

/// C_max by the cheapest exact method available.
inline CutValue maxcut(const Graph& g) {
    if (g.num_vertices() <= 16)
        return maxcut_bruteforce(g);
    return maxcut_exact(g);
}

} // namespace maqaoa
