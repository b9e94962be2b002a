#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <compare>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "errors.hpp"

namespace maqaoa {

using Vertex = int;

/// Undirected edge stored with u < v.
struct Edge {
    Vertex u = 0;
    Vertex v = 0;

    auto operator<=>(const Edge&) const = default;
};

/// Immutable simple undirected graph.
///
/// Edges are kept sorted lexicographically; the position of an edge in
/// edges() is its stable index and doubles as the index of its cost angle.
class Graph {
  public:
    Graph() = default;

    /// Throws DomainError on self-loops, duplicate edges or labels outside [0, n).
    Graph(int n, std::vector<Edge> edges) : m_n(n), m_edges(std::move(edges)) {
        if (n < 0)
            throw DomainError("negative vertex count");
        for (auto& e : m_edges) {
            if (e.u == e.v)
                throw DomainError("self-loop at vertex " + std::to_string(e.u));
            if (e.u > e.v)
                std::swap(e.u, e.v);
            if (e.u < 0 || e.v >= n)
                throw DomainError("edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                                  ") outside vertex range");
        }
        std::sort(m_edges.begin(), m_edges.end());
        auto dup = std::adjacent_find(m_edges.begin(), m_edges.end());
        if (dup != m_edges.end())
            throw DomainError("duplicate edge (" + std::to_string(dup->u) + "," +
                              std::to_string(dup->v) + ")");
        build_adjacency();
    }

    int num_vertices() const noexcept { return m_n; }
    int num_edges() const noexcept { return static_cast<int>(m_edges.size()); }

    std::span<const Edge> edges() const noexcept { return m_edges; }
    const Edge& edge(int index) const { return m_edges.at(static_cast<std::size_t>(index)); }

    /// Sorted neighbours of v.
    std::span<const Vertex> neighbors(Vertex v) const {
        return {m_adj.data() + m_offsets[v], m_adj.data() + m_offsets[v + 1]};
    }

    /// Indices of edges incident to v, aligned with neighbors(v).
    std::span<const int> incident_edges(Vertex v) const {
        return {m_inc.data() + m_offsets[v], m_inc.data() + m_offsets[v + 1]};
    }

    int degree(Vertex v) const { return m_offsets[v + 1] - m_offsets[v]; }

    std::vector<int> degrees() const {
        std::vector<int> d(static_cast<std::size_t>(m_n));
        for (Vertex v = 0; v < m_n; ++v)
            d[v] = degree(v);
        return d;
    }

    int max_degree() const {
        int best = 0;
        for (Vertex v = 0; v < m_n; ++v)
            best = std::max(best, degree(v));
        return best;
    }

    std::optional<int> edge_index(Vertex u, Vertex v) const {
        if (u > v)
            std::swap(u, v);
        auto it = std::lower_bound(m_edges.begin(), m_edges.end(), Edge{u, v});
        if (it == m_edges.end() || *it != Edge{u, v})
            return std::nullopt;
        return static_cast<int>(it - m_edges.begin());
    }

    bool has_edge(Vertex u, Vertex v) const { return edge_index(u, v).has_value(); }

    bool operator==(const Graph& other) const {
        return m_n == other.m_n && m_edges == other.m_edges;
    }

  private:
    void build_adjacency() {
        m_offsets.assign(static_cast<std::size_t>(m_n) + 1, 0);
        for (const auto& e : m_edges) {
            ++m_offsets[e.u + 1];
            ++m_offsets[e.v + 1];
        }
        std::partial_sum(m_offsets.begin(), m_offsets.end(), m_offsets.begin());
        m_adj.resize(m_edges.size() * 2);
        m_inc.resize(m_edges.size() * 2);
        std::vector<int> fill(m_offsets.begin(), m_offsets.end() - 1);
        for (int i = 0; i < num_edges(); ++i) {
            const auto& e = m_edges[i];
            m_adj[fill[e.u]] = e.v;
            m_inc[fill[e.u]++] = i;
            m_adj[fill[e.v]] = e.u;
            m_inc[fill[e.v]++] = i;
        }
        for (Vertex v = 0; v < m_n; ++v) {
            const int lo = m_offsets[v], hi = m_offsets[v + 1];
            std::vector<std::pair<Vertex, int>> tmp;
            tmp.reserve(static_cast<std::size_t>(hi - lo));
            for (int k = lo; k < hi; ++k)
                tmp.emplace_back(m_adj[k], m_inc[k]);
            std::sort(tmp.begin(), tmp.end());
            for (int k = lo; k < hi; ++k) {
                m_adj[k] = tmp[k - lo].first;
                m_inc[k] = tmp[k - lo].second;
            }
        }
    }

    int m_n = 0;
    std::vector<Edge> m_edges;
    std::vector<int> m_offsets{0};
    std::vector<Vertex> m_adj;
    std::vector<int> m_inc;
};

// ---------------------------------------------------------------------------
// Edge-list text format
//
// One "u v" pair per line; '#' starts a comment. A comment of the form
// "# n=<count>" before the first edge fixes the vertex count (the canonical
// writer emits one so that trailing isolated vertices survive a round trip);
// otherwise n = largest label + 1.
// ---------------------------------------------------------------------------

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos)
        return {};
    return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

inline std::optional<long long> parse_int(std::string_view tok) {
    long long value = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc{} || ptr != tok.data() + tok.size())
        return std::nullopt;
    return value;
}

} // namespace detail

inline Graph parse_edge_list(std::string_view text) {
    std::vector<Edge> edges;
    std::optional<long long> declared_n;
    long long max_label = -1;
    std::size_t line_no = 0;
    std::vector<std::size_t> edge_line;

    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos)
            nl = text.size();
        auto line = text.substr(pos, nl - pos);
        pos = nl + 1;
        ++line_no;

        auto hash = line.find('#');
        if (hash != std::string_view::npos) {
            auto comment = detail::trim(line.substr(hash + 1));
            if (edges.empty() && comment.starts_with("n=")) {
                auto rest = comment.substr(2);
                rest = rest.substr(0, rest.find_first_of(" \t"));
                auto n = detail::parse_int(rest);
                if (!n || *n < 0)
                    throw ParseError(line_no, "bad vertex-count directive");
                declared_n = n;
            }
            line = line.substr(0, hash);
        }
        line = detail::trim(line);
        if (line.empty())
            continue;

        std::vector<std::string_view> tokens;
        std::size_t i = 0;
        while (i < line.size()) {
            auto b = line.find_first_not_of(" \t,", i);
            if (b == std::string_view::npos)
                break;
            auto e = line.find_first_of(" \t,", b);
            if (e == std::string_view::npos)
                e = line.size();
            tokens.push_back(line.substr(b, e - b));
            i = e;
        }
        if (tokens.size() != 2)
            throw ParseError(line_no, "expected two vertex labels, got '" + std::string(line) + "'");
        auto a = detail::parse_int(tokens[0]);
        auto b = detail::parse_int(tokens[1]);
        if (!a || !b || *a < 0 || *b < 0)
            throw ParseError(line_no, "vertex labels must be nonnegative integers");
        if (*a == *b)
            throw ParseError(line_no, "self-loop at vertex " + std::to_string(*a));
        if (std::max(*a, *b) > (1LL << 30))
            throw ParseError(line_no, "vertex label too large");
        Edge e{static_cast<Vertex>(std::min(*a, *b)), static_cast<Vertex>(std::max(*a, *b))};
        edges.push_back(e);
        edge_line.push_back(line_no);
        max_label = std::max({max_label, *a, *b});
    }

    // duplicate detection with the offending line
    std::vector<std::size_t> order(edges.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return edges[x] < edges[y]; });
    for (std::size_t k = 1; k < order.size(); ++k) {
        if (edges[order[k]] == edges[order[k - 1]]) {
            const auto& e = edges[order[k]];
            throw ParseError(edge_line[order[k]], "duplicate edge (" + std::to_string(e.u) + "," +
                                                      std::to_string(e.v) + ")");
        }
    }

    long long n = max_label + 1;
    if (declared_n) {
        if (*declared_n < n)
            throw ParseError(0, "declared n=" + std::to_string(*declared_n) +
                                    " is smaller than the largest label + 1");
        n = *declared_n;
    }
    return Graph(static_cast<int>(n), std::move(edges));
}

/// Canonical form: vertex-count directive, then sorted edges, one per line.
inline std::string write_edge_list(const Graph& g) {
    std::ostringstream out;
    out << "# n=" << g.num_vertices() << " m=" << g.num_edges() << '\n';
    for (const auto& e : g.edges())
        out << e.u << ' ' << e.v << '\n';
    return out.str();
}

// ---------------------------------------------------------------------------
// Named families
// ---------------------------------------------------------------------------

/// Star on n vertices; vertex 0 is the centre.
inline Graph star_graph(int n) {
    if (n < 2)
        throw DomainError("star graph needs n >= 2");
    std::vector<Edge> edges;
    for (Vertex k = 1; k < n; ++k)
        edges.push_back({0, k});
    return Graph(n, std::move(edges));
}

inline Graph cycle_graph(int n) {
    if (n < 3)
        throw DomainError("cycle needs n >= 3");
    std::vector<Edge> edges;
    for (Vertex k = 0; k < n; ++k)
        edges.push_back({k, (k + 1) % n});
    return Graph(n, std::move(edges));
}

inline Graph path_graph(int n) {
    if (n < 1)
        throw DomainError("path needs n >= 1");
    std::vector<Edge> edges;
    for (Vertex k = 0; k + 1 < n; ++k)
        edges.push_back({k, k + 1});
    return Graph(n, std::move(edges));
}

inline Graph complete_graph(int n) {
    if (n < 1)
        throw DomainError("complete graph needs n >= 1");
    std::vector<Edge> edges;
    for (Vertex a = 0; a < n; ++a)
        for (Vertex b = a + 1; b < n; ++b)
            edges.push_back({a, b});
    return Graph(n, std::move(edges));
}

// ---------------------------------------------------------------------------
// Structure queries
// ---------------------------------------------------------------------------

inline int common_neighbor_count(const Graph& g, Vertex u, Vertex v) {
    auto a = g.neighbors(u);
    auto b = g.neighbors(v);
    int count = 0;
    auto i = a.begin();
    auto j = b.begin();
    while (i != a.end() && j != b.end()) {
        if (*i < *j)
            ++i;
        else if (*j < *i)
            ++j;
        else {
            ++count;
            ++i;
            ++j;
        }
    }
    return count;
}

inline int triangles_through_edge(const Graph& g, Edge e) {
    if (!g.has_edge(e.u, e.v))
        throw DomainError("(" + std::to_string(e.u) + "," + std::to_string(e.v) +
                          ") is not an edge");
    return common_neighbor_count(g, e.u, e.v);
}

inline long long triangle_count(const Graph& g) {
    long long total = 0;
    for (const auto& e : g.edges())
        total += common_neighbor_count(g, e.u, e.v);
    return total / 3;
}

inline bool is_triangle_free(const Graph& g) {
    for (const auto& e : g.edges())
        if (common_neighbor_count(g, e.u, e.v) > 0)
            return false;
    return true;
}

/// Lexicographically first triangle (a < b < c), if any.
inline std::optional<std::array<Vertex, 3>> first_triangle(const Graph& g) {
    for (const auto& e : g.edges()) {
        auto a = g.neighbors(e.u);
        auto b = g.neighbors(e.v);
        for (Vertex w : a) {
            if (w <= e.v)
                continue;
            if (std::binary_search(b.begin(), b.end(), w))
                return std::array<Vertex, 3>{e.u, e.v, w};
        }
    }
    return std::nullopt;
}

inline int component_count(const Graph& g) {
    std::vector<int> parent(static_cast<std::size_t>(g.num_vertices()));
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x)
            x = parent[x] = parent[parent[x]];
        return x;
    };
    int components = g.num_vertices();
    for (const auto& e : g.edges()) {
        int a = find(e.u), b = find(e.v);
        if (a != b) {
            parent[a] = b;
            --components;
        }
    }
    return components;
}

inline bool is_connected(const Graph& g) { return component_count(g) <= 1; }

inline bool is_bipartite(const Graph& g) {
    std::vector<int> side(static_cast<std::size_t>(g.num_vertices()), -1);
    std::vector<Vertex> stack;
    for (Vertex s = 0; s < g.num_vertices(); ++s) {
        if (side[s] != -1)
            continue;
        side[s] = 0;
        stack.push_back(s);
        while (!stack.empty()) {
            Vertex x = stack.back();
            stack.pop_back();
            for (Vertex y : g.neighbors(x)) {
                if (side[y] == -1) {
                    side[y] = 1 - side[x];
                    stack.push_back(y);
                } else if (side[y] == side[x]) {
                    return false;
                }
            }
        }
    }
    return true;
}

/// Graph metadata document: {n, m, degrees, triangle_count, components, seed, generator}.
inline nlohmann::json graph_metadata(const Graph& g, std::optional<std::uint64_t> seed,
                                     const std::string& generator) {
    nlohmann::json j;
    j["n"] = g.num_vertices();
    j["m"] = g.num_edges();
    j["degrees"] = g.degrees();
    j["triangle_count"] = triangle_count(g);
    j["components"] = component_count(g);
    j["seed"] = seed ? nlohmann::json(*seed) : nlohmann::json(nullptr);
    j["generator"] = generator;
    return j;
}

} // namespace maqaoa
