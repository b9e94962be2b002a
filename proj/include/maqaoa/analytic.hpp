#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "angles.hpp"
#include "errors.hpp"
#include "graph.hpp"

namespace maqaoa {

namespace detail {

inline double ipow(double x, int k) {
    double r = 1.0;
    while (k > 0) {
        if (k & 1)
            r *= x;
        x *= x;
        k >>= 1;
    }
    return r;
}

inline void require_single_layer(const AngleAssignment& a) {
    if (a.layers() != 1)
        throw DomainError("closed form needs exactly one layer, got " + std::to_string(a.layers()));
}

} // namespace detail

// ---------------------------------------------------------------------------
// One-layer multi-angle QAOA on triangle-free graphs
//
// For edge uv:
//   <C_uv> = 1/2 + 1/2 sin(g_uv) [ sin(2b_u) cos(2b_v) prod_{w in N(u)\v} cos(g_uw)
//                               + sin(2b_v) cos(2b_u) prod_{x in N(v)\u} cos(g_vx) ]
// An empty product is 1.
// ---------------------------------------------------------------------------

/// Precomputed evaluator for the triangle-free closed form over the flat
/// parameter layout (betas by vertex, then gammas by edge). Value and
/// gradient each cost O(n + m).
class TriangleFreeMaEvaluator {
  public:
    explicit TriangleFreeMaEvaluator(const Graph& g) : m_graph(&g) {
        for (const auto& e : g.edges())
            if (common_neighbor_count(g, e.u, e.v) > 0)
                throw DomainError("edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                                  ") lies on a triangle; use the statevector backend");
        const auto n = static_cast<std::size_t>(g.num_vertices());
        const auto m = static_cast<std::size_t>(g.num_edges());
        m_cg.resize(m);
        m_sg.resize(m);
        m_s2b.resize(n);
        m_c2b.resize(n);
        m_loo.resize(2 * m);
        m_base.resize(n);
        std::size_t run = 0;
        for (Vertex v = 0; v < g.num_vertices(); ++v) {
            m_base[v] = run;
            run += static_cast<std::size_t>(g.degree(v));
        }
    }

    const Graph& graph() const noexcept { return *m_graph; }
    std::size_t dimension() const noexcept {
        return static_cast<std::size_t>(m_graph->num_vertices() + m_graph->num_edges());
    }

    /// Number of nonzero partial-derivative terms d<C_e>/d(theta) the
    /// gradient evaluates: sum over edges of (deg u + deg v + 1).
    std::uint64_t gradient_terms() const {
        std::uint64_t t = 0;
        for (const auto& e : m_graph->edges())
            t += static_cast<std::uint64_t>(m_graph->degree(e.u) + m_graph->degree(e.v) + 1);
        return t;
    }

    /// Per-edge expectations.
    std::vector<double> edge_values(std::span<const double> x) {
        load(x);
        const Graph& g = *m_graph;
        std::vector<double> out(static_cast<std::size_t>(g.num_edges()), 0.5);
        for (Vertex v = 0; v < g.num_vertices(); ++v) {
            auto inc = g.incident_edges(v);
            auto nb = g.neighbors(v);
            for (std::size_t i = 0; i < inc.size(); ++i) {
                const int e = inc[i];
                out[e] += 0.5 * m_sg[e] * m_s2b[v] * m_c2b[nb[i]] * m_loo[slot(v, i)];
            }
        }
        return out;
    }

    double value(std::span<const double> x) {
        load(x);
        const Graph& g = *m_graph;
        double total = 0.5 * g.num_edges();
        for (Vertex v = 0; v < g.num_vertices(); ++v) {
            auto inc = g.incident_edges(v);
            auto nb = g.neighbors(v);
            double acc = 0.0;
            for (std::size_t i = 0; i < inc.size(); ++i)
                acc += m_sg[inc[i]] * m_c2b[nb[i]] * m_loo[slot(v, i)];
            total += 0.5 * m_s2b[v] * acc;
        }
        return total;
    }

    /// Writes d<C>/d(theta) into grad (same layout as x) and returns <C>.
    double gradient(std::span<const double> x, std::span<double> grad) {
        load(x);
        const Graph& g = *m_graph;
        const int n = g.num_vertices();
        std::fill(grad.begin(), grad.end(), 0.0);
        auto gb = grad.subspan(0, static_cast<std::size_t>(n));
        auto gg = grad.subspan(static_cast<std::size_t>(n));
        double total = 0.5 * g.num_edges();

        for (Vertex v = 0; v < n; ++v) {
            auto inc = g.incident_edges(v);
            auto nb = g.neighbors(v);
            const std::size_t d = inc.size();
            if (d == 0)
                continue;
            // weights w_i = 1/2 sin(g_i) sin(2b_v) cos(2b_y) attached to v's side of edge i
            m_w.resize(d);
            for (std::size_t i = 0; i < d; ++i)
                m_w[i] = 0.5 * m_sg[inc[i]] * m_s2b[v] * m_c2b[nb[i]];

            // S_j = sum_{i != j} w_i prod_{k not in {i,j}} c_k, by prefix/suffix sweeps
            m_prefix_sum.assign(d + 1, 0.0);
            m_prefix_prod.assign(d + 1, 1.0);
            for (std::size_t i = 0; i < d; ++i) {
                const double c = m_cg[inc[i]];
                m_prefix_sum[i + 1] = m_prefix_sum[i] * c + m_w[i] * m_prefix_prod[i];
                m_prefix_prod[i + 1] = m_prefix_prod[i] * c;
            }
            double suffix_sum = 0.0;
            double suffix_prod = 1.0;
            for (std::size_t j = d; j-- > 0;) {
                const int e = inc[j];
                const double loo = m_loo[slot(v, j)];
                const double s_j = m_prefix_sum[j] * suffix_prod + m_prefix_prod[j] * suffix_sum;
                // products of the other edges' cosines at v depend on g_e
                gg[e] -= m_sg[e] * s_j;
                // the sin(g_e) factor of edge e's own term on v's side
                gg[e] += 0.5 * m_cg[e] * m_s2b[v] * m_c2b[nb[j]] * loo;
                // beta derivatives: sin(2b_v) on v's side, cos(2b_v) on the far side
                gb[v] += m_sg[e] * m_c2b[v] * m_c2b[nb[j]] * loo;
                gb[nb[j]] -= m_sg[e] * m_s2b[v] * m_s2b[nb[j]] * loo;
                total += m_w[j] * loo;

                const double c = m_cg[e];
                suffix_sum = suffix_sum * c + m_w[j] * suffix_prod;
                suffix_prod *= c;
            }
        }
        return total;
    }

  private:
    std::size_t slot(Vertex v, std::size_t i) const { return m_base[v] + i; }

    void load(std::span<const double> x) {
        const Graph& g = *m_graph;
        const auto n = static_cast<std::size_t>(g.num_vertices());
        if (x.size() != dimension())
            throw DomainError("angle vector length " + std::to_string(x.size()) + " != n+m=" +
                              std::to_string(dimension()));
        for (std::size_t v = 0; v < n; ++v) {
            m_s2b[v] = std::sin(2.0 * x[v]);
            m_c2b[v] = std::cos(2.0 * x[v]);
        }
        for (std::size_t e = 0; e < m_cg.size(); ++e) {
            m_cg[e] = std::cos(x[n + e]);
            m_sg[e] = std::sin(x[n + e]);
        }
        // leave-one-out cosine products at each vertex
        for (Vertex v = 0; v < g.num_vertices(); ++v) {
            auto inc = g.incident_edges(v);
            const std::size_t base = slot(v, 0);
            double run = 1.0;
            for (std::size_t i = 0; i < inc.size(); ++i) {
                m_loo[base + i] = run;
                run *= m_cg[inc[i]];
            }
            run = 1.0;
            for (std::size_t i = inc.size(); i-- > 0;) {
                m_loo[base + i] *= run;
                run *= m_cg[inc[i]];
            }
        }
    }

    const Graph* m_graph;
    std::vector<double> m_cg, m_sg, m_s2b, m_c2b, m_loo;
    std::vector<double> m_w, m_prefix_sum, m_prefix_prod;
    std::vector<std::size_t> m_base;
};

inline double ma_edge_expectation_tf(const Graph& g, const AngleAssignment& a, Edge e) {
    detail::require_single_layer(a);
    a.check(g);
    auto idx = g.edge_index(e.u, e.v);
    if (!idx)
        throw DomainError("(" + std::to_string(e.u) + "," + std::to_string(e.v) + ") is not an edge");
    if (common_neighbor_count(g, e.u, e.v) > 0)
        throw DomainError("edge lies on a triangle; use the statevector backend");
    const auto& gam = a.gamma[0];
    const auto& bet = a.beta[0];
    const Vertex u = g.edge(*idx).u;
    const Vertex v = g.edge(*idx).v;
    auto side = [&](Vertex x, Vertex y) {
        double prod = 1.0;
        auto nb = g.neighbors(x);
        auto inc = g.incident_edges(x);
        for (std::size_t i = 0; i < nb.size(); ++i)
            if (nb[i] != y)
                prod *= std::cos(gam[inc[i]]);
        return std::sin(2.0 * bet[x]) * std::cos(2.0 * bet[y]) * prod;
    };
    return 0.5 + 0.5 * std::sin(gam[*idx]) * (side(u, v) + side(v, u));
}

inline double ma_total_expectation_tf(const Graph& g, const AngleAssignment& a) {
    detail::require_single_layer(a);
    a.check(g);
    TriangleFreeMaEvaluator eval(g);
    return eval.value(a.flatten());
}

/// Gradient in flat order: all betas by vertex, then all gammas by edge.
inline std::vector<double> ma_gradient_tf(const Graph& g, const AngleAssignment& a) {
    detail::require_single_layer(a);
    a.check(g);
    TriangleFreeMaEvaluator eval(g);
    std::vector<double> grad(eval.dimension());
    eval.gradient(a.flatten(), grad);
    return grad;
}

/// Angles at which one-layer multi-angle QAOA cuts every edge of a star
/// (centre 0): all gammas pi/2, leaf betas pi/4, centre beta 0.
inline AngleAssignment star_ma_optimal_angles(const Graph& star) {
    auto a = AngleAssignment::zeros(star.num_vertices(), star.num_edges(), 1);
    for (auto& g : a.gamma[0])
        g = std::numbers::pi / 2;
    for (Vertex v = 1; v < star.num_vertices(); ++v)
        a.beta[0][v] = std::numbers::pi / 4;
    return a;
}

// ---------------------------------------------------------------------------
// One-layer standard QAOA, any graph
//
//   <C_ij> = 1/2 + 1/4 sin(4b) sin(g) (cos^d g + cos^e g)
//               - 1/4 sin^2(2b) cos^(d+e-2f) g (1 - cos^f 2g)
// with d = deg(i)-1, e = deg(j)-1, f = triangles through ij.
// ---------------------------------------------------------------------------

inline double qaoa1_edge_value(int d, int e, int f, double gamma, double beta) {
    const double cg = std::cos(gamma);
    const double s2b = std::sin(2.0 * beta);
    return 0.5 + 0.25 * std::sin(4.0 * beta) * std::sin(gamma) * (detail::ipow(cg, d) + detail::ipow(cg, e)) -
           0.25 * s2b * s2b * detail::ipow(cg, d + e - 2 * f) * (1.0 - detail::ipow(std::cos(2.0 * gamma), f));
}

inline double qaoa1_edge_expectation(const Graph& g, double gamma, double beta, Edge e) {
    const int f = triangles_through_edge(g, e);
    return qaoa1_edge_value(g.degree(e.u) - 1, g.degree(e.v) - 1, f, gamma, beta);
}

/// Sum of the one-layer edge formula, with edges grouped by (d, e, f).
class Qaoa1Evaluator {
  public:
    explicit Qaoa1Evaluator(const Graph& g) {
        std::map<std::tuple<int, int, int>, int> classes;
        for (const auto& e : g.edges()) {
            int d = g.degree(e.u) - 1, k = g.degree(e.v) - 1;
            if (d > k)
                std::swap(d, k);
            ++classes[{d, k, common_neighbor_count(g, e.u, e.v)}];
        }
        for (const auto& [key, count] : classes)
            m_classes.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), count});
    }

    /// x = (beta, gamma), matching the flat layout for one layer.
    double value(std::span<const double> x) const {
        if (x.size() != 2)
            throw DomainError("one-layer QAOA takes (beta, gamma)");
        return total(x[1], x[0]);
    }

    double total(double gamma, double beta) const {
        double sum = 0.0;
        for (const auto& c : m_classes)
            sum += c.count * qaoa1_edge_value(c.d, c.e, c.f, gamma, beta);
        return sum;
    }

  private:
    struct EdgeClass {
        int d, e, f, count;
    };
    std::vector<EdgeClass> m_classes;
};

inline double qaoa1_total_expectation(const Graph& g, double gamma, double beta) {
    return Qaoa1Evaluator(g).total(gamma, beta);
}

/// Best one-layer QAOA value of a single star edge,
/// max over gamma of 1/2 + 1/4 sin(g) (1 + cos^(n-2) g), with sin(4b) = 1.
/// A 1024-point grid on [0, pi] brackets the maximum; golden-section search
/// refines it.
inline double star_qaoa1_limit(int n) {
    if (n < 2)
        throw DomainError("star needs n >= 2");
    auto h = [n](double gam) { return 0.5 + 0.25 * std::sin(gam) * (1.0 + detail::ipow(std::cos(gam), n - 2)); };
    constexpr int kGrid = 1024;
    const double step = std::numbers::pi / kGrid;
    int best = 0;
    double best_val = h(0.0);
    for (int k = 1; k <= kGrid; ++k) {
        const double val = h(k * step);
        if (val > best_val) {
            best_val = val;
            best = k;
        }
    }
    double lo = std::max(0.0, (best - 1) * step);
    double hi = std::min(std::numbers::pi, (best + 1) * step);
    const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = hi - ratio * (hi - lo);
    double b = lo + ratio * (hi - lo);
    double fa = h(a), fb = h(b);
    while (hi - lo > 1e-13) {
        if (fa < fb) {
            lo = a;
            a = b;
            fa = fb;
            b = lo + ratio * (hi - lo);
            fb = h(b);
        } else {
            hi = b;
            b = a;
            fb = fa;
            a = hi - ratio * (hi - lo);
            fa = h(a);
        }
    }
    return std::max({best_val, fa, fb, h(0.5 * (lo + hi))});
}

} // namespace maqaoa
