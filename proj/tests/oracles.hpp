#pragma once

// Slow, independent reference implementations used only by the tests.

#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

#include <maqaoa/graph.hpp>

namespace oracle {

using cplx = std::complex<double>;
using Matrix = std::vector<std::vector<cplx>>;

inline Matrix identity(std::size_t d) {
    Matrix m(d, std::vector<cplx>(d, 0.0));
    for (std::size_t i = 0; i < d; ++i)
        m[i][i] = 1.0;
    return m;
}

/// a (x) b with a acting on the more significant index bits.
inline Matrix kron(const Matrix& a, const Matrix& b) {
    const std::size_t ra = a.size(), rb = b.size();
    Matrix k(ra * rb, std::vector<cplx>(ra * rb, 0.0));
    for (std::size_t i = 0; i < ra; ++i)
        for (std::size_t j = 0; j < ra; ++j)
            for (std::size_t p = 0; p < rb; ++p)
                for (std::size_t q = 0; q < rb; ++q)
                    k[i * rb + p][j * rb + q] = a[i][j] * b[p][q];
    return k;
}

inline std::vector<cplx> apply(const Matrix& m, const std::vector<cplx>& v) {
    std::vector<cplx> out(v.size(), 0.0);
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < v.size(); ++j)
            out[i] += m[i][j] * v[j];
    return out;
}

/// exp(-i b X) on every qubit as one dense Kronecker product; qubit k is
/// bit k, so qubit n-1 is the leftmost factor.
inline Matrix mixer_matrix(const std::vector<double>& beta) {
    Matrix full = identity(1);
    for (std::size_t k = beta.size(); k-- > 0;) {
        const double c = std::cos(beta[k]), s = std::sin(beta[k]);
        const Matrix rx = {{c, cplx(0, -s)}, {cplx(0, -s), c}};
        full = kron(full, rx);
    }
    return full;
}

/// Diagonal of prod_e exp(-i g_e (1 - Z_u Z_v) / 2), built from Z eigenvalues.
inline std::vector<cplx> cost_diagonal(const maqaoa::Graph& g, const std::vector<double>& gamma) {
    const std::size_t dim = std::size_t{1} << g.num_vertices();
    std::vector<cplx> d(dim);
    for (std::size_t z = 0; z < dim; ++z) {
        double phase = 0.0;
        for (int e = 0; e < g.num_edges(); ++e) {
            const auto [u, v] = g.edge(e);
            const int zu = (z >> u) & 1 ? -1 : 1;
            const int zv = (z >> v) & 1 ? -1 : 1;
            phase += gamma[static_cast<std::size_t>(e)] * 0.5 * (1 - zu * zv);
        }
        d[z] = std::exp(cplx(0, -phase));
    }
    return d;
}

/// Dense-matrix QAOA state: cost diagonal then mixer matrix, per layer.
inline std::vector<cplx> dense_state(const maqaoa::Graph& g, const std::vector<std::vector<double>>& gammas,
                                     const std::vector<std::vector<double>>& betas) {
    const std::size_t dim = std::size_t{1} << g.num_vertices();
    std::vector<cplx> psi(dim, 1.0 / std::sqrt(static_cast<double>(dim)));
    for (std::size_t l = 0; l < gammas.size(); ++l) {
        const auto d = cost_diagonal(g, gammas[l]);
        for (std::size_t z = 0; z < dim; ++z)
            psi[z] *= d[z];
        psi = oracle::apply(mixer_matrix(betas[l]), psi);
    }
    return psi;
}

/// <C> from a dense state by counting cut edges of every basis string.
inline double dense_expectation(const maqaoa::Graph& g, const std::vector<cplx>& psi) {
    double total = 0.0;
    for (std::size_t z = 0; z < psi.size(); ++z) {
        int cut = 0;
        for (const auto& e : g.edges())
            cut += ((z >> e.u) & 1) != ((z >> e.v) & 1);
        total += std::norm(psi[z]) * cut;
    }
    return total;
}

/// Largest cut by plain enumeration of all 2^n labelings.
inline int maxcut(const maqaoa::Graph& g) {
    int best = 0;
    for (std::uint64_t z = 0; z < (std::uint64_t{1} << g.num_vertices()); ++z) {
        int cut = 0;
        for (const auto& e : g.edges())
            cut += ((z >> e.u) & 1) != ((z >> e.v) & 1);
        best = std::max(best, cut);
    }
    return best;
}

/// Triangles by scanning every vertex triple.
inline long long triangles(const maqaoa::Graph& g) {
    long long t = 0;
    const int n = g.num_vertices();
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            for (int c = b + 1; c < n; ++c)
                t += g.has_edge(a, b) && g.has_edge(b, c) && g.has_edge(a, c);
    return t;
}

inline std::vector<double> fd_gradient(const std::function<double(const std::vector<double>&)>& f,
                                       std::vector<double> x, double h = 1e-5) {
    std::vector<double> g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double x0 = x[i];
        x[i] = x0 + h;
        const double up = f(x);
        x[i] = x0 - h;
        const double down = f(x);
        x[i] = x0;
        g[i] = (up - down) / (2 * h);
    }
    return g;
}

/// max over a uniform grid of n points on [lo, hi].
inline double grid_max(const std::function<double(double)>& f, double lo, double hi, int n) {
    double best = f(lo);
    for (int k = 1; k < n; ++k)
        best = std::max(best, f(lo + (hi - lo) * k / (n - 1)));
    return best;
}

} // namespace oracle
