#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "angles.hpp"
#include "errors.hpp"
#include "graph.hpp"
#include "random.hpp"

namespace maqaoa {

using Amplitude = std::complex<double>;

inline constexpr int kMaxQubits = 24;

/// Dense state over 2^n basis states. Qubit k is bit k of the basis index
/// (little-endian), so basis index z assigns vertex k to side (z >> k) & 1.
class StateVector {
  public:
    StateVector() = default;
    explicit StateVector(int qubits, int max_qubits = kMaxQubits) : m_qubits(qubits) {
        if (qubits < 0)
            throw DomainError("negative qubit count");
        if (qubits > max_qubits)
            throw ResourceError(std::to_string(qubits) + " qubits exceeds the dense limit of " +
                                std::to_string(max_qubits));
        m_amps.assign(std::size_t{1} << qubits, Amplitude{});
    }

    int num_qubits() const noexcept { return m_qubits; }
    std::size_t size() const noexcept { return m_amps.size(); }

    std::span<Amplitude> amplitudes() noexcept { return m_amps; }
    std::span<const Amplitude> amplitudes() const noexcept { return m_amps; }
    Amplitude& operator[](std::size_t z) { return m_amps[z]; }
    const Amplitude& operator[](std::size_t z) const { return m_amps[z]; }

    double norm_squared() const {
        double s = 0.0;
        for (const auto& a : m_amps)
            s += std::norm(a);
        return s;
    }

    std::vector<double> probabilities() const {
        std::vector<double> p(m_amps.size());
        for (std::size_t z = 0; z < m_amps.size(); ++z)
            p[z] = std::norm(m_amps[z]);
        return p;
    }

  private:
    int m_qubits = 0;
    std::vector<Amplitude> m_amps;
};

inline StateVector uniform_state(int n, int max_qubits = kMaxQubits) {
    if (n < 1)
        throw DomainError("uniform state needs at least one qubit");
    StateVector s(n, max_qubits);
    const double amp = std::pow(2.0, -0.5 * n);
    for (auto& a : s.amplitudes())
        a = {amp, 0.0};
    return s;
}

inline StateVector basis_state(int n, std::uint64_t z) {
    StateVector s(n);
    s[z] = 1.0;
    return s;
}

/// Cut size of basis state z.
inline int cut_of(const Graph& g, std::uint64_t z) {
    int c = 0;
    for (const auto& e : g.edges())
        c += static_cast<int>(((z >> e.u) ^ (z >> e.v)) & 1U);
    return c;
}

/// Per-basis-state cut values, built in O(2^n * avg degree).
inline std::vector<std::uint16_t> cut_table(const Graph& g) {
    const int n = g.num_vertices();
    std::vector<std::uint16_t> cuts(std::size_t{1} << n, 0);
    for (std::uint64_t z = 1; z < cuts.size(); ++z) {
        const int k = std::bit_width(z) - 1;
        const std::uint64_t prev = z ^ (std::uint64_t{1} << k);
        int c = cuts[prev];
        // setting the top bit k toggles every edge at k; higher neighbours are 0 in prev
        for (Vertex w : g.neighbors(k))
            c += ((prev >> w) & 1U) ? -1 : 1;
        cuts[z] = static_cast<std::uint16_t>(c);
    }
    return cuts;
}

namespace detail {

inline std::uint64_t byteswap64(std::uint64_t x) {
    std::uint64_t r = 0;
    for (int i = 0; i < 8; ++i)
        r = (r << 8) | ((x >> (8 * i)) & 0xffU);
    return r;
}

inline void check_qubits(const StateVector& s, const Graph& g) {
    if (s.num_qubits() != g.num_vertices())
        throw DomainError("state has " + std::to_string(s.num_qubits()) + " qubits but graph has " +
                          std::to_string(g.num_vertices()) + " vertices");
}

} // namespace detail

/// Cost layer exp(-i sum_e gamma_e C_e), C_e = (1 - Z_u Z_v)/2: a diagonal
/// phase exp(-i * sum of gamma over edges cut by z).
inline void apply_cost_layer(StateVector& s, const Graph& g, std::span<const double> gamma) {
    detail::check_qubits(s, g);
    if (gamma.size() != static_cast<std::size_t>(g.num_edges()))
        throw DomainError("gamma has " + std::to_string(gamma.size()) + " entries, graph has " +
                          std::to_string(g.num_edges()) + " edges");
    std::vector<double> phase(s.size(), 0.0);
    for (std::uint64_t z = 1; z < phase.size(); ++z) {
        const int k = std::bit_width(z) - 1;
        const std::uint64_t prev = z ^ (std::uint64_t{1} << k);
        double p = phase[prev];
        auto nb = g.neighbors(k);
        auto inc = g.incident_edges(k);
        for (std::size_t i = 0; i < nb.size(); ++i)
            p += ((prev >> nb[i]) & 1U) ? -gamma[inc[i]] : gamma[inc[i]];
        phase[z] = p;
    }
    auto amps = s.amplitudes();
    for (std::size_t z = 0; z < amps.size(); ++z)
        amps[z] *= Amplitude(std::cos(phase[z]), -std::sin(phase[z]));
}

/// Cost layer with one shared angle, using a precomputed cut table.
inline void apply_cost_layer_shared(StateVector& s, std::span<const std::uint16_t> cuts, int m,
                                    double gamma) {
    std::vector<Amplitude> factor(static_cast<std::size_t>(m) + 1);
    for (int k = 0; k <= m; ++k)
        factor[k] = std::polar(1.0, -gamma * k);
    auto amps = s.amplitudes();
    for (std::size_t z = 0; z < amps.size(); ++z)
        amps[z] *= factor[cuts[z]];
}

/// Mixer layer prod_v exp(-i beta_v X_v).
inline void apply_mixer_layer(StateVector& s, std::span<const double> beta) {
    if (beta.size() != static_cast<std::size_t>(s.num_qubits()))
        throw DomainError("beta has " + std::to_string(beta.size()) + " entries, state has " +
                          std::to_string(s.num_qubits()) + " qubits");
    auto amps = s.amplitudes();
    const std::size_t dim = amps.size();
    for (int q = 0; q < s.num_qubits(); ++q) {
        const double c = std::cos(beta[q]);
        const double sn = std::sin(beta[q]);
        if (sn == 0.0 && c == 1.0)
            continue;
        const std::size_t bit = std::size_t{1} << q;
        for (std::size_t base = 0; base < dim; base += 2 * bit) {
            for (std::size_t i = base; i < base + bit; ++i) {
                const Amplitude a = amps[i];
                const Amplitude b = amps[i + bit];
                // -i*s*b = (s*b.imag, -s*b.real)
                amps[i] = {c * a.real() + sn * b.imag(), c * a.imag() - sn * b.real()};
                amps[i + bit] = {c * b.real() + sn * a.imag(), c * b.imag() - sn * a.real()};
            }
        }
    }
}

inline StateVector prepare_state(const Graph& g, const AngleAssignment& a) {
    a.check(g);
    StateVector s = uniform_state(g.num_vertices());
    for (int l = 0; l < a.layers(); ++l) {
        apply_cost_layer(s, g, a.gamma[l]);
        apply_mixer_layer(s, a.beta[l]);
    }
    return s;
}

inline double expectation_cut(const StateVector& s, const Graph& g) {
    detail::check_qubits(s, g);
    const auto cuts = cut_table(g);
    double total = 0.0;
    for (std::size_t z = 0; z < s.size(); ++z)
        total += std::norm(s[z]) * cuts[z];
    return total;
}

inline std::vector<double> edge_expectations(const StateVector& s, const Graph& g) {
    detail::check_qubits(s, g);
    std::vector<double> out(static_cast<std::size_t>(g.num_edges()), 0.0);
    for (std::size_t z = 0; z < s.size(); ++z) {
        const double p = std::norm(s[z]);
        if (p == 0.0)
            continue;
        for (int i = 0; i < g.num_edges(); ++i) {
            const auto& e = g.edge(i);
            if (((z >> e.u) ^ (z >> e.v)) & 1U)
                out[i] += p;
        }
    }
    return out;
}

/// i.i.d. measurements in the computational basis; returns basis indices.
inline std::vector<std::uint64_t> sample_bitstrings(const StateVector& s, std::size_t shots,
                                                    std::uint64_t seed) {
    if (shots < 1)
        throw DomainError("shots must be >= 1");
    std::vector<double> cdf(s.size());
    double run = 0.0;
    for (std::size_t z = 0; z < s.size(); ++z) {
        run += std::norm(s[z]);
        cdf[z] = run;
    }
    Rng rng = make_rng(seed);
    std::vector<std::uint64_t> out;
    out.reserve(shots);
    for (std::size_t k = 0; k < shots; ++k) {
        const double r = uniform01(rng) * run;
        // first z with cdf[z] > r, which always has nonzero probability
        auto it = std::upper_bound(cdf.begin(), cdf.end(), r);
        out.push_back(std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1));
    }
    return out;
}

inline std::map<std::uint64_t, std::size_t> histogram(std::span<const std::uint64_t> samples) {
    std::map<std::uint64_t, std::size_t> counts;
    for (auto z : samples)
        ++counts[z];
    return counts;
}

/// Binary dump: interleaved (real, imag) little-endian float64, basis order.
inline void write_state_dump(const StateVector& s, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open " + path + " for writing");
    for (const auto& a : s.amplitudes()) {
        for (double part : {a.real(), a.imag()}) {
            auto bits = std::bit_cast<std::uint64_t>(part);
            if constexpr (std::endian::native == std::endian::big)
                bits = detail::byteswap64(bits);
            out.write(reinterpret_cast<const char*>(&bits), sizeof bits);
        }
    }
    if (!out)
        throw std::runtime_error("write failed: " + path);
}

inline StateVector read_state_dump(const std::string& path) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in)
        throw std::runtime_error("cannot open " + path);
    const auto bytes = static_cast<std::size_t>(in.tellg());
    const std::size_t count = bytes / 16;
    if (bytes % 16 != 0 || count == 0 || !std::has_single_bit(count))
        throw DomainError(path + ": size is not a power-of-two amplitude count");
    in.seekg(0);
    StateVector s(std::countr_zero(count));
    for (auto& a : s.amplitudes()) {
        std::uint64_t re = 0, im = 0;
        in.read(reinterpret_cast<char*>(&re), 8);
        in.read(reinterpret_cast<char*>(&im), 8);
        if constexpr (std::endian::native == std::endian::big) {
            re = detail::byteswap64(re);
            im = detail::byteswap64(im);
        }
        a = {std::bit_cast<double>(re), std::bit_cast<double>(im)};
    }
    return s;
}

/// Reusable simulator for one graph: caches the cut table and a state
/// buffer so that repeated objective evaluations do not allocate.
class QaoaSimulator {
  public:
    explicit QaoaSimulator(const Graph& g)
        : m_graph(&g), m_cuts(cut_table(g)), m_state(uniform_state(g.num_vertices())) {}

    const Graph& graph() const noexcept { return *m_graph; }
    std::span<const std::uint16_t> cuts() const noexcept { return m_cuts; }

    /// Prepares the state in the internal buffer and returns it.
    const StateVector& prepare(const AngleAssignment& a) {
        reset();
        for (int l = 0; l < a.layers(); ++l) {
            const auto& gam = a.gamma[l];
            const bool shared = !gam.empty() &&
                                std::all_of(gam.begin(), gam.end(), [&](double x) { return x == gam.front(); });
            if (shared)
                apply_cost_layer_shared(m_state, m_cuts, m_graph->num_edges(), gam.front());
            else
                apply_cost_layer(m_state, *m_graph, gam);
            apply_mixer_layer(m_state, a.beta[l]);
        }
        return m_state;
    }

    /// Plain QAOA with per-layer (gamma_l, beta_l).
    const StateVector& prepare_shared(std::span<const double> gammas, std::span<const double> betas) {
        reset();
        m_beta.assign(static_cast<std::size_t>(m_graph->num_vertices()), 0.0);
        for (std::size_t l = 0; l < gammas.size(); ++l) {
            apply_cost_layer_shared(m_state, m_cuts, m_graph->num_edges(), gammas[l]);
            std::fill(m_beta.begin(), m_beta.end(), betas[l]);
            apply_mixer_layer(m_state, m_beta);
        }
        return m_state;
    }

    double expectation() const {
        double total = 0.0;
        for (std::size_t z = 0; z < m_state.size(); ++z)
            total += std::norm(m_state[z]) * m_cuts[z];
        return total;
    }

    const StateVector& state() const noexcept { return m_state; }

  private:
    void reset() {
        const double amp = std::pow(2.0, -0.5 * m_graph->num_vertices());
        for (auto& a : m_state.amplitudes())
            a = {amp, 0.0};
    }

    const Graph* m_graph;
    std::vector<std::uint16_t> m_cuts;
    StateVector m_state;
    std::vector<double> m_beta;
};

} // namespace maqaoa
