#pragma once

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "graph.hpp"
#include "optimizer.hpp"

namespace maqaoa {

/// Error probability per single-qubit (vertex) and two-qubit (edge) unitary.
struct NoiseModel {
    double eps_n = 0.0;
    double eps_m = 0.0;

    void check() const {
        if (!(eps_n >= 0.0 && eps_n < 1.0) || !(eps_m >= 0.0 && eps_m < 1.0))
            throw DomainError("error rates must lie in [0, 1)");
    }
};

/// Gate counts with the layer multiplicity already applied. Counts are real
/// so ensemble means (14.4 edges) can be used directly.
struct CircuitProfile {
    double n_gates_1q = 0.0;
    double n_gates_2q = 0.0;
    int layers = 1;

    void check() const {
        if (!(n_gates_1q >= 0.0) || !(n_gates_2q >= 0.0) || layers < 0)
            throw DomainError("circuit profile counts must be nonnegative");
    }
};

/// Unpruned p-layer circuit on n vertices and m edges.
inline CircuitProfile qaoa_profile(double n, double m, int layers) {
    CircuitProfile c{n * layers, m * layers, layers};
    c.check();
    return c;
}

inline CircuitProfile qaoa_profile(const Graph& g, int layers) {
    return qaoa_profile(g.num_vertices(), g.num_edges(), layers);
}

/// log F; kept separate so large ratios are formed without under/overflow.
inline double log_fidelity(const CircuitProfile& c, const NoiseModel& nm) {
    c.check();
    nm.check();
    return c.n_gates_1q * std::log1p(-nm.eps_n) + c.n_gates_2q * std::log1p(-nm.eps_m);
}

inline double fidelity(const CircuitProfile& c, const NoiseModel& nm) { return std::exp(log_fidelity(c, nm)); }

inline double expected_measurements(const CircuitProfile& c, const NoiseModel& nm) {
    return std::exp(-log_fidelity(c, nm));
}

/// One-layer multi-angle circuit with the zero-angle gates removed.
inline CircuitProfile pruned_profile(const Graph& g, const OptimizationResult& r) {
    if (r.ansatz != "ma" || r.layers != 1)
        throw DomainError("pruned profile needs a one-layer multi-angle result");
    if (r.zero_beta_count < 0 || r.zero_beta_count > g.num_vertices() || r.zero_gamma_count < 0 ||
        r.zero_gamma_count > g.num_edges())
        throw DomainError("zero-angle counts exceed the graph size");
    return {static_cast<double>(g.num_vertices() - r.zero_beta_count),
            static_cast<double>(g.num_edges() - r.zero_gamma_count), 1};
}

/// Pruned one-layer profile from ensemble-mean zero fractions in [0, 1].
inline CircuitProfile pruned_profile(double n, double m, double zero_beta_fraction, double zero_gamma_fraction) {
    if (!(zero_beta_fraction >= 0.0 && zero_beta_fraction <= 1.0) ||
        !(zero_gamma_fraction >= 0.0 && zero_gamma_fraction <= 1.0))
        throw DomainError("zero fractions must lie in [0, 1]");
    CircuitProfile c{n * (1.0 - zero_beta_fraction), m * (1.0 - zero_gamma_fraction), 1};
    c.check();
    return c;
}

/// Expected measurements of qaoa relative to ma under the same noise.
inline double measurement_ratio(const CircuitProfile& qaoa, const CircuitProfile& ma, const NoiseModel& nm) {
    return std::exp(log_fidelity(ma, nm) - log_fidelity(qaoa, nm));
}

/// Two decimals below 1e4, otherwise one significant figure: "1.05", "3x10^4".
inline std::string format_ratio(double r) {
    char buf[64];
    if (r < 1e4) {
        std::snprintf(buf, sizeof buf, "%.2f", r);
        return buf;
    }
    int k = static_cast<int>(std::floor(std::log10(r)));
    long lead = std::lround(r / std::pow(10.0, k));
    if (lead == 10) {
        lead = 1;
        ++k;
    }
    std::snprintf(buf, sizeof buf, "%ldx10^%d", lead, k);
    return buf;
}

struct FidelityRow {
    std::string label;
    double n = 0.0;
    double m = 0.0;
    int p = 1;
    NoiseModel noise;
    double zero_beta_fraction = 0.0;
    double zero_gamma_fraction = 0.0;
    double ratio = 0.0;
};

/// Input describing one graph family: sizes and mean zero-angle fractions.
struct FidelityFamily {
    std::string label;
    double n = 0.0;
    double m = 0.0;
    double zero_beta_fraction = 0.0;
    double zero_gamma_fraction = 0.0;
};

/// Ratio grid over families x noise models x layer counts.
inline std::vector<FidelityRow> report_fidelity_table(const std::vector<FidelityFamily>& families,
                                                      const std::vector<NoiseModel>& noises,
                                                      const std::vector<int>& layers) {
    std::vector<FidelityRow> rows;
    for (const auto& f : families) {
        const auto ma = pruned_profile(f.n, f.m, f.zero_beta_fraction, f.zero_gamma_fraction);
        for (const auto& nm : noises)
            for (int p : layers) {
                if (p < 1)
                    throw DomainError("layer count must be >= 1");
                FidelityRow r{f.label, f.n, f.m, p, nm, f.zero_beta_fraction, f.zero_gamma_fraction, 0.0};
                r.ratio = measurement_ratio(qaoa_profile(f.n, f.m, p), ma, nm);
                rows.push_back(r);
            }
    }
    return rows;
}

inline void write_fidelity_csv(std::ostream& os, const std::vector<FidelityRow>& rows) {
    os << "family,n,m,p,eps_n,eps_m,zero_beta_fraction,zero_gamma_fraction,ratio,ratio_display\n";
    char buf[256];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%s,%g,%g,%d,%g,%g,%.6f,%.6f,%.10g,%s\n", r.label.c_str(), r.n, r.m, r.p,
                      r.noise.eps_n, r.noise.eps_m, r.zero_beta_fraction, r.zero_gamma_fraction, r.ratio,
                      format_ratio(r.ratio).c_str());
        os << buf;
    }
}

} // namespace maqaoa
