#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"
#include "graph.hpp"

namespace maqaoa {

/// Per-layer angles: gamma[l][edge_index] and beta[l][vertex]. Plain QAOA
/// is the shared case where every entry of a layer vector is equal.
///
/// Flat layout, used by the optimizer and gradients: for each layer, all
/// betas in vertex order followed by all gammas in edge order.
struct AngleAssignment {
    std::vector<std::vector<double>> gamma;
    std::vector<std::vector<double>> beta;

    int layers() const noexcept { return static_cast<int>(gamma.size()); }

    static AngleAssignment zeros(int n, int m, int layers) {
        AngleAssignment a;
        a.gamma.assign(static_cast<std::size_t>(layers), std::vector<double>(static_cast<std::size_t>(m), 0.0));
        a.beta.assign(static_cast<std::size_t>(layers), std::vector<double>(static_cast<std::size_t>(n), 0.0));
        return a;
    }

    /// Broadcast one (gamma_l, beta_l) pair per layer.
    static AngleAssignment shared(int n, int m, std::span<const double> gammas,
                                  std::span<const double> betas) {
        if (gammas.size() != betas.size())
            throw DomainError("shared angles need as many betas as gammas");
        AngleAssignment a;
        for (std::size_t l = 0; l < gammas.size(); ++l) {
            a.gamma.emplace_back(static_cast<std::size_t>(m), gammas[l]);
            a.beta.emplace_back(static_cast<std::size_t>(n), betas[l]);
        }
        return a;
    }

    static AngleAssignment shared(const Graph& g, double gamma, double beta) {
        return shared(g.num_vertices(), g.num_edges(), std::span<const double>(&gamma, 1),
                      std::span<const double>(&beta, 1));
    }

    /// Throws DomainError unless every layer matches the graph's n and m.
    void check(const Graph& g) const {
        if (gamma.size() != beta.size())
            throw DomainError("gamma and beta layer counts differ");
        for (std::size_t l = 0; l < gamma.size(); ++l) {
            if (gamma[l].size() != static_cast<std::size_t>(g.num_edges()))
                throw DomainError("layer " + std::to_string(l) + ": gamma length " +
                                  std::to_string(gamma[l].size()) + " != m=" +
                                  std::to_string(g.num_edges()));
            if (beta[l].size() != static_cast<std::size_t>(g.num_vertices()))
                throw DomainError("layer " + std::to_string(l) + ": beta length " +
                                  std::to_string(beta[l].size()) + " != n=" +
                                  std::to_string(g.num_vertices()));
        }
    }

    bool is_shared() const {
        auto uniform = [](const std::vector<double>& v) {
            for (double x : v)
                if (x != v.front())
                    return false;
            return true;
        };
        for (std::size_t l = 0; l < gamma.size(); ++l)
            if (!uniform(gamma[l]) || !uniform(beta[l]))
                return false;
        return true;
    }

    std::size_t parameter_count() const {
        std::size_t total = 0;
        for (std::size_t l = 0; l < gamma.size(); ++l)
            total += gamma[l].size() + beta[l].size();
        return total;
    }

    std::vector<double> flatten() const {
        std::vector<double> x;
        x.reserve(parameter_count());
        for (std::size_t l = 0; l < gamma.size(); ++l) {
            x.insert(x.end(), beta[l].begin(), beta[l].end());
            x.insert(x.end(), gamma[l].begin(), gamma[l].end());
        }
        return x;
    }

    static AngleAssignment unflatten(std::span<const double> x, int n, int m, int layers) {
        const auto per_layer = static_cast<std::size_t>(n + m);
        if (x.size() != per_layer * static_cast<std::size_t>(layers))
            throw DomainError("flat angle vector has length " + std::to_string(x.size()) +
                              ", expected " + std::to_string(per_layer * layers));
        AngleAssignment a;
        for (int l = 0; l < layers; ++l) {
            auto base = x.begin() + static_cast<std::ptrdiff_t>(per_layer * l);
            a.beta.emplace_back(base, base + n);
            a.gamma.emplace_back(base + n, base + n + m);
        }
        return a;
    }

    bool operator==(const AngleAssignment&) const = default;
};

} // namespace maqaoa
