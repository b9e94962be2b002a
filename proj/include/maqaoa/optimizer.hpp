#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "analytic.hpp"
#include "angles.hpp"
#include "bfgs.hpp"
#include "errors.hpp"
#include "graph.hpp"
#include "maxcut.hpp"
#include "parallel.hpp"
#include "random.hpp"
#include "statevector.hpp"

namespace maqaoa {

enum class Backend { analytic, statevector };
enum class GradientMode { analytic, finite_difference };

inline std::string to_string(Backend b) { return b == Backend::analytic ? "analytic" : "statevector"; }

inline Backend parse_backend(const std::string& s) {
    if (s == "analytic")
        return Backend::analytic;
    if (s == "statevector")
        return Backend::statevector;
    throw DomainError("unknown backend '" + s + "' (expected analytic|statevector)");
}

struct OptimizerConfig {
    int seeds = 100;
    GradientMode gradient = GradientMode::analytic;
    double fd_step = 1e-5;
    double gradient_tolerance = 1e-6;
    double value_tolerance = 1e-10;
    int max_iterations = 500;
    double gamma_low = -std::numbers::pi;
    double gamma_high = std::numbers::pi;
    double beta_low = -std::numbers::pi / 2;
    double beta_high = std::numbers::pi / 2;
    double zero_threshold = 1e-3;
    std::uint64_t master_seed = 0;
    bool keep_traces = false;
    int threads = 1;

    void validate() const {
        if (seeds < 1)
            throw DomainError("seeds must be >= 1");
        if (!(fd_step > 0.0))
            throw DomainError("finite-difference step must be positive");
        if (!(gradient_tolerance > 0.0) || !(value_tolerance > 0.0))
            throw DomainError("stopping tolerances must be positive");
        if (max_iterations < 1)
            throw DomainError("max_iterations must be >= 1");
        if (!(zero_threshold > 0.0))
            throw DomainError("zero threshold must be positive");
        if (!(gamma_low < gamma_high) || !(beta_low < beta_high))
            throw DomainError("empty angle sampling interval");
    }

    BfgsOptions bfgs() const {
        BfgsOptions o;
        o.gradient_tolerance = gradient_tolerance;
        o.value_tolerance = value_tolerance;
        o.max_iterations = max_iterations;
        return o;
    }
};

struct OptimizationResult {
    std::string ansatz; // "qaoa" or "ma"
    int layers = 1;
    Backend backend = Backend::analytic;
    double best_value = 0.0;
    AngleAssignment best_angles;
    double c_max = 0.0;
    double approximation_ratio = 0.0;
    int seeds_used = 0;
    int best_seed = -1;
    int aborted_seeds = 0;
    std::vector<int> iterations;                 // per seed
    std::vector<std::vector<double>> traces;     // per seed, when kept
    int zero_beta_count = 0;
    int zero_gamma_count = 0;
    double zero_threshold = 0.0;
    double seconds = 0.0;
    std::uint64_t work = 0; // gradient terms + inverse-Hessian multiply-adds, all seeds

    std::string label() const {
        if (ansatz == "ma")
            return layers == 1 ? "ma" : "ma:" + std::to_string(layers);
        return ansatz + ":" + std::to_string(layers);
    }
};

// ---------------------------------------------------------------------------
// Zero angles
// ---------------------------------------------------------------------------

/// Distance from x to the nearest multiple of period.
inline double distance_to_lattice(double x, double period) {
    const double r = std::remainder(x, period);
    return std::abs(r);
}

/// Counts angles whose gate is the identity up to global phase: gammas within
/// threshold of a multiple of 2 pi (C_e has spectrum {0, 1}) and betas
/// within threshold of a multiple of pi (exp(-i pi X) = -I).
inline std::pair<int, int> count_zero_angles(const AngleAssignment& a, double zero_threshold) {
    if (!(zero_threshold > 0.0))
        throw DomainError("zero threshold must be positive");
    int zb = 0, zg = 0;
    for (const auto& layer : a.beta)
        for (double b : layer)
            zb += distance_to_lattice(b, std::numbers::pi) < zero_threshold;
    for (const auto& layer : a.gamma)
        for (double g : layer)
            zg += distance_to_lattice(g, 2.0 * std::numbers::pi) < zero_threshold;
    return {zb, zg};
}

// ---------------------------------------------------------------------------
// Objectives. Each exposes dimension(), value(x), gradient(x, out) and
// gradient_work(), the number of backend terms one gradient call evaluates.
// ---------------------------------------------------------------------------

/// One-layer QAOA through the closed edge formula; x = (beta, gamma).
class Qaoa1AnalyticObjective {
  public:
    Qaoa1AnalyticObjective(const Graph& g, double fd_step) : m_eval(g), m_step(fd_step), m_edges(g.num_edges()) {}
    std::size_t dimension() const { return 2; }
    double value(std::span<const double> x) const { return m_eval.value(x); }
    double gradient(std::span<const double> x, std::span<double> out) const {
        return central_difference_gradient([&](std::span<const double> p) { return m_eval.value(p); }, x, out,
                                           m_step);
    }
    std::uint64_t gradient_work() const { return 5ULL * static_cast<std::uint64_t>(m_edges); }

  private:
    Qaoa1Evaluator m_eval;
    double m_step;
    int m_edges;
};

/// One-layer multi-angle QAOA through the triangle-free closed form.
class MaAnalyticObjective {
  public:
    MaAnalyticObjective(const Graph& g, GradientMode mode, double fd_step)
        : m_eval(g), m_mode(mode), m_step(fd_step), m_terms(m_eval.gradient_terms()) {}
    std::size_t dimension() const { return m_eval.dimension(); }
    double value(std::span<const double> x) { return m_eval.value(x); }
    double gradient(std::span<const double> x, std::span<double> out) {
        if (m_mode == GradientMode::analytic)
            return m_eval.gradient(x, out);
        return central_difference_gradient([&](std::span<const double> p) { return m_eval.value(p); }, x, out,
                                           m_step);
    }
    std::uint64_t gradient_work() const {
        return m_mode == GradientMode::analytic ? m_terms : m_terms * 2 * dimension();
    }

  private:
    TriangleFreeMaEvaluator m_eval;
    GradientMode m_mode;
    double m_step;
    std::uint64_t m_terms;
};

/// p-layer QAOA on the dense simulator; x = (beta_1, gamma_1, ..., beta_p, gamma_p).
class StatevectorQaoaObjective {
  public:
    StatevectorQaoaObjective(const Graph& g, int layers, double fd_step)
        : m_sim(g), m_layers(layers), m_step(fd_step), m_gammas(static_cast<std::size_t>(layers)),
          m_betas(static_cast<std::size_t>(layers)) {}
    std::size_t dimension() const { return 2 * static_cast<std::size_t>(m_layers); }
    double value(std::span<const double> x) {
        for (int l = 0; l < m_layers; ++l) {
            m_betas[l] = x[2 * l];
            m_gammas[l] = x[2 * l + 1];
        }
        m_sim.prepare_shared(m_gammas, m_betas);
        return m_sim.expectation();
    }
    double gradient(std::span<const double> x, std::span<double> out) {
        return central_difference_gradient([&](std::span<const double> p) { return value(p); }, x, out, m_step);
    }
    std::uint64_t gradient_work() const {
        return (2 * dimension() + 1) * m_sim.cuts().size() * static_cast<std::uint64_t>(m_layers);
    }

  private:
    QaoaSimulator m_sim;
    int m_layers;
    double m_step;
    std::vector<double> m_gammas, m_betas;
};

/// p-layer multi-angle QAOA on the dense simulator; flat angle layout.
class StatevectorMaObjective {
  public:
    StatevectorMaObjective(const Graph& g, int layers, double fd_step)
        : m_sim(g), m_graph(&g), m_layers(layers), m_step(fd_step) {}
    std::size_t dimension() const {
        return static_cast<std::size_t>(m_layers) * (m_graph->num_vertices() + m_graph->num_edges());
    }
    double value(std::span<const double> x) {
        m_sim.prepare(AngleAssignment::unflatten(x, m_graph->num_vertices(), m_graph->num_edges(), m_layers));
        return m_sim.expectation();
    }
    double gradient(std::span<const double> x, std::span<double> out) {
        return central_difference_gradient([&](std::span<const double> p) { return value(p); }, x, out, m_step);
    }
    std::uint64_t gradient_work() const {
        return (2 * dimension() + 1) * m_sim.cuts().size() * static_cast<std::uint64_t>(m_layers);
    }

  private:
    QaoaSimulator m_sim;
    const Graph* m_graph;
    int m_layers;
    double m_step;
};

// ---------------------------------------------------------------------------
// Multi-start driver
// ---------------------------------------------------------------------------

namespace detail {

struct SeedRun {
    BfgsResult bfgs;
    bool aborted = false;
};

/// kinds[i] is true for gamma entries, false for beta entries.
inline std::vector<double> sample_start(const std::vector<char>& kinds, const OptimizerConfig& cfg, Rng& rng) {
    std::vector<double> x(kinds.size());
    for (std::size_t i = 0; i < kinds.size(); ++i)
        x[i] = kinds[i] ? uniform_real(rng, cfg.gamma_low, cfg.gamma_high)
                        : uniform_real(rng, cfg.beta_low, cfg.beta_high);
    return x;
}

struct MultiStartOutcome {
    std::vector<SeedRun> runs;
    int best = -1;
    std::uint64_t work = 0;
};

/// Runs cfg.seeds random starts (plus any warm starts, appended in order)
/// and picks the best finite result; ties go to the lower seed index.
template <typename Factory>
MultiStartOutcome multistart(Factory&& make_objective, const std::vector<char>& kinds, const OptimizerConfig& cfg,
                             const std::vector<std::vector<double>>& warm_starts) {
    const std::size_t total = static_cast<std::size_t>(cfg.seeds) + warm_starts.size();
    MultiStartOutcome out;
    out.runs.resize(total);
    std::vector<std::uint64_t> work(total, 0);
    const BfgsOptions opts = cfg.bfgs();

    parallel_for(total, cfg.threads, [&](std::size_t k) {
        auto objective = make_objective();
        std::vector<double> start;
        if (k < static_cast<std::size_t>(cfg.seeds)) {
            Rng rng = make_rng(derive_seed(cfg.master_seed, "start", k));
            start = sample_start(kinds, cfg, rng);
        } else {
            start = warm_starts[k - static_cast<std::size_t>(cfg.seeds)];
        }
        auto r = bfgs_maximize(objective, std::move(start), opts);
        out.runs[k].aborted = r.status == BfgsStatus::non_finite;
        work[k] = r.gradient_calls * objective.gradient_work() + r.matrix_ops;
        out.runs[k].bfgs = std::move(r);
    });

    for (std::size_t k = 0; k < total; ++k) {
        out.work += work[k];
        if (out.runs[k].aborted)
            continue;
        if (out.best < 0 || out.runs[k].bfgs.value > out.runs[out.best].bfgs.value)
            out.best = static_cast<int>(k);
    }
    return out;
}

inline void fill_result(OptimizationResult& res, const Graph& g, const MultiStartOutcome& ms,
                        const OptimizerConfig& cfg, std::optional<int> c_max) {
    res.c_max = c_max ? *c_max : maxcut(g).value;
    res.seeds_used = static_cast<int>(ms.runs.size());
    res.best_seed = ms.best;
    res.work = ms.work;
    res.zero_threshold = cfg.zero_threshold;
    for (const auto& r : ms.runs) {
        res.iterations.push_back(r.bfgs.iterations);
        res.aborted_seeds += r.aborted;
        if (cfg.keep_traces)
            res.traces.push_back(r.bfgs.trace);
    }
    if (ms.best < 0)
        throw std::runtime_error("every optimizer seed produced a non-finite objective");
    res.best_value = ms.runs[ms.best].bfgs.value;
    res.approximation_ratio = res.c_max > 0 ? res.best_value / res.c_max : 1.0;
    auto [zb, zg] = count_zero_angles(res.best_angles, cfg.zero_threshold);
    res.zero_beta_count = zb;
    res.zero_gamma_count = zg;
}

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

} // namespace detail

/// Plain QAOA flat layout helpers: (beta_1, gamma_1, ..., beta_p, gamma_p).
inline std::vector<double> qaoa_flat(const AngleAssignment& shared) {
    std::vector<double> x;
    for (int l = 0; l < shared.layers(); ++l) {
        x.push_back(shared.beta[l].empty() ? 0.0 : shared.beta[l].front());
        x.push_back(shared.gamma[l].empty() ? 0.0 : shared.gamma[l].front());
    }
    return x;
}

inline AngleAssignment qaoa_unflat(const Graph& g, std::span<const double> x) {
    std::vector<double> gam, bet;
    for (std::size_t l = 0; l + 1 < x.size(); l += 2) {
        bet.push_back(x[l]);
        gam.push_back(x[l + 1]);
    }
    return AngleAssignment::shared(g.num_vertices(), g.num_edges(), gam, bet);
}

/// Best-of-seeds maximization of plain p-layer QAOA.
///
/// The analytic backend covers p = 1 only. warm_starts are extra starting
/// points in the (beta_1, gamma_1, ...) layout, run after the random seeds.
inline OptimizationResult optimize_qaoa(const Graph& g, int layers, const OptimizerConfig& cfg, Backend backend,
                                        std::optional<int> c_max = std::nullopt,
                                        const std::vector<std::vector<double>>& warm_starts = {}) {
    cfg.validate();
    if (layers < 1)
        throw DomainError("layers must be >= 1");
    if (backend == Backend::analytic && layers != 1)
        throw BackendError("analytic backend supports plain QAOA with p = 1 only (got p = " +
                           std::to_string(layers) + ")");
    if (backend == Backend::statevector && g.num_vertices() > kMaxQubits)
        throw BackendError("statevector backend limited to " + std::to_string(kMaxQubits) + " vertices");
    for (const auto& w : warm_starts)
        if (w.size() != 2 * static_cast<std::size_t>(layers))
            throw DomainError("warm start has wrong length for p = " + std::to_string(layers));

    const auto t0 = std::chrono::steady_clock::now();
    std::vector<char> kinds;
    for (int l = 0; l < layers; ++l) {
        kinds.push_back(0);
        kinds.push_back(1);
    }
    detail::MultiStartOutcome ms;
    if (backend == Backend::analytic)
        ms = detail::multistart([&] { return Qaoa1AnalyticObjective(g, cfg.fd_step); }, kinds, cfg, warm_starts);
    else
        ms = detail::multistart([&] { return StatevectorQaoaObjective(g, layers, cfg.fd_step); }, kinds, cfg,
                                warm_starts);

    OptimizationResult res;
    res.ansatz = "qaoa";
    res.layers = layers;
    res.backend = backend;
    if (ms.best >= 0)
        res.best_angles = qaoa_unflat(g, ms.runs[ms.best].bfgs.x);
    detail::fill_result(res, g, ms, cfg, c_max);
    res.seconds = detail::seconds_since(t0);
    return res;
}

/// Best-of-seeds maximization of multi-angle QAOA over all n + m angles per
/// layer. The analytic backend needs p = 1 and a triangle-free graph.
inline OptimizationResult optimize_ma_qaoa(const Graph& g, const OptimizerConfig& cfg, Backend backend,
                                           std::optional<int> c_max = std::nullopt,
                                           const std::vector<AngleAssignment>& warm_starts = {}, int layers = 1) {
    cfg.validate();
    if (layers < 1)
        throw DomainError("layers must be >= 1");
    if (backend == Backend::analytic) {
        if (layers != 1)
            throw BackendError("analytic multi-angle backend supports p = 1 only");
        if (!is_triangle_free(g))
            throw BackendError("analytic multi-angle backend needs a triangle-free graph");
    }
    if (backend == Backend::statevector && g.num_vertices() > kMaxQubits)
        throw BackendError("statevector backend limited to " + std::to_string(kMaxQubits) + " vertices");

    std::vector<std::vector<double>> starts;
    for (const auto& w : warm_starts) {
        w.check(g);
        if (w.layers() != layers)
            throw DomainError("warm start has " + std::to_string(w.layers()) + " layers, expected " +
                              std::to_string(layers));
        starts.push_back(w.flatten());
    }

    const auto t0 = std::chrono::steady_clock::now();
    std::vector<char> kinds;
    for (int l = 0; l < layers; ++l) {
        kinds.insert(kinds.end(), static_cast<std::size_t>(g.num_vertices()), 0);
        kinds.insert(kinds.end(), static_cast<std::size_t>(g.num_edges()), 1);
    }
    detail::MultiStartOutcome ms;
    if (backend == Backend::analytic)
        ms = detail::multistart([&] { return MaAnalyticObjective(g, cfg.gradient, cfg.fd_step); }, kinds, cfg, starts);
    else
        ms = detail::multistart([&] { return StatevectorMaObjective(g, layers, cfg.fd_step); }, kinds, cfg, starts);

    OptimizationResult res;
    res.ansatz = "ma";
    res.layers = layers;
    res.backend = backend;
    if (ms.best >= 0)
        res.best_angles =
            AngleAssignment::unflatten(ms.runs[ms.best].bfgs.x, g.num_vertices(), g.num_edges(), layers);
    detail::fill_result(res, g, ms, cfg, c_max);
    res.seconds = detail::seconds_since(t0);
    return res;
}

/// Broadcasts optimized plain-QAOA angles into a multi-angle starting point.
inline AngleAssignment warm_start_from_qaoa(const Graph& g, const OptimizationResult& qaoa_result) {
    if (qaoa_result.ansatz != "qaoa")
        throw DomainError("warm start needs a plain QAOA result");
    qaoa_result.best_angles.check(g);
    auto x = qaoa_flat(qaoa_result.best_angles);
    return qaoa_unflat(g, x);
}

/// (beta, gamma) layout of a p-layer result extended by an identity layer,
/// a starting point for p + 1 layers that reproduces the p-layer value.
inline std::vector<double> extend_with_identity_layer(const OptimizationResult& qaoa_result) {
    auto x = qaoa_flat(qaoa_result.best_angles);
    x.push_back(0.0);
    x.push_back(0.0);
    return x;
}

// ---------------------------------------------------------------------------
// JSON: {graph_id, ansatz, p, backend, best_value, c_max, ar,
//        angles:{beta:[[...]...], gamma:[[...]...]}, zero_counts, seeds, ...}
// ---------------------------------------------------------------------------

inline nlohmann::json to_json(const OptimizationResult& r, const std::string& graph_id) {
    nlohmann::json j;
    j["graph_id"] = graph_id;
    j["ansatz"] = r.ansatz;
    j["p"] = r.layers;
    j["backend"] = to_string(r.backend);
    j["best_value"] = r.best_value;
    j["c_max"] = r.c_max;
    j["ar"] = r.approximation_ratio;
    j["angles"] = {{"beta", r.best_angles.beta}, {"gamma", r.best_angles.gamma}};
    j["zero_counts"] = {{"beta", r.zero_beta_count}, {"gamma", r.zero_gamma_count}, {"threshold", r.zero_threshold}};
    j["seeds"] = r.seeds_used;
    j["best_seed"] = r.best_seed;
    j["aborted_seeds"] = r.aborted_seeds;
    j["iterations"] = r.iterations;
    j["seconds"] = r.seconds;
    j["work"] = r.work;
    if (!r.traces.empty())
        j["traces"] = r.traces;
    return j;
}

inline OptimizationResult result_from_json(const nlohmann::json& j) {
    OptimizationResult r;
    r.ansatz = j.at("ansatz").get<std::string>();
    r.layers = j.at("p").get<int>();
    r.backend = parse_backend(j.value("backend", std::string("analytic")));
    r.best_value = j.at("best_value").get<double>();
    r.c_max = j.at("c_max").get<double>();
    r.approximation_ratio = j.at("ar").get<double>();
    r.best_angles.beta = j.at("angles").at("beta").get<std::vector<std::vector<double>>>();
    r.best_angles.gamma = j.at("angles").at("gamma").get<std::vector<std::vector<double>>>();
    r.zero_beta_count = j.at("zero_counts").at("beta").get<int>();
    r.zero_gamma_count = j.at("zero_counts").at("gamma").get<int>();
    r.zero_threshold = j.at("zero_counts").value("threshold", 0.0);
    r.seeds_used = j.at("seeds").get<int>();
    r.best_seed = j.value("best_seed", -1);
    r.aborted_seeds = j.value("aborted_seeds", 0);
    r.iterations = j.value("iterations", std::vector<int>{});
    r.seconds = j.value("seconds", 0.0);
    r.work = j.value("work", std::uint64_t{0});
    if (j.contains("traces"))
        r.traces = j.at("traces").get<std::vector<std::vector<double>>>();
    return r;
}

} // namespace maqaoa
