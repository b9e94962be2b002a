#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "analytic.hpp"
#include "errors.hpp"
#include "generators.hpp"
#include "graph.hpp"
#include "maxcut.hpp"
#include "optimizer.hpp"
#include "parallel.hpp"
#include "random.hpp"
#include "statevector.hpp"

namespace maqaoa {

inline constexpr const char* kToolVersion = "0.3.0";

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Small file helpers
// ---------------------------------------------------------------------------

inline std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad())
        throw IoError("read failed: " + path.string());
    return ss.str();
}

/// Writes to a sibling temp file and renames it over the target, so readers
/// never see a partial file.
inline void write_file_atomic(const fs::path& path, const std::string& content) {
    static std::atomic<unsigned> counter{0};
    fs::path tmp = path;
    tmp += ".tmp." + std::to_string(counter.fetch_add(1));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw IoError("cannot create " + tmp.string());
        out << content;
        out.flush();
        if (!out)
            throw IoError("write failed: " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw IoError("cannot rename into " + path.string());
    }
}

inline void ensure_directory(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir))
        throw IoError("cannot create directory " + dir.string());
}

// ---------------------------------------------------------------------------
// Graph sources: an edge-list file, a directory of them, or a generator
// descriptor such as "regular:n=50,degree=3,count=100".
// ---------------------------------------------------------------------------

struct GraphItem {
    std::string id;
    Graph graph;
    std::optional<std::uint64_t> seed;
    std::string generator;
};

struct GeneratorSpec {
    std::string kind;
    std::map<std::string, std::string> params;

    bool has(const std::string& k) const { return params.count(k) != 0; }

    double number(const std::string& k) const {
        auto it = params.find(k);
        if (it == params.end())
            throw ParseError(0, "generator '" + kind + "' needs parameter '" + k + "'");
        try {
            std::size_t used = 0;
            const double v = std::stod(it->second, &used);
            if (used != it->second.size())
                throw std::invalid_argument(k);
            return v;
        } catch (const std::exception&) {
            throw ParseError(0, "generator parameter " + k + "='" + it->second + "' is not a number");
        }
    }

    int integer(const std::string& k) const {
        const double v = number(k);
        if (v != std::floor(v) || std::abs(v) > 1e9)
            throw ParseError(0, "generator parameter " + k + " must be an integer");
        return static_cast<int>(v);
    }

    int integer(const std::string& k, int fallback) const { return has(k) ? integer(k) : fallback; }
};

inline GeneratorSpec parse_generator_spec(const std::string& text) {
    GeneratorSpec g;
    const auto colon = text.find(':');
    g.kind = text.substr(0, colon);
    if (g.kind.empty())
        throw ParseError(0, "empty generator kind in '" + text + "'");
    if (colon == std::string::npos)
        return g;
    std::stringstream ss(text.substr(colon + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty())
            continue;
        const auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0)
            throw ParseError(0, "generator parameter '" + item + "' is not key=value");
        g.params[item.substr(0, eq)] = item.substr(eq + 1);
    }
    return g;
}

inline std::string pad_index(int i, int width = 4) {
    std::string s = std::to_string(i);
    if (static_cast<int>(s.size()) < width)
        s.insert(0, static_cast<std::size_t>(width) - s.size(), '0');
    return s;
}

/// Graphs named by a generator descriptor. Graph i is drawn from
/// derive_seed(seed, kind, i), where seed defaults to master_seed.
inline std::vector<GraphItem> generate_graphs(const GeneratorSpec& spec, std::uint64_t master_seed) {
    static const std::map<std::string, std::vector<std::string>> known = {
        {"regular", {"n", "degree", "count", "seed"}},
        {"gnp-tf", {"n", "p", "count", "seed"}},
        {"gnp-connected", {"n", "p", "count", "seed"}},
        {"gnp", {"n", "p", "count", "seed"}},
        {"star", {"n"}},
        {"cycle", {"n"}},
        {"complete", {"n"}},
    };
    auto k = known.find(spec.kind);
    if (k == known.end())
        throw ParseError(0, "unknown generator '" + spec.kind +
                                "' (regular, gnp-tf, gnp-connected, gnp, star, cycle, complete)");
    for (const auto& [key, value] : spec.params)
        if (std::find(k->second.begin(), k->second.end(), key) == k->second.end())
            throw ParseError(0, "generator '" + spec.kind + "' does not take parameter '" + key + "'");

    const int n = spec.integer("n");
    std::vector<GraphItem> out;
    if (spec.kind == "star" || spec.kind == "cycle" || spec.kind == "complete") {
        Graph g = spec.kind == "star" ? star_graph(n) : spec.kind == "cycle" ? cycle_graph(n) : complete_graph(n);
        out.push_back({spec.kind + "-n" + std::to_string(n), std::move(g), std::nullopt, spec.kind});
        return out;
    }

    const int count = spec.integer("count", 1);
    if (count < 0)
        throw DomainError("graph count must be >= 0");
    const std::uint64_t base = spec.has("seed") ? static_cast<std::uint64_t>(spec.integer("seed")) : master_seed;
    std::string desc = spec.kind + ":n=" + std::to_string(n);
    std::string prefix = spec.kind + "-n" + std::to_string(n);
    int degree = 0;
    double p = 0.0;
    if (spec.kind == "regular") {
        degree = spec.integer("degree");
        desc += ",degree=" + std::to_string(degree);
        prefix += "-d" + std::to_string(degree);
    } else {
        p = spec.number("p");
        desc += ",p=" + spec.params.at("p");
    }
    for (int i = 0; i < count; ++i) {
        const std::uint64_t seed = derive_seed(base, spec.kind, static_cast<std::uint64_t>(i));
        std::optional<Graph> g;
        if (spec.kind == "regular")
            g = random_regular_triangle_free(n, degree, seed);
        else if (spec.kind == "gnp-tf")
            g = random_gnp_triangle_stripped(n, p, seed);
        else if (spec.kind == "gnp-connected")
            g = random_gnp_connected(n, p, seed);
        else {
            Rng rng = make_rng(seed);
            g = random_gnp(n, p, rng);
        }
        out.push_back({prefix + "-" + pad_index(i), std::move(*g), seed, desc});
    }
    return out;
}

inline bool is_edge_list_file(const fs::path& p) {
    const auto ext = p.extension().string();
    return ext == ".txt" || ext == ".edges" || ext == ".el";
}

/// Resolves --graphs: an existing directory (every *.txt/*.edges/*.el file,
/// sorted by name, id = file stem), an existing file, or a generator descriptor.
inline std::vector<GraphItem> load_graph_source(const std::string& descriptor, std::uint64_t master_seed) {
    std::error_code ec;
    const fs::path path(descriptor);
    if (fs::is_directory(path, ec)) {
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(path))
            if (entry.is_regular_file() && is_edge_list_file(entry.path()))
                files.push_back(entry.path());
        std::sort(files.begin(), files.end());
        std::vector<GraphItem> out;
        for (const auto& f : files) {
            try {
                out.push_back({f.stem().string(), parse_edge_list(read_file(f)), std::nullopt, "file"});
            } catch (const ParseError& e) {
                throw ParseError(e.line(), f.string() + ": " + e.what());
            }
        }
        return out;
    }
    if (fs::is_regular_file(path, ec)) {
        try {
            return {{path.stem().string(), parse_edge_list(read_file(path)), std::nullopt, "file"}};
        } catch (const ParseError& e) {
            throw ParseError(e.line(), path.string() + ": " + e.what());
        }
    }
    if (descriptor.find(':') == std::string::npos && descriptor.find('/') != std::string::npos)
        throw IoError("no such file or directory: " + descriptor);
    return generate_graphs(parse_generator_spec(descriptor), master_seed);
}

// ---------------------------------------------------------------------------
// Experiment description
// ---------------------------------------------------------------------------

/// "qaoa:p", "ma" or "ma:p", optionally followed by "@seeds".
struct AnsatzSpec {
    std::string kind = "qaoa";
    int layers = 1;
    std::optional<int> seeds;

    std::string label() const {
        if (kind == "ma")
            return layers == 1 ? "ma" : "ma:" + std::to_string(layers);
        return "qaoa:" + std::to_string(layers);
    }
};

inline AnsatzSpec parse_ansatz(const std::string& token) {
    AnsatzSpec a;
    std::string body = token;
    if (const auto at = body.find('@'); at != std::string::npos) {
        const std::string count = body.substr(at + 1);
        body = body.substr(0, at);
        try {
            std::size_t used = 0;
            a.seeds = std::stoi(count, &used);
            if (used != count.size() || *a.seeds < 1)
                throw std::invalid_argument(count);
        } catch (const std::exception&) {
            throw ParseError(0, "bad seed count in ansatz '" + token + "'");
        }
    }
    const auto colon = body.find(':');
    a.kind = body.substr(0, colon);
    if (a.kind != "qaoa" && a.kind != "ma")
        throw ParseError(0, "unknown ansatz '" + token + "' (expected qaoa:p or ma)");
    if (colon == std::string::npos) {
        if (a.kind == "qaoa")
            throw ParseError(0, "ansatz 'qaoa' needs a layer count, e.g. qaoa:1");
        return a;
    }
    try {
        std::size_t used = 0;
        const std::string p = body.substr(colon + 1);
        a.layers = std::stoi(p, &used);
        if (used != p.size() || a.layers < 1)
            throw std::invalid_argument(p);
    } catch (const std::exception&) {
        throw ParseError(0, "bad layer count in ansatz '" + token + "'");
    }
    return a;
}

/// Comma-separated ansatz list.
inline std::vector<AnsatzSpec> parse_ansatz_list(const std::string& text) {
    std::vector<AnsatzSpec> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty())
            out.push_back(parse_ansatz(item));
    return out;
}

struct ExperimentSpec {
    std::string graphs;
    std::vector<AnsatzSpec> ansatzes;
    OptimizerConfig optimizer;
    Backend backend = Backend::analytic;
    fs::path out = "out";
    int threads = 1;
    bool warm_start = true; // ma from qaoa:1, qaoa:p+1 from qaoa:p

    /// Fields that determine the results; excludes out and threads.
    nlohmann::json identity() const {
        nlohmann::json a = nlohmann::json::array();
        for (const auto& s : ansatzes)
            a.push_back({{"label", s.label()}, {"seeds", s.seeds.value_or(optimizer.seeds)}});
        const auto& c = optimizer;
        return {{"graphs", graphs},
                {"ansatzes", a},
                {"backend", to_string(backend)},
                {"warm_start", warm_start},
                {"optimizer",
                 {{"gradient", c.gradient == GradientMode::analytic ? "analytic" : "finite_difference"},
                  {"fd_step", c.fd_step},
                  {"gradient_tolerance", c.gradient_tolerance},
                  {"value_tolerance", c.value_tolerance},
                  {"max_iterations", c.max_iterations},
                  {"gamma_range", {c.gamma_low, c.gamma_high}},
                  {"beta_range", {c.beta_low, c.beta_high}},
                  {"zero_threshold", c.zero_threshold},
                  {"master_seed", c.master_seed},
                  {"traces", c.keep_traces}}}};
    }

    std::string hash() const {
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(identity().dump())));
        return buf;
    }

    void validate() const {
        optimizer.validate();
        if (ansatzes.empty())
            throw DomainError("no ansatz requested");
        if (threads < 1)
            throw DomainError("threads must be >= 1");
        for (const auto& a : ansatzes)
            if (backend == Backend::analytic && a.layers != 1)
                throw BackendError("analytic backend cannot run " + a.label() + " (p = 1 only)");
    }
};

/// Execution order: plain QAOA by depth, then multi-angle, so warm starts
/// are available when they are needed.
inline std::vector<AnsatzSpec> execution_order(std::vector<AnsatzSpec> a) {
    std::stable_sort(a.begin(), a.end(), [](const AnsatzSpec& x, const AnsatzSpec& y) {
        if (x.kind != y.kind)
            return x.kind == "qaoa";
        return x.layers < y.layers;
    });
    return a;
}

// ---------------------------------------------------------------------------
// Records
// ---------------------------------------------------------------------------

struct GraphRecord {
    std::string id;
    int n = 0;
    int m = 0;
    double c_max = 0.0;
    nlohmann::json metadata;
    std::vector<OptimizationResult> results;

    const OptimizationResult* find(const std::string& label) const {
        for (const auto& r : results)
            if (r.label() == label)
                return &r;
        return nullptr;
    }
};

struct AnsatzSummary {
    std::string label;
    int graphs = 0;
    double mean_ar = 0.0;
    double std_ar = 0.0; // population
    double min_ar = 0.0;
    double max_ar = 0.0;
    double mean_value = 0.0;
    double zero_beta_pct = 0.0;  // of all vertex angles
    double zero_gamma_pct = 0.0; // of all edge angles
    double mean_iterations = 0.0; // over every seed of every graph
};

struct RunRecord {
    std::string spec_hash;
    std::string tool_version = kToolVersion;
    std::vector<GraphRecord> graphs;
    std::vector<AnsatzSummary> summary;
    int computed = 0;
    int resumed = 0;
    double wall_seconds = 0.0;
};

inline nlohmann::json to_json(const GraphRecord& r, const std::string& spec_hash) {
    nlohmann::json res = nlohmann::json::array();
    for (const auto& x : r.results)
        res.push_back(to_json(x, r.id));
    return {{"graph_id", r.id}, {"spec_hash", spec_hash}, {"tool_version", kToolVersion},
            {"graph", r.metadata}, {"c_max", r.c_max},   {"results", res}};
}

inline GraphRecord graph_record_from_json(const nlohmann::json& j) {
    GraphRecord r;
    r.id = j.at("graph_id").get<std::string>();
    r.metadata = j.at("graph");
    r.n = r.metadata.at("n").get<int>();
    r.m = r.metadata.at("m").get<int>();
    r.c_max = j.at("c_max").get<double>();
    for (const auto& x : j.at("results"))
        r.results.push_back(result_from_json(x));
    return r;
}

/// Mean, population standard deviation and range of each ansatz, in the
/// order the ansatzes first appear.
inline std::vector<AnsatzSummary> summarize(const std::vector<GraphRecord>& records) {
    std::vector<AnsatzSummary> out;
    std::map<std::string, std::size_t> index;
    std::vector<double> sum_n, sum_m, sum_iter, count_iter;
    std::vector<std::vector<double>> ars;
    for (const auto& g : records)
        for (const auto& r : g.results) {
            const std::string label = r.label();
            auto it = index.find(label);
            if (it == index.end()) {
                it = index.emplace(label, out.size()).first;
                out.push_back({});
                out.back().label = label;
                sum_n.push_back(0);
                sum_m.push_back(0);
                sum_iter.push_back(0);
                count_iter.push_back(0);
                ars.emplace_back();
            }
            const std::size_t k = it->second;
            auto& s = out[k];
            ++s.graphs;
            ars[k].push_back(r.approximation_ratio);
            s.mean_value += r.best_value;
            s.zero_beta_pct += r.zero_beta_count;
            s.zero_gamma_pct += r.zero_gamma_count;
            sum_n[k] += static_cast<double>(g.n) * r.layers;
            sum_m[k] += static_cast<double>(g.m) * r.layers;
            for (int i : r.iterations) {
                sum_iter[k] += i;
                count_iter[k] += 1;
            }
        }
    for (std::size_t k = 0; k < out.size(); ++k) {
        auto& s = out[k];
        const auto& a = ars[k];
        double mean = 0.0;
        for (double v : a)
            mean += v;
        mean /= static_cast<double>(a.size());
        double var = 0.0;
        for (double v : a)
            var += (v - mean) * (v - mean);
        s.mean_ar = mean;
        s.std_ar = std::sqrt(var / static_cast<double>(a.size()));
        s.min_ar = *std::min_element(a.begin(), a.end());
        s.max_ar = *std::max_element(a.begin(), a.end());
        s.mean_value /= s.graphs;
        s.zero_beta_pct = sum_n[k] > 0 ? 100.0 * s.zero_beta_pct / sum_n[k] : 0.0;
        s.zero_gamma_pct = sum_m[k] > 0 ? 100.0 * s.zero_gamma_pct / sum_m[k] : 0.0;
        s.mean_iterations = count_iter[k] > 0 ? sum_iter[k] / count_iter[k] : 0.0;
    }
    return out;
}

// ---------------------------------------------------------------------------
// CSV output. Doubles print with %.10g so equal inputs give equal bytes.
// ---------------------------------------------------------------------------

inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

/// graph_id, ansatz, value, c_max, ar, zero_beta, zero_gamma, iterations, seconds.
/// iterations is the BFGS iteration count of the winning seed.
inline void write_results_csv(std::ostream& os, const std::vector<GraphRecord>& records, bool with_seconds = true) {
    os << "graph_id,ansatz,value,c_max,ar,zero_beta,zero_gamma,iterations";
    os << (with_seconds ? ",seconds\n" : "\n");
    for (const auto& g : records)
        for (const auto& r : g.results) {
            const int it = r.best_seed >= 0 && r.best_seed < static_cast<int>(r.iterations.size())
                               ? r.iterations[static_cast<std::size_t>(r.best_seed)]
                               : 0;
            os << g.id << ',' << r.label() << ',' << fmt(r.best_value) << ',' << fmt(r.c_max) << ','
               << fmt(r.approximation_ratio) << ',' << r.zero_beta_count << ',' << r.zero_gamma_count << ',' << it;
            if (with_seconds)
                os << ',' << fmt(r.seconds);
            os << '\n';
        }
}

inline void write_summary_csv(std::ostream& os, const std::vector<AnsatzSummary>& rows) {
    os << "ansatz,graphs,mean_ar,std_ar,min_ar,max_ar,mean_value,zero_beta_pct,zero_gamma_pct,mean_iterations\n";
    for (const auto& s : rows)
        os << s.label << ',' << s.graphs << ',' << fmt(s.mean_ar) << ',' << fmt(s.std_ar) << ',' << fmt(s.min_ar)
           << ',' << fmt(s.max_ar) << ',' << fmt(s.mean_value) << ',' << fmt(s.zero_beta_pct) << ','
           << fmt(s.zero_gamma_pct) << ',' << fmt(s.mean_iterations) << '\n';
}

// ---------------------------------------------------------------------------
// Ensemble runner
// ---------------------------------------------------------------------------

/// Checks every (graph, ansatz) pair against the backend before any work.
inline void precheck(const ExperimentSpec& spec, const std::vector<GraphItem>& graphs) {
    for (const auto& item : graphs) {
        if (spec.backend == Backend::statevector && item.graph.num_vertices() > kMaxQubits)
            throw BackendError("graph " + item.id + " has " + std::to_string(item.graph.num_vertices()) +
                               " vertices; the statevector backend allows " + std::to_string(kMaxQubits));
        for (const auto& a : spec.ansatzes)
            if (spec.backend == Backend::analytic && a.kind == "ma" && !is_triangle_free(item.graph))
                throw BackendError("graph " + item.id +
                                   " has triangles; the analytic multi-angle backend needs triangle-free graphs");
    }
}

/// Optimizer seed of one (graph, ansatz) cell.
inline std::uint64_t cell_seed(std::uint64_t master, const std::string& graph_id, const std::string& label) {
    return derive_seed(derive_seed(master, "graph:" + graph_id, 0), label, 0);
}

/// Runs every ansatz on one graph.
inline GraphRecord run_graph(const ExperimentSpec& spec, const GraphItem& item, int optimizer_threads) {
    GraphRecord rec;
    rec.id = item.id;
    rec.n = item.graph.num_vertices();
    rec.m = item.graph.num_edges();
    rec.metadata = graph_metadata(item.graph, item.seed, item.generator);
    rec.metadata["edges"] = nlohmann::json::array();
    for (const auto& e : item.graph.edges())
        rec.metadata["edges"].push_back({e.u, e.v});
    const int c_max = maxcut(item.graph).value;
    rec.c_max = c_max;

    std::map<int, const OptimizationResult*> qaoa_by_depth;
    std::vector<OptimizationResult> done;
    done.reserve(spec.ansatzes.size());
    for (const auto& a : execution_order(spec.ansatzes)) {
        OptimizerConfig cfg = spec.optimizer;
        cfg.seeds = a.seeds.value_or(spec.optimizer.seeds);
        cfg.master_seed = cell_seed(spec.optimizer.master_seed, item.id, a.label());
        cfg.threads = optimizer_threads;
        if (a.kind == "qaoa") {
            std::vector<std::vector<double>> warm;
            if (spec.warm_start && qaoa_by_depth.count(a.layers - 1))
                warm.push_back(extend_with_identity_layer(*qaoa_by_depth.at(a.layers - 1)));
            done.push_back(optimize_qaoa(item.graph, a.layers, cfg, spec.backend, c_max, warm));
            qaoa_by_depth[a.layers] = &done.back();
        } else {
            std::vector<AngleAssignment> warm;
            if (spec.warm_start && a.layers == 1 && qaoa_by_depth.count(1))
                warm.push_back(warm_start_from_qaoa(item.graph, *qaoa_by_depth.at(1)));
            done.push_back(optimize_ma_qaoa(item.graph, cfg, spec.backend, c_max, warm, a.layers));
        }
    }
    // store in the order the ansatzes were requested
    for (const auto& a : spec.ansatzes)
        for (auto& r : done)
            if (r.label() == a.label() && !rec.find(a.label()))
                rec.results.push_back(r);
    return rec;
}

/// Loads a persisted record if it belongs to this spec and is complete.
inline std::optional<GraphRecord> try_resume(const fs::path& path, const ExperimentSpec& spec,
                                             const std::string& hash) {
    std::error_code ec;
    if (!fs::is_regular_file(path, ec))
        return std::nullopt;
    try {
        const auto j = nlohmann::json::parse(read_file(path));
        if (j.at("spec_hash").get<std::string>() != hash)
            return std::nullopt;
        auto rec = graph_record_from_json(j);
        for (const auto& a : spec.ansatzes)
            if (!rec.find(a.label()))
                return std::nullopt;
        return rec;
    } catch (const std::exception&) {
        return std::nullopt; // unreadable or truncated: recompute
    }
}

using ProgressFn = std::function<void(const std::string&)>;

/// Generates or loads the graphs, runs every ansatz on each, persists one
/// JSON per graph under out/graphs and writes results.csv, summary.csv and
/// run.json. Graph records already on disk for the same spec are reused.
inline RunRecord run_ensemble(const ExperimentSpec& spec, const ProgressFn& progress = {}) {
    spec.validate();
    const auto t0 = std::chrono::steady_clock::now();
    const auto graphs = load_graph_source(spec.graphs, spec.optimizer.master_seed);
    precheck(spec, graphs);

    RunRecord run;
    run.spec_hash = spec.hash();
    const fs::path graph_dir = spec.out / "graphs";
    ensure_directory(graph_dir);

    // graph-level workers when there are several graphs, seed-level otherwise
    const bool by_graph = graphs.size() > 1 && spec.threads > 1;
    const int optimizer_threads = by_graph ? 1 : spec.threads;
    run.graphs.resize(graphs.size());
    std::vector<char> resumed(graphs.size(), 0);
    std::mutex log_mutex;
    parallel_for(graphs.size(), by_graph ? spec.threads : 1, [&](std::size_t i) {
        const auto& item = graphs[i];
        const fs::path path = graph_dir / (item.id + ".json");
        if (auto rec = try_resume(path, spec, run.spec_hash)) {
            run.graphs[i] = std::move(*rec);
            resumed[i] = 1;
        } else {
            run.graphs[i] = run_graph(spec, item, optimizer_threads);
            write_file_atomic(path, to_json(run.graphs[i], run.spec_hash).dump(1) + "\n");
        }
        if (progress) {
            std::lock_guard lock(log_mutex);
            std::string line = item.id + (resumed[i] ? " (resumed)" : "");
            for (const auto& r : run.graphs[i].results)
                line += " " + r.label() + "=" + fmt(r.approximation_ratio);
            progress(line);
        }
    });
    for (char r : resumed)
        (r ? run.resumed : run.computed) += 1;

    run.summary = summarize(run.graphs);
    std::ostringstream results, summary;
    write_results_csv(results, run.graphs);
    write_summary_csv(summary, run.summary);
    write_file_atomic(spec.out / "results.csv", results.str());
    write_file_atomic(spec.out / "summary.csv", summary.str());
    run.wall_seconds = detail::seconds_since(t0);

    nlohmann::json j = {{"spec_hash", run.spec_hash},         {"tool_version", run.tool_version},
                        {"spec", spec.identity()},            {"graphs", graphs.size()},
                        {"computed", run.computed},           {"resumed", run.resumed},
                        {"wall_seconds", run.wall_seconds}};
    write_file_atomic(spec.out / "run.json", j.dump(2) + "\n");
    return run;
}

/// Reads every per-graph record in out/graphs, sorted by file name.
inline std::vector<GraphRecord> load_records(const fs::path& out) {
    const fs::path dir = out / "graphs";
    std::error_code ec;
    if (!fs::is_directory(dir, ec))
        throw IoError("no per-graph records in " + dir.string());
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".json")
            files.push_back(e.path());
    std::sort(files.begin(), files.end());
    std::vector<GraphRecord> out_records;
    for (const auto& f : files) {
        try {
            out_records.push_back(graph_record_from_json(nlohmann::json::parse(read_file(f))));
        } catch (const nlohmann::json::exception& e) {
            throw IoError(f.string() + ": " + e.what());
        }
    }
    return out_records;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

struct GapRow {
    std::string qaoa_label;
    std::string ma_label;
    int graphs = 0;
    double mean_ar_qaoa = 0.0;
    double mean_ar_ma = 0.0;
    double delta_ar = 0.0;
    double gap_change_pct = 0.0; // [(1 - AR_q) - (1 - AR_ma)] / (1 - AR_q) on the means
};

inline GapRow report_gap_table(const std::vector<GraphRecord>& records, const std::string& qaoa_label = "qaoa:1",
                               const std::string& ma_label = "ma") {
    GapRow row{qaoa_label, ma_label};
    if (records.empty())
        throw DomainError("gap table needs at least one graph");
    for (const auto& g : records) {
        const auto* q = g.find(qaoa_label);
        const auto* a = g.find(ma_label);
        if (!q || !a)
            throw DomainError("graph " + g.id + " lacks a paired " + (q ? ma_label : qaoa_label) + " result");
        row.mean_ar_qaoa += q->approximation_ratio;
        row.mean_ar_ma += a->approximation_ratio;
        ++row.graphs;
    }
    row.mean_ar_qaoa /= row.graphs;
    row.mean_ar_ma /= row.graphs;
    row.delta_ar = row.mean_ar_ma - row.mean_ar_qaoa;
    const double gap = 1.0 - row.mean_ar_qaoa;
    row.gap_change_pct = gap > 0.0 ? 100.0 * row.delta_ar / gap : 0.0;
    return row;
}

inline void write_gap_csv(std::ostream& os, const std::vector<GapRow>& rows) {
    os << "qaoa,ma,graphs,mean_ar_qaoa,mean_ar_ma,delta_ar,gap_change_pct\n";
    for (const auto& r : rows)
        os << r.qaoa_label << ',' << r.ma_label << ',' << r.graphs << ',' << fmt(r.mean_ar_qaoa) << ','
           << fmt(r.mean_ar_ma) << ',' << fmt(r.delta_ar) << ',' << fmt(r.gap_change_pct) << '\n';
}

struct Distribution {
    std::vector<double> thresholds;
    std::vector<std::string> labels;
    std::vector<std::vector<double>> fractions; // [label][threshold]
};

/// k / steps for k = lo_steps .. steps, e.g. 0.50, 0.51, ..., 1.00.
inline std::vector<double> default_thresholds(int lo_hundredths = 50, int hi_hundredths = 100) {
    std::vector<double> t;
    for (int k = lo_hundredths; k <= hi_hundredths; ++k)
        t.push_back(k / 100.0);
    return t;
}

/// Fraction of graphs whose AR is at least each threshold, per ansatz.
/// A tolerance of 1e-9 absorbs rounding in ratios such as 1 - 1e-16.
inline Distribution report_ar_distribution(const std::vector<GraphRecord>& records,
                                           const std::vector<double>& thresholds) {
    if (records.empty())
        throw DomainError("distribution needs at least one graph");
    Distribution d;
    d.thresholds = thresholds;
    for (const auto& s : summarize(records))
        d.labels.push_back(s.label);
    for (const auto& label : d.labels) {
        std::vector<double> ars;
        for (const auto& g : records)
            if (const auto* r = g.find(label))
                ars.push_back(r->approximation_ratio);
        std::vector<double> f;
        for (double x : thresholds) {
            const auto hits = std::count_if(ars.begin(), ars.end(), [&](double a) { return a >= x - 1e-9; });
            f.push_back(static_cast<double>(hits) / static_cast<double>(ars.size()));
        }
        d.fractions.push_back(std::move(f));
    }
    return d;
}

inline void write_distribution_csv(std::ostream& os, const Distribution& d) {
    os << "threshold";
    for (const auto& l : d.labels)
        os << ',' << l;
    os << '\n';
    for (std::size_t t = 0; t < d.thresholds.size(); ++t) {
        os << fmt(d.thresholds[t]);
        for (const auto& f : d.fractions)
            os << ',' << fmt(f[t]);
        os << '\n';
    }
}

struct Convergence {
    std::vector<std::string> labels;
    std::vector<std::vector<double>> mean_ar; // [label][iteration]
};

/// Mean best-so-far AR per BFGS iteration over every graph and seed. Shorter
/// traces hold their final value; each curve ends at the rounded mean final
/// iteration of its runs.
inline Convergence report_convergence(const std::vector<GraphRecord>& records) {
    Convergence c;
    for (const auto& s : summarize(records))
        c.labels.push_back(s.label);
    for (const auto& label : c.labels) {
        std::vector<std::vector<double>> curves;
        double final_sum = 0.0;
        for (const auto& g : records) {
            const auto* r = g.find(label);
            if (!r)
                continue;
            if (r->traces.empty())
                throw DomainError("graph " + g.id + " has no optimizer traces for " + label +
                                  "; rerun with trace retention enabled (--traces)");
            for (const auto& t : r->traces) {
                std::vector<double> best;
                double hi = -INFINITY;
                for (double v : t) {
                    hi = std::max(hi, v);
                    best.push_back(g.c_max > 0 ? hi / g.c_max : 1.0);
                }
                final_sum += static_cast<double>(t.size()) - 1.0;
                curves.push_back(std::move(best));
            }
        }
        const auto length = static_cast<std::size_t>(std::lround(final_sum / static_cast<double>(curves.size()))) + 1;
        std::vector<double> mean(length, 0.0);
        for (const auto& cv : curves)
            for (std::size_t i = 0; i < length; ++i)
                mean[i] += cv[std::min(i, cv.size() - 1)];
        for (double& v : mean)
            v /= static_cast<double>(curves.size());
        c.mean_ar.push_back(std::move(mean));
    }
    return c;
}

/// Long format: ansatz, iteration, mean_ar.
inline void write_convergence_csv(std::ostream& os, const Convergence& c) {
    os << "ansatz,iteration,mean_ar\n";
    for (std::size_t k = 0; k < c.labels.size(); ++k)
        for (std::size_t i = 0; i < c.mean_ar[k].size(); ++i)
            os << c.labels[k] << ',' << i << ',' << fmt(c.mean_ar[k][i]) << '\n';
}

// ---------------------------------------------------------------------------
// Backend cross-check
// ---------------------------------------------------------------------------

struct ValidationReport {
    int triangle_free_graphs = 0;
    int general_graphs = 0;
    int assignments = 0;
    double max_ma_error = 0.0;    // closed form vs simulator, triangle-free graphs
    double max_qaoa1_error = 0.0; // one-layer formula vs simulator, any graph
};

/// Compares the closed forms with the simulator on random graphs of 3..max_n
/// vertices and random angles; the general graphs always contain a triangle.
inline ValidationReport validate_backends(int graphs, int assignments_per_graph, int max_n, std::uint64_t seed) {
    if (graphs < 0 || assignments_per_graph < 1 || max_n < 3 || max_n > kMaxQubits)
        throw DomainError("validation needs graphs >= 0, assignments >= 1 and 3 <= max_n <= 24");
    ValidationReport rep;
    const double pi = std::numbers::pi;
    for (int i = 0; i < graphs; ++i) {
        Rng rng = make_rng(derive_seed(seed, "validate", static_cast<std::uint64_t>(i)));
        const int n = 3 + static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(max_n - 2)));
        const double p = uniform_real(rng, 0.2, 0.8);
        const Graph tf = random_gnp_triangle_stripped(n, p, rng());
        // redraw until the graph has a triangle, the case the closed form cannot cover
        Graph general = random_gnp(n, p, rng);
        for (int tries = 0; triangle_count(general) == 0; ++tries)
            general = tries < 1000 ? random_gnp(n, p, rng) : complete_graph(n);
        QaoaSimulator sim_tf(tf), sim_general(general);
        for (int k = 0; k < assignments_per_graph; ++k) {
            AngleAssignment a = AngleAssignment::zeros(n, tf.num_edges(), 1);
            for (double& b : a.beta[0])
                b = uniform_real(rng, -pi, pi);
            for (double& g : a.gamma[0])
                g = uniform_real(rng, -pi, pi);
            sim_tf.prepare(a);
            rep.max_ma_error = std::max(rep.max_ma_error, std::abs(ma_total_expectation_tf(tf, a) - sim_tf.expectation()));

            const double gamma = uniform_real(rng, -pi, pi);
            const double beta = uniform_real(rng, -pi, pi);
            const double gv[1] = {gamma}, bv[1] = {beta};
            sim_general.prepare_shared(gv, bv);
            rep.max_qaoa1_error = std::max(
                rep.max_qaoa1_error, std::abs(qaoa1_total_expectation(general, gamma, beta) - sim_general.expectation()));
            ++rep.assignments;
        }
        ++rep.triangle_free_graphs;
        ++rep.general_graphs;
    }
    return rep;
}

} // namespace maqaoa
