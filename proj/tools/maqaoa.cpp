// maqaoa: generate graphs, optimize QAOA / multi-angle QAOA angles, run
// ensembles and turn the persisted records into CSV reports.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include <maqaoa/maqaoa.hpp>

namespace {

using namespace maqaoa;

struct CommonOptions {
    std::string graphs;
    std::string ansatz = "qaoa:1,ma";
    int seeds = 100;
    std::uint64_t master_seed = 0;
    std::string backend = "analytic";
    std::string out = "out";
    int threads = 1;
    bool traces = false;
    bool no_warm_start = false;
    bool fd_gradient = false;
    double zero_threshold = 1e-3;
    int max_iterations = 500;
};

/// MAQAOA_OUT, when set, wins over --out.
std::string resolve_out(const std::string& flag) {
    if (const char* env = std::getenv("MAQAOA_OUT"); env && *env)
        return env;
    return flag;
}

void add_run_flags(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--graphs", o.graphs, "edge-list file, directory of edge lists, or generator spec")->required();
    cmd->add_option("--ansatz", o.ansatz, "comma list of qaoa:p | ma, each optionally @seeds")->capture_default_str();
    cmd->add_option("--seeds", o.seeds, "random starts per ansatz")->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--master-seed", o.master_seed, "root of every derived seed")->capture_default_str();
    cmd->add_option("--backend", o.backend, "analytic | statevector")
        ->capture_default_str()
        ->check(CLI::IsMember({"analytic", "statevector"}));
    cmd->add_option("--threads", o.threads, "worker threads")->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_flag("--traces", o.traces, "keep per-seed BFGS traces");
    cmd->add_flag("--no-warm-start", o.no_warm_start, "random starts only");
    cmd->add_flag("--fd-gradient", o.fd_gradient, "finite differences instead of the analytic gradient");
    cmd->add_option("--zero-threshold", o.zero_threshold, "radians")->capture_default_str();
    cmd->add_option("--max-iterations", o.max_iterations, "BFGS iteration cap")->capture_default_str();
}

ExperimentSpec make_spec(const CommonOptions& o) {
    ExperimentSpec s;
    s.graphs = o.graphs;
    s.ansatzes = parse_ansatz_list(o.ansatz);
    s.optimizer.seeds = o.seeds;
    s.optimizer.master_seed = o.master_seed;
    s.optimizer.keep_traces = o.traces;
    s.optimizer.zero_threshold = o.zero_threshold;
    s.optimizer.max_iterations = o.max_iterations;
    s.optimizer.gradient = o.fd_gradient ? GradientMode::finite_difference : GradientMode::analytic;
    s.backend = parse_backend(o.backend);
    s.out = resolve_out(o.out);
    s.threads = o.threads;
    s.warm_start = !o.no_warm_start;
    return s;
}

int cmd_generate(const std::string& graphs, const std::string& out_flag, std::uint64_t master_seed) {
    const fs::path out = resolve_out(out_flag);
    ensure_directory(out);
    const auto items = load_graph_source(graphs, master_seed);
    for (const auto& item : items) {
        write_file_atomic(out / (item.id + ".txt"), write_edge_list(item.graph));
        write_file_atomic(out / (item.id + ".json"),
                          graph_metadata(item.graph, item.seed, item.generator).dump(1) + "\n");
    }
    std::cerr << "wrote " << items.size() << " graphs to " << out.string() << "\n";
    return 0;
}

int cmd_optimize(const CommonOptions& o, const std::string& dump_state) {
    ExperimentSpec spec = make_spec(o);
    spec.validate();
    const auto items = load_graph_source(spec.graphs, spec.optimizer.master_seed);
    precheck(spec, items);
    if (!dump_state.empty() && items.size() != 1)
        throw DomainError("--dump-state needs exactly one graph");
    nlohmann::json all = nlohmann::json::array();
    for (const auto& item : items) {
        const auto rec = run_graph(spec, item, spec.threads);
        all.push_back(to_json(rec, spec.hash()));
        if (!dump_state.empty()) {
            const auto& last = rec.results.back();
            if (item.graph.num_vertices() > kMaxQubits)
                throw ResourceError("--dump-state needs at most " + std::to_string(kMaxQubits) + " vertices");
            write_state_dump(prepare_state(item.graph, last.best_angles), dump_state);
            std::cerr << "state of " << last.label() << " written to " << dump_state << "\n";
        }
    }
    std::cout << (all.size() == 1 ? all[0] : all).dump(2) << "\n";
    return 0;
}

int cmd_sweep(const CommonOptions& o) {
    const ExperimentSpec spec = make_spec(o);
    const auto run = run_ensemble(spec, [](const std::string& line) { std::cerr << line << "\n"; });
    std::cerr << run.computed << " computed, " << run.resumed << " resumed, " << fmt(run.wall_seconds) << " s\n";
    write_summary_csv(std::cout, run.summary);
    return 0;
}

std::vector<double> parse_thresholds(const std::string& text) {
    // lo:hi:step or a comma list
    std::vector<double> t;
    if (text.find(':') != std::string::npos) {
        double lo = 0, hi = 0, step = 0;
        char c1 = 0, c2 = 0;
        std::istringstream ss(text);
        if (!(ss >> lo >> c1 >> hi >> c2 >> step) || c1 != ':' || c2 != ':' || !(step > 0) || hi < lo)
            throw ParseError(0, "thresholds must be lo:hi:step");
        const auto count = static_cast<int>(std::floor((hi - lo) / step + 1e-9));
        for (int k = 0; k <= count; ++k)
            t.push_back(lo + k * step);
        return t;
    }
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        t.push_back(std::stod(item));
    return t;
}

int cmd_report(const std::string& out_flag, const std::string& qaoa_label, const std::string& ma_label,
               const std::string& thresholds, bool check) {
    const fs::path out = resolve_out(out_flag);
    const auto records = load_records(out);
    const auto summary = summarize(records);
    std::ostringstream s;
    write_summary_csv(s, summary);
    if (check) {
        const auto on_disk = read_file(out / "summary.csv");
        if (on_disk != s.str()) {
            std::cerr << "summary.csv does not match the per-graph records\n";
            return 1;
        }
        std::cerr << "summary.csv matches " << records.size() << " per-graph records\n";
    }
    std::cout << s.str();
    if (records.empty())
        return 0;

    bool paired = true;
    for (const auto& g : records)
        paired = paired && g.find(qaoa_label) && g.find(ma_label);
    if (paired) {
        std::ostringstream gap;
        write_gap_csv(gap, {report_gap_table(records, qaoa_label, ma_label)});
        write_file_atomic(out / "gap.csv", gap.str());
        std::cout << "\n" << gap.str();
    }

    std::ostringstream dist;
    write_distribution_csv(dist, report_ar_distribution(records, parse_thresholds(thresholds)));
    write_file_atomic(out / "distribution.csv", dist.str());

    bool traces = true;
    for (const auto& g : records)
        for (const auto& r : g.results)
            traces = traces && !r.traces.empty();
    if (traces) {
        std::ostringstream conv;
        write_convergence_csv(conv, report_convergence(records));
        write_file_atomic(out / "convergence.csv", conv.str());
    } else {
        std::cerr << "no traces stored; convergence.csv skipped (rerun the sweep with --traces)\n";
    }
    return 0;
}

/// CSV with label,n,m,zero_beta_pct,zero_gamma_pct.
std::vector<FidelityFamily> read_families(const std::string& path) {
    std::istringstream in(read_file(path));
    std::vector<FidelityFamily> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#' || line.rfind("label", 0) == 0)
            continue;
        std::stringstream ss(line);
        FidelityFamily f;
        std::string n, m, zb, zg;
        if (!std::getline(ss, f.label, ',') || !std::getline(ss, n, ',') || !std::getline(ss, m, ',') ||
            !std::getline(ss, zb, ',') || !std::getline(ss, zg, ','))
            throw ParseError(lineno, path + ": expected label,n,m,zero_beta_pct,zero_gamma_pct");
        try {
            f.n = std::stod(n);
            f.m = std::stod(m);
            f.zero_beta_fraction = std::stod(zb) / 100.0;
            f.zero_gamma_fraction = std::stod(zg) / 100.0;
        } catch (const std::exception&) {
            throw ParseError(lineno, path + ": non-numeric field");
        }
        out.push_back(f);
    }
    return out;
}

/// One family from the multi-angle records of a sweep: mean n, mean m and
/// pooled zero fractions.
FidelityFamily family_from_records(const fs::path& out) {
    const auto records = load_records(out);
    FidelityFamily f;
    f.label = out.filename().string();
    double n = 0, m = 0, zb = 0, zg = 0;
    int count = 0;
    for (const auto& g : records)
        if (const auto* r = g.find("ma")) {
            n += g.n;
            m += g.m;
            zb += r->zero_beta_count;
            zg += r->zero_gamma_count;
            ++count;
        }
    if (count == 0)
        throw DomainError("no one-layer multi-angle results in " + out.string());
    f.n = n / count;
    f.m = m / count;
    f.zero_beta_fraction = zb / n;
    f.zero_gamma_fraction = zg / m;
    return f;
}

int main_impl(int argc, char** argv) {
    CLI::App app{"maqaoa: MaxCut QAOA and multi-angle QAOA toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    std::string gen_graphs, gen_out = "graphs";
    std::uint64_t gen_seed = 0;
    auto* gen = app.add_subcommand("generate", "write generated graphs as edge lists plus metadata JSON");
    gen->add_option("--graphs", gen_graphs, "generator spec, e.g. regular:n=50,degree=3,count=100")->required();
    gen->add_option("--out", gen_out, "output directory (MAQAOA_OUT overrides)")->capture_default_str();
    gen->add_option("--master-seed", gen_seed, "root seed")->capture_default_str();

    CommonOptions opt_o;
    std::string dump_state;
    auto* opt = app.add_subcommand("optimize", "optimize each ansatz on the given graphs and print JSON");
    add_run_flags(opt, opt_o);
    opt->add_option("--dump-state", dump_state, "write the final state of the last ansatz (binary float64 pairs)");

    CommonOptions sweep_o;
    auto* sweep = app.add_subcommand("sweep", "run an ensemble, persisting one JSON per graph (resumable)");
    add_run_flags(sweep, sweep_o);
    sweep->add_option("--out", sweep_o.out, "output directory (MAQAOA_OUT overrides)")->capture_default_str();

    std::string rep_out = "out", rep_q = "qaoa:1", rep_ma = "ma", rep_thr = "0.5:1.0:0.01";
    bool rep_check = false;
    auto* rep = app.add_subcommand("report", "summary, gap, AR-distribution and convergence CSVs from a sweep");
    rep->add_option("--out", rep_out, "sweep directory (MAQAOA_OUT overrides)")->capture_default_str();
    rep->add_option("--qaoa", rep_q, "baseline ansatz of the gap table")->capture_default_str();
    rep->add_option("--ma", rep_ma, "compared ansatz of the gap table")->capture_default_str();
    rep->add_option("--thresholds", rep_thr, "lo:hi:step or comma list")->capture_default_str();
    rep->add_flag("--check", rep_check, "fail unless summary.csv matches the per-graph records");

    std::string fid_families, fid_from, fid_layers = "1,2,3", fid_eps_n = "0.01", fid_eps_m = "0.01,0.05", fid_out;
    auto* fid = app.add_subcommand("fidelity", "measurement-cost ratios of p-layer QAOA against pruned ma-QAOA");
    auto* fam_opt = fid->add_option("--families", fid_families, "CSV: label,n,m,zero_beta_pct,zero_gamma_pct");
    auto* from_opt = fid->add_option("--from", fid_from, "sweep directory with ma results");
    fam_opt->excludes(from_opt);
    fid->add_option("--layers", fid_layers, "comma list of p")->capture_default_str();
    fid->add_option("--eps-n", fid_eps_n, "comma list of single-qubit error rates")->capture_default_str();
    fid->add_option("--eps-m", fid_eps_m, "comma list of two-qubit error rates")->capture_default_str();
    fid->add_option("--csv", fid_out, "also write the CSV here");

    int val_graphs = 200, val_assign = 20, val_n = 12;
    std::uint64_t val_seed = 0;
    double val_tol = 1e-10;
    auto* val = app.add_subcommand("validate", "closed forms against the statevector simulator on random graphs");
    val->add_option("--graphs", val_graphs, "graphs per family")->capture_default_str();
    val->add_option("--assignments", val_assign, "random angle draws per graph")->capture_default_str();
    val->add_option("--max-n", val_n, "largest vertex count")->capture_default_str();
    val->add_option("--master-seed", val_seed, "root seed")->capture_default_str();
    val->add_option("--tolerance", val_tol, "largest accepted deviation")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    if (*gen)
        return cmd_generate(gen_graphs, gen_out, gen_seed);
    if (*opt)
        return cmd_optimize(opt_o, dump_state);
    if (*sweep)
        return cmd_sweep(sweep_o);
    if (*rep)
        return cmd_report(rep_out, rep_q, rep_ma, rep_thr, rep_check);
    if (*fid) {
        std::vector<FidelityFamily> families;
        if (!fid_families.empty())
            families = read_families(fid_families);
        else if (!fid_from.empty())
            families = {family_from_records(resolve_out(fid_from))};
        else
            throw DomainError("fidelity needs --families or --from");
        std::vector<int> layers;
        for (double p : parse_thresholds(fid_layers))
            layers.push_back(static_cast<int>(p));
        std::vector<NoiseModel> noises;
        for (double en : parse_thresholds(fid_eps_n))
            for (double em : parse_thresholds(fid_eps_m))
                noises.push_back({en, em});
        std::ostringstream csv;
        write_fidelity_csv(csv, report_fidelity_table(families, noises, layers));
        if (!fid_out.empty())
            write_file_atomic(fid_out, csv.str());
        std::cout << csv.str();
        return 0;
    }
    if (*val) {
        const auto r = validate_backends(val_graphs, val_assign, val_n, val_seed);
        std::cout << "triangle-free graphs " << r.triangle_free_graphs << ", graphs with triangles "
                  << r.general_graphs << ", angle draws " << r.assignments << "\n"
                  << "max |closed form - simulator|: multi-angle " << r.max_ma_error << ", one-layer "
                  << r.max_qaoa1_error << "\n";
        const bool ok = r.max_ma_error <= val_tol && r.max_qaoa1_error <= val_tol;
        std::cout << (ok ? "ok" : "FAILED") << "\n";
        return ok ? 0 : 1;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return main_impl(argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "maqaoa: " << e.what() << "\n";
        return 1;
    }
}
