#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>

#include <maqaoa/harness.hpp>

using namespace maqaoa;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        std::random_device rd;
        path = fs::temp_directory_path() / ("maqaoa-test-" + std::to_string(rd()) + std::to_string(rd()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

std::vector<Edge> edge_vec(const Graph& g) { return {g.edges().begin(), g.edges().end()}; }

std::string slurp(const fs::path& p) { return read_file(p); }

std::string strip_last_column(const std::string& csv) {
    std::istringstream in(csv);
    std::string line, out;
    while (std::getline(in, line))
        out += line.substr(0, line.rfind(',')) + "\n";
    return out;
}

ExperimentSpec tiny_spec(const fs::path& out) {
    ExperimentSpec s;
    s.graphs = "gnp-tf:n=6,p=0.5,count=3,seed=5";
    s.ansatzes = parse_ansatz_list("qaoa:1,ma");
    s.optimizer.seeds = 3;
    s.optimizer.master_seed = 11;
    s.out = out;
    return s;
}

OptimizationResult fake(const std::string& kind, double ar) {
    OptimizationResult r;
    r.ansatz = kind;
    r.approximation_ratio = ar;
    r.best_value = ar * 4;
    r.c_max = 4;
    return r;
}

GraphRecord fake_graph(const std::string& id, std::vector<OptimizationResult> rs) {
    GraphRecord g;
    g.id = id;
    g.c_max = 4;
    g.results = std::move(rs);
    return g;
}

} // namespace

TEST(GeneratorSpec, Parsing) {
    const auto g = parse_generator_spec("regular:n=50,degree=3,count=100");
    EXPECT_EQ(g.kind, "regular");
    EXPECT_EQ(g.integer("n"), 50);
    EXPECT_EQ(g.integer("count", 1), 100);
    EXPECT_EQ(g.integer("seed", 7), 7);
    EXPECT_THROW(g.integer("p"), ParseError);
    EXPECT_THROW(parse_generator_spec(":n=3"), ParseError);
    EXPECT_THROW(parse_generator_spec("gnp:n"), ParseError);
    EXPECT_THROW(parse_generator_spec("gnp:n=x").number("n"), ParseError);
    EXPECT_THROW(parse_generator_spec("gnp:n=2.5").integer("n"), ParseError);
}

TEST(GeneratorSpec, Generation) {
    const auto a = generate_graphs(parse_generator_spec("regular:n=12,degree=3,count=3,seed=4"), 0);
    ASSERT_EQ(a.size(), 3u);
    EXPECT_EQ(a[0].id, "regular-n12-d3-0000");
    EXPECT_EQ(a[2].id, "regular-n12-d3-0002");
    for (const auto& item : a) {
        EXPECT_EQ(item.graph.num_edges(), 18);
        EXPECT_TRUE(is_triangle_free(item.graph));
    }
    const auto b = generate_graphs(parse_generator_spec("regular:n=12,degree=3,count=3,seed=4"), 99);
    EXPECT_EQ(edge_vec(a[1].graph), edge_vec(b[1].graph));
    const auto c = generate_graphs(parse_generator_spec("regular:n=12,degree=3,count=3"), 99);
    EXPECT_NE(edge_vec(a[1].graph), edge_vec(c[1].graph));
    EXPECT_EQ(generate_graphs(parse_generator_spec("star:n=5"), 0)[0].graph.num_edges(), 4);
    EXPECT_TRUE(generate_graphs(parse_generator_spec("gnp:n=5,p=0.5,count=0"), 0).empty());
    EXPECT_THROW(generate_graphs(parse_generator_spec("wheel:n=5"), 0), ParseError);
    EXPECT_THROW(generate_graphs(parse_generator_spec("star:n=5,degree=2"), 0), ParseError);
    EXPECT_THROW(generate_graphs(parse_generator_spec("regular:n=5,degree=3"), 0), DomainError);
}

TEST(GraphSource, DirectoryAndFile) {
    TempDir t;
    write_file_atomic(t.path / "b.txt", "0 1\n1 2\n");
    write_file_atomic(t.path / "a.edges", "# n=4\n0 1\n");
    write_file_atomic(t.path / "ignored.json", "{}");
    const auto items = load_graph_source(t.path.string(), 0);
    ASSERT_EQ(items.size(), 2u);
    EXPECT_EQ(items[0].id, "a");
    EXPECT_EQ(items[0].graph.num_vertices(), 4);
    EXPECT_EQ(items[1].id, "b");
    EXPECT_EQ(load_graph_source((t.path / "b.txt").string(), 0).size(), 1u);
    EXPECT_THROW(load_graph_source((t.path / "missing" / "x.txt").string(), 0), IoError);
    write_file_atomic(t.path / "c.txt", "0 1\n1 oops\n");
    EXPECT_THROW(load_graph_source(t.path.string(), 0), ParseError);
}

TEST(Ansatz, Parsing) {
    EXPECT_EQ(parse_ansatz("qaoa:3").label(), "qaoa:3");
    EXPECT_EQ(parse_ansatz("ma").label(), "ma");
    EXPECT_EQ(parse_ansatz("ma:2").label(), "ma:2");
    EXPECT_EQ(parse_ansatz("qaoa:3@1000").seeds, 1000);
    EXPECT_EQ(parse_ansatz("ma@100").seeds, 100);
    EXPECT_FALSE(parse_ansatz("ma").seeds.has_value());
    for (const char* bad : {"qaoa", "qaoa:0", "qaoa:x", "xqaoa:1", "ma@0", "ma@", "qaoa:1@2x"})
        EXPECT_THROW(parse_ansatz(bad), ParseError) << bad;
    const auto order = execution_order(parse_ansatz_list("ma,qaoa:3,qaoa:1,qaoa:2"));
    std::vector<std::string> labels;
    for (const auto& a : order)
        labels.push_back(a.label());
    EXPECT_EQ(labels, (std::vector<std::string>{"qaoa:1", "qaoa:2", "qaoa:3", "ma"}));
}

TEST(ExperimentSpec, HashIgnoresOutputAndThreads) {
    ExperimentSpec a = tiny_spec("x");
    ExperimentSpec b = tiny_spec("y");
    b.threads = 4;
    EXPECT_EQ(a.hash(), b.hash());
    b.optimizer.master_seed = 12;
    EXPECT_NE(a.hash(), b.hash());
    a.ansatzes = parse_ansatz_list("qaoa:2");
    EXPECT_THROW(a.validate(), BackendError);
    a.ansatzes.clear();
    EXPECT_THROW(a.validate(), DomainError);
}

TEST(Ensemble, DeterministicOutputs) {
    TempDir t;
    const auto r1 = run_ensemble(tiny_spec(t.path / "one"));
    ExperimentSpec s2 = tiny_spec(t.path / "two");
    s2.threads = 2;
    const auto r2 = run_ensemble(s2);
    EXPECT_EQ(r1.computed, 3);
    EXPECT_EQ(slurp(t.path / "one" / "summary.csv"), slurp(t.path / "two" / "summary.csv"));
    EXPECT_EQ(strip_last_column(slurp(t.path / "one" / "results.csv")),
              strip_last_column(slurp(t.path / "two" / "results.csv")));
    for (const auto& g : r1.graphs) {
        const auto* q = g.find("qaoa:1");
        const auto* m = g.find("ma");
        ASSERT_TRUE(q && m);
        EXPECT_GE(m->best_value, q->best_value - 1e-9); // warm start from qaoa:1
        EXPECT_LE(m->approximation_ratio, 1.0 + 1e-12);
    }
    EXPECT_TRUE(fs::exists(t.path / "one" / "run.json"));
}

TEST(Ensemble, ResumeSkipsFinishedGraphs) {
    TempDir t;
    const auto spec = tiny_spec(t.path);
    run_ensemble(spec);
    const std::string summary = slurp(t.path / "summary.csv");
    const std::string results = strip_last_column(slurp(t.path / "results.csv"));
    fs::remove(t.path / "graphs" / "gnp-tf-n6-0001.json");
    const auto again = run_ensemble(spec);
    EXPECT_EQ(again.resumed, 2);
    EXPECT_EQ(again.computed, 1);
    EXPECT_EQ(slurp(t.path / "summary.csv"), summary);
    EXPECT_EQ(strip_last_column(slurp(t.path / "results.csv")), results);

    // a different spec does not reuse the records
    ExperimentSpec other = spec;
    other.optimizer.seeds = 2;
    EXPECT_EQ(run_ensemble(other).computed, 3);
}

TEST(Ensemble, SummaryRecomputableFromRecords) {
    TempDir t;
    const auto run = run_ensemble(tiny_spec(t.path));
    const auto records = load_records(t.path);
    ASSERT_EQ(records.size(), 3u);
    for (const auto& s : run.summary) {
        double sum = 0, sq = 0, lo = 2, hi = -1;
        for (const auto& g : records) {
            const double ar = g.find(s.label)->approximation_ratio;
            sum += ar;
            sq += ar * ar;
            lo = std::min(lo, ar);
            hi = std::max(hi, ar);
        }
        const double mean = sum / 3;
        EXPECT_NEAR(s.mean_ar, mean, 1e-12);
        EXPECT_NEAR(s.std_ar, std::sqrt(std::max(0.0, sq / 3 - mean * mean)), 1e-7);
        EXPECT_EQ(s.min_ar, lo);
        EXPECT_EQ(s.max_ar, hi);
        EXPECT_EQ(s.graphs, 3);
    }
}

TEST(Ensemble, EmptyEnsembleSucceeds) {
    TempDir t;
    fs::create_directories(t.path / "in");
    ExperimentSpec s = tiny_spec(t.path / "out");
    s.graphs = (t.path / "in").string();
    const auto run = run_ensemble(s);
    EXPECT_TRUE(run.graphs.empty());
    EXPECT_TRUE(run.summary.empty());
    EXPECT_EQ(slurp(t.path / "out" / "summary.csv").find('\n') + 1, slurp(t.path / "out" / "summary.csv").size());
}

TEST(Ensemble, PrecheckRejectsBeforeWork) {
    TempDir t;
    ExperimentSpec s = tiny_spec(t.path);
    s.graphs = "complete:n=4";
    EXPECT_THROW(run_ensemble(s), BackendError);
    s.backend = Backend::statevector;
    s.graphs = "cycle:n=30";
    EXPECT_THROW(run_ensemble(s), BackendError);
    EXPECT_FALSE(fs::exists(t.path / "graphs" / "cycle-n30.json"));
}

TEST(Reports, GapTable) {
    const std::vector<GraphRecord> recs{fake_graph("a", {fake("qaoa", 0.75), fake("ma", 0.8125)})};
    const auto row = report_gap_table(recs);
    EXPECT_NEAR(row.gap_change_pct, 25.0, 1e-12);
    EXPECT_NEAR(row.delta_ar, 0.0625, 1e-15);
    const std::vector<GraphRecord> same{fake_graph("a", {fake("qaoa", 0.9), fake("ma", 0.9)})};
    EXPECT_EQ(report_gap_table(same).gap_change_pct, 0.0);
    const std::vector<GraphRecord> unpaired{fake_graph("a", {fake("qaoa", 0.9), fake("ma", 0.9)}),
                                            fake_graph("b", {fake("qaoa", 0.9)})};
    EXPECT_THROW(report_gap_table(unpaired), DomainError);
    EXPECT_THROW(report_gap_table({}), DomainError);
}

TEST(Reports, DistributionIsMonotone) {
    std::vector<GraphRecord> recs;
    for (int i = 0; i < 10; ++i)
        recs.push_back(fake_graph(std::to_string(i), {fake("qaoa", 0.6 + 0.03 * i), fake("ma", 0.7 + 0.03 * i)}));
    std::vector<double> th{0.0};
    for (double x : default_thresholds())
        th.push_back(x);
    th.push_back(1.5);
    const auto d = report_ar_distribution(recs, th);
    ASSERT_EQ(d.labels.size(), 2u);
    for (const auto& f : d.fractions) {
        EXPECT_EQ(f.front(), 1.0);
        EXPECT_EQ(f.back(), 0.0);
        for (std::size_t i = 1; i < f.size(); ++i)
            EXPECT_LE(f[i], f[i - 1]);
    }
    EXPECT_EQ(default_thresholds().size(), 51u);
}

TEST(Reports, ConvergenceNeedsTraces) {
    std::vector<GraphRecord> recs{fake_graph("a", {fake("ma", 0.9)})};
    EXPECT_THROW(report_convergence(recs), DomainError);
    recs[0].results[0].traces = {{1.0, 2.0, 3.0}, {2.0, 1.5, 2.5, 3.5, 4.0}};
    const auto c = report_convergence(recs);
    ASSERT_EQ(c.mean_ar.size(), 1u);
    // mean final iteration (2 + 4) / 2 = 3
    ASSERT_EQ(c.mean_ar[0].size(), 4u);
    EXPECT_DOUBLE_EQ(c.mean_ar[0][0], (0.25 + 0.5) / 2);
    EXPECT_DOUBLE_EQ(c.mean_ar[0][1], (0.5 + 0.5) / 2);
    EXPECT_DOUBLE_EQ(c.mean_ar[0][3], (0.75 + 0.875) / 2);
}

TEST(Validation, BackendsAgree) {
    const auto v = validate_backends(10, 5, 8, 3);
    EXPECT_EQ(v.triangle_free_graphs, 10);
    EXPECT_EQ(v.general_graphs, 10);
    EXPECT_LE(v.max_ma_error, 1e-10);
    EXPECT_LE(v.max_qaoa1_error, 1e-10);
}
