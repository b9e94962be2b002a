// Optimizes one-layer QAOA and multi-angle QAOA on a random triangle-free
// 3-regular graph with the closed-form backend.

#include <cstdio>

#include <maqaoa/maqaoa.hpp>

int main() {
    using namespace maqaoa;
    const Graph g = random_regular_triangle_free(20, 3, 42);
    const int c_max = maxcut(g).value;

    OptimizerConfig cfg;
    cfg.seeds = 50;
    const auto q = optimize_qaoa(g, 1, cfg, Backend::analytic, c_max);
    const auto ma = optimize_ma_qaoa(g, cfg, Backend::analytic, c_max, {warm_start_from_qaoa(g, q)});

    std::printf("n=%d m=%d C_max=%d\n", g.num_vertices(), g.num_edges(), c_max);
    std::printf("qaoa:1  <C>=%.6f  AR=%.4f\n", q.best_value, q.approximation_ratio);
    std::printf("ma      <C>=%.6f  AR=%.4f  zero beta %d/%d, zero gamma %d/%d\n", ma.best_value,
                ma.approximation_ratio, ma.zero_beta_count, g.num_vertices(), ma.zero_gamma_count, g.num_edges());

    // the closed form agrees with the simulator at the optimum
    QaoaSimulator sim(g);
    sim.prepare(ma.best_angles);
    std::printf("simulator <C>=%.6f\n", sim.expectation());

    const NoiseModel noise{0.01, 0.01};
    const double ratio = measurement_ratio(qaoa_profile(g, 1), pruned_profile(g, ma), noise);
    std::printf("measurements qaoa:1 / pruned ma at 1%% gate error: %.3f\n", ratio);
}
