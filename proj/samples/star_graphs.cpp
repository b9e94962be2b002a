// Star graphs: one-layer multi-angle QAOA cuts every edge, while one-layer
// QAOA falls toward 3/4 of the edges as the star grows.

#include <cstdio>

#include <maqaoa/maqaoa.hpp>

int main() {
    using namespace maqaoa;
    std::printf("%8s %12s %12s\n", "n", "qaoa:1 AR", "ma AR");
    for (int n : {3, 5, 10, 20, 100, 1000, 10000}) {
        const Graph s = star_graph(n);
        const double ma = ma_total_expectation_tf(s, star_ma_optimal_angles(s)) / (n - 1);
        std::printf("%8d %12.6f %12.6f\n", n, star_qaoa1_limit(n), ma);
    }
}
