// compares the OpenMP grid kernels with the serial reference implementation
#include <chrono>
#include <cstdio>

#include "reluforge/constructions.hpp"
#include "reluforge/grid.hpp"

using namespace reluforge;

int main() {
    Network net = sawtooth_network(8);
    Vec g = uniform_grid(0.0, 1.0, 500000);
    std::vector<Vec> xs(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) xs[i] = {g[i]};
    auto f = [](const Vec& x) {
        double t = x[0];
        for (int i = 0; i < 8; ++i) t = (t <= 0.5) ? 2.0 * t : 2.0 * (1.0 - t);
        return t;
    };

    auto t0 = std::chrono::steady_clock::now();
    double e_par = sup_error(net, f, xs);
    auto t1 = std::chrono::steady_clock::now();
    double e_ser = sup_error_serial(net, f, xs);
    auto t2 = std::chrono::steady_clock::now();

    double par_s = std::chrono::duration<double>(t1 - t0).count();
    double ser_s = std::chrono::duration<double>(t2 - t1).count();
    std::printf("threads=%d points=%zu\n", grid_threads(), xs.size());
    std::printf("parallel: %.3f s (sup %.3e)\n", par_s, e_par);
    std::printf("serial:   %.3f s (sup %.3e)\n", ser_s, e_ser);
    std::printf("agreement: %s\n", (e_par == e_ser) ? "bitwise" : "DIFFERS");
    return (e_par == e_ser) ? 0 : 1;
}
