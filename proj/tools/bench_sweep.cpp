// Compares the OpenMP sweep against the serial reference on a model-germ
// orbit and checks that both produce identical rows.
//
//   ./bench_sweep [points] [points_per_decade]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "orbitlens/eps_neighborhood.hpp"

using namespace orbitlens;

int main(int argc, char** argv) {
    std::size_t npts = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 1'000'000;
    int ppd = argc > 2 ? std::atoi(argv[2]) : 48;

    Germ g = Germ::model(16);
    StopCriteria stop;
    stop.max_points = npts;
    OrbitSample o = orbit(g, cplx(-0.1, 0.0), stop);
    SweepSpec spec = auto_sweep_spec(o, 2.5, ppd);
    std::printf("orbit: %zu points, grid: [%.3e, %.3e] at %d/decade\n", o.points(),
                spec.eps_min, spec.eps_max, ppd);

    auto t0 = std::chrono::steady_clock::now();
    EpsSweep serial = sweep_serial(o, spec);
    auto t1 = std::chrono::steady_clock::now();
    EpsSweep parallel = sweep(o, spec);
    auto t2 = std::chrono::steady_clock::now();

    double ts = std::chrono::duration<double>(t1 - t0).count();
    double tp = std::chrono::duration<double>(t2 - t1).count();
    double worst = 0.0;
    for (std::size_t i = 0; i < serial.rows.size(); ++i) {
        worst = std::max(worst, std::abs(serial.rows[i].area - parallel.rows[i].area));
        worst = std::max(worst, std::abs(serial.rows[i].cm - parallel.rows[i].cm));
    }
#ifdef _OPENMP
    int threads = omp_get_max_threads();
#else
    int threads = 1;
#endif
    std::printf("serial:   %.3f s\n", ts);
    std::printf("parallel: %.3f s  (%d threads, speedup %.2fx)\n", tp, threads, ts / tp);
    std::printf("max |serial - parallel| over rows: %.3e\n", worst);
    return worst == 0.0 ? 0 : 1;
}
