// Benchmark: serial reference vs OpenMP path fan-out on the stock ensemble
// workload. The two must agree bit-for-bit; timings and speedup are printed.

#include <chrono>
#include <cstdio>

#include <omp.h>

#include "bidomain/config.hpp"
#include "bidomain/ensemble.hpp"
#include "bidomain/verify.hpp"

using namespace bidomain;

int main(int argc, char** argv) {
    int paths = argc > 1 ? std::atoi(argv[1]) : 32;
    ScenarioConfig cfg = default_config();
    cfg.basis.n = 24;
    cfg.time.T = 1.0;

    Scenario sc = build_scenario(cfg);
    auto solver = std::make_shared<PathSolver>(sc.op, sc.run);
    auto fn = [&sc, solver](int, std::uint64_t seed) {
        TrajectoryRecord rec = solver->solve(sc.initial_state(seed), seed);
        return PathResult{{"sup_v_sq", rec.sup_v_sq},
                          {"l4_int", rec.cum_l4(rec.snapshots() - 1)}};
    };

    auto timed = [&](ExecMode mode) {
        EnsembleSpec spec;
        spec.paths = paths;
        spec.master_seed = cfg.ensemble.master_seed;
        spec.exec = mode;
        const auto t0 = std::chrono::steady_clock::now();
        EnsembleStats st = run_ensemble(spec, fn);
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return std::pair<EnsembleStats, double>{st, secs};
    };

    std::printf("ensemble benchmark: n=%d, %d paths, %d steps, %d thread(s)\n", cfg.basis.n,
                paths, sc.run.steps(), omp_get_max_threads());
    auto [serial_stats, serial_secs] = timed(ExecMode::Serial);
    std::printf("  serial reference: %7.3f s\n", serial_secs);
    auto [omp_stats, omp_secs] = timed(ExecMode::OpenMP);
    std::printf("  openmp fan-out:   %7.3f s  (speedup %.2fx)\n", omp_secs,
                serial_secs / omp_secs);

    bool identical = true;
    for (const auto& [key, m] : serial_stats.functionals) {
        identical = identical && m.mean == omp_stats.at(key).mean &&
                    m.variance == omp_stats.at(key).variance;
    }
    std::printf("  statistics identical across modes: %s\n", identical ? "yes" : "NO");
    return identical ? 0 : 1;
}
