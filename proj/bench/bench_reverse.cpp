// Serial vs OpenMP comparison for the endpoint-sampling kernel: N independent
// exact-score reverse-SDE runs from the same scaled start. Verifies that both
// paths produce identical bytes before timing them.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <vector>

#include "purecert/distribution.hpp"
#include "purecert/parallel.hpp"
#include "purecert/sampler.hpp"
#include "purecert/schedule.hpp"
#include "purecert/vec.hpp"

using namespace purecert;

namespace {

double run_batch(std::size_t runs, const ScoreFn& score, const NoiseSchedule& sched,
                 const Vec& x_start, double t, const ReverseConfig& cfg, const Rng& base,
                 bool parallel, std::vector<Vec>& endpoints) {
    endpoints.assign(runs, Vec{});
    const auto start = std::chrono::steady_clock::now();
    parallel_for(
        runs,
        [&](std::size_t i) {
            Rng r = base.split(i);
            endpoints[i] = reverse_sde_exact(score, sched, x_start, t, cfg, r);
        },
        parallel);
    const auto stop = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(stop - start).count();
}

}  // namespace

int main(int argc, char** argv) {
    const std::size_t runs = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 4000;
    const std::size_t steps = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 500;

    auto dist = make_prototype_set({
        {0.35, {0.0, 0.0}, {}, 0},
        {0.25, {2.5, 0.0}, {}, 0},
        {0.25, {0.0, 2.5}, {}, 1},
        {0.15, {2.5, 2.5}, {}, 1},
    });
    auto sched = build_linear_schedule(1000, 1e-4, 0.02);
    const auto score = exact_score_fn(dist, sched);

    const std::size_t n_start = 500;
    const double t = sched.time_of(n_start);
    const Vec x_start = std::sqrt(sched.alpha_bar(n_start)) * Vec{1.0, 1.0};
    ReverseConfig cfg;
    cfg.mode = ReverseMode::ExactSde;
    cfg.integrator_steps = steps;
    const Rng base(7777);

    std::printf("reverse-SDE endpoint sampling: %zu runs x %zu steps, %d workers available\n",
                runs, steps, worker_count());

    std::vector<Vec> serial, parallel;
    // warm-up plus correctness check: both paths must agree bit for bit
    run_batch(runs, score, sched, x_start, t, cfg, base, false, serial);
    run_batch(runs, score, sched, x_start, t, cfg, base, true, parallel);
    if (serial != parallel) {
        std::fprintf(stderr, "FAIL: serial and parallel endpoints differ\n");
        return 1;
    }
    std::printf("serial/parallel outputs: identical\n");

    const int reps = 3;
    double best_serial = 1e300, best_parallel = 1e300;
    for (int r = 0; r < reps; ++r) {
        best_serial =
            std::min(best_serial, run_batch(runs, score, sched, x_start, t, cfg, base, false, serial));
        best_parallel = std::min(best_parallel,
                                 run_batch(runs, score, sched, x_start, t, cfg, base, true, parallel));
    }
    std::printf("serial:   %8.3f s  (%.1f runs/s)\n", best_serial, runs / best_serial);
    std::printf("parallel: %8.3f s  (%.1f runs/s)\n", best_parallel, runs / best_parallel);
    std::printf("speedup:  %.2fx\n", best_serial / best_parallel);
    return 0;
}
