// Compares the serial reference implementations of the Monte-Carlo kernels
// against their OpenMP counterparts and reports speedup plus a bit-exactness
// check on the results.

#include <chrono>
#include <cstdio>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "disac/experiments.hpp"

using namespace disac;

namespace {

template <typename F>
double time_s(F&& f) {
    auto t0 = std::chrono::steady_clock::now();
    f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main() {
#ifdef _OPENMP
    std::printf("openmp threads: %d\n", omp_get_max_threads());
#else
    std::printf("openmp: not enabled\n");
#endif

    ScenarioConfig cfg = desk_scale_config(2, 4, 2, /*seed=*/7);
    ScenarioRealization real = realize_scenario(cfg);
    auto probe = isotropic_sensing_covs(cfg, 1.0);
    RandomStream rng = spawn_rng_stream(cfg, "bench");

    const int kld_samples = 4000;
    KldSampleStats serial_stats, parallel_stats;
    double t_serial = time_s([&] {
        serial_stats = expected_kld_monte_carlo_serial(real.clutter, real.factors_nominal,
                                                       real.stats_nominal, cfg.rcs_model, probe,
                                                       kld_samples, rng);
    });
    double t_parallel = time_s([&] {
        parallel_stats = expected_kld_monte_carlo(real.clutter, real.factors_nominal,
                                                  real.stats_nominal, cfg.rcs_model, probe,
                                                  kld_samples, rng, true);
    });
    bool same = serial_stats.mean == parallel_stats.mean &&
                serial_stats.p10 == parallel_stats.p10 &&
                serial_stats.p90 == parallel_stats.p90;
    std::printf("expected_kld_monte_carlo  S=%d   serial %.3fs  parallel %.3fs  speedup %.2fx  "
                "bit-identical %s\n",
                kld_samples, t_serial, t_parallel, t_serial / t_parallel, same ? "yes" : "no");

    DetectionExperiment exp;
    exp.trials = 400;
    exp.input_scnr_db = {0.0};
    exp.snapshots = cfg.snapshots;
    std::vector<CVec> beams;
    for (int n = 0; n < cfg.num_nodes; ++n)
        beams.push_back(std::sqrt(cfg.power_budget / cfg.num_nodes / cfg.tx_antennas) *
                        CVec::Ones(cfg.tx_antennas));
    std::vector<PdPoint> curve_serial, curve_parallel;
    double d_serial = time_s([&] {
        curve_serial = detection_probability(cfg, real.clutter, real.factors_nominal,
                                             real.stats_nominal, beams, exp, rng, false);
    });
    double d_parallel = time_s([&] {
        curve_parallel = detection_probability(cfg, real.clutter, real.factors_nominal,
                                               real.stats_nominal, beams, exp, rng, true);
    });
    bool same_pd = curve_serial[0].pd == curve_parallel[0].pd;
    std::printf("detection_probability     T=%d trials=%d  serial %.3fs  parallel %.3fs  "
                "speedup %.2fx  bit-identical %s\n",
                exp.snapshots, exp.trials, d_serial, d_parallel, d_serial / d_parallel,
                same_pd ? "yes" : "no");
    return (same && same_pd) ? 0 : 1;
}
