#include "disac/detection.hpp"

#include <cmath>

namespace disac {

CMat sensing_waveforms(int num_nodes, int snapshots) {
    if (snapshots < num_nodes)
        throw DisacError("sensing_waveforms: need at least N snapshots for orthogonality");
    CMat s(num_nodes, snapshots);
    for (int m = 0; m < num_nodes; ++m)
        for (int t = 0; t < snapshots; ++t)
            s(m, t) = std::polar(1.0, 2.0 * kPi * m * t / snapshots);
    return s;
}

CVec nominal_echo_signature(const SensingChannelFactors& factors, const RcsStatistics& stats,
                            const std::vector<CVec>& sensing_beams, int m) {
    const int n_nodes = factors.num_nodes;
    const int mr = static_cast<int>(factors.link(0, 0).a_rx.size());
    CVec sig = CVec::Zero(n_nodes * mr);
    for (int n = 0; n < n_nodes; ++n) {
        CMat g = factors.effective_channel(n, m, stats.link(n, m).mean);
        sig.segment(n * mr, mr) = g * sensing_beams[m];
    }
    return sig;
}

double reference_echo_energy(const ScenarioConfig& cfg, const SensingChannelFactors& factors,
                             const RcsStatistics& stats) {
    // Full-power isotropic probe: per waveform the received energy is
    // shrink^2 |L|^2 mu^2 tr(A W A^H) with W = P/(N Mt) I.
    const double per_node = cfg.power_budget / cfg.num_nodes;
    double energy = 0.0;
    for (int n = 0; n < cfg.num_nodes; ++n)
        for (int m = 0; m < cfg.num_nodes; ++m) {
            const SensingLink& l = factors.link(n, m);
            double mu = stats.link(n, m).mean;
            double shrink2 = factors.shrinkage * factors.shrinkage;
            energy += shrink2 * l.pathloss * mu * mu * (per_node / cfg.tx_antennas) *
                      l.response.squaredNorm();
        }
    return energy;
}

namespace {

struct BlockChol {
    std::vector<Eigen::LLT<CMat>> llt;
};

BlockChol clutter_chol(const ClutterModel& clutter) {
    BlockChol c;
    for (const auto& b : clutter.blocks) {
        c.llt.emplace_back(hermitize(b));
        if (c.llt.back().info() != Eigen::Success)
            throw DisacError("detection: clutter covariance not positive definite");
    }
    return c;
}

std::vector<double> draw_beta(const RcsStatistics& stats, const RcsModel& model,
                              RandomStream& rng) {
    std::vector<double> beta(stats.links.size());
    for (std::size_t i = 0; i < beta.size(); ++i)
        beta[i] = sample_rcs_one(stats.links[i], model, rng);
    return beta;
}

}  // namespace

CMat simulate_hypothesis_data(const ScenarioConfig& cfg, const ClutterModel& clutter,
                              const SensingChannelFactors& factors, const RcsStatistics& stats,
                              const std::vector<CVec>& sensing_beams, bool target_present,
                              double echo_scale, RandomStream& rng, int snapshots) {
    const int n_nodes = cfg.num_nodes;
    const int mr = cfg.rx_antennas;
    BlockChol chol = clutter_chol(clutter);
    CMat waveforms = sensing_waveforms(n_nodes, snapshots);
    CMat data(n_nodes * mr, snapshots);

    std::vector<double> beta;
    std::vector<double> phases(n_nodes, 0.0);
    if (target_present) {
        beta = draw_beta(stats, cfg.rcs_model, rng);
        if (cfg.sync_mode == SyncMode::SampledPhases)
            for (int n = 0; n < n_nodes; ++n)
                phases[n] = rng.uniform(-cfg.sync_error_bound, cfg.sync_error_bound);
    }

    // Per-link effective gain column g_{n,m} w_m, fixed across the dwell.
    std::vector<CVec> echo_cols(n_nodes * n_nodes);
    if (target_present && !cfg.rcs_fluctuates_per_snapshot) {
        for (int n = 0; n < n_nodes; ++n)
            for (int m = 0; m < n_nodes; ++m) {
                const SensingLink& l = factors.link(n, m);
                double b = beta[n * n_nodes + m];
                cplx gain = l.large_scale * b;
                if (cfg.sync_mode == SyncMode::SampledPhases)
                    gain *= std::polar(1.0, phases[n] - phases[m]);
                else
                    gain *= factors.shrinkage;
                echo_cols[n * n_nodes + m] = echo_scale * gain * (l.response * sensing_beams[m]);
            }
    }

    for (int t = 0; t < snapshots; ++t) {
        if (target_present && cfg.rcs_fluctuates_per_snapshot) {
            beta = draw_beta(stats, cfg.rcs_model, rng);
            for (int n = 0; n < n_nodes; ++n)
                for (int m = 0; m < n_nodes; ++m) {
                    const SensingLink& l = factors.link(n, m);
                    cplx gain = l.large_scale * beta[n * n_nodes + m];
                    if (cfg.sync_mode == SyncMode::SampledPhases)
                        gain *= std::polar(1.0, phases[n] - phases[m]);
                    else
                        gain *= factors.shrinkage;
                    echo_cols[n * n_nodes + m] =
                        echo_scale * gain * (l.response * sensing_beams[m]);
                }
        }
        for (int n = 0; n < n_nodes; ++n) {
            CVec noise(mr);
            for (int i = 0; i < mr; ++i) noise(i) = rng.cgaussian();
            CVec block = chol.llt[n].matrixL() * noise;
            if (target_present)
                for (int m = 0; m < n_nodes; ++m)
                    block += echo_cols[n * n_nodes + m] * waveforms(m, t);
            data.block(n * mr, t, mr, 1) = block;
        }
    }
    return data;
}

double wmf_statistic(const ScenarioConfig& cfg, const ClutterModel& clutter,
                     const SensingChannelFactors& factors, const RcsStatistics& stats,
                     const std::vector<CVec>& sensing_beams, const CMat& data) {
    const int n_nodes = cfg.num_nodes;
    const int mr = cfg.rx_antennas;
    const int snapshots = static_cast<int>(data.cols());
    BlockChol chol = clutter_chol(clutter);
    CMat waveforms = sensing_waveforms(n_nodes, snapshots);

    // Whiten blockwise.
    CMat white(data.rows(), snapshots);
    for (int n = 0; n < n_nodes; ++n)
        white.middleRows(n * mr, mr) =
            chol.llt[n].matrixL().solve(data.middleRows(n * mr, mr));

    double stat = 0.0;
    int used = 0;
    for (int m = 0; m < n_nodes; ++m) {
        // Correlate across the dwell; under H0 this is CN(0, I).
        CVec z = CVec::Zero(n_nodes * mr);
        for (int t = 0; t < snapshots; ++t) z += white.col(t) * std::conj(waveforms(m, t));
        z /= std::sqrt(static_cast<double>(snapshots));

        CVec sig = nominal_echo_signature(factors, stats, sensing_beams, m);
        for (int n = 0; n < n_nodes; ++n)
            sig.segment(n * mr, mr) =
                chol.llt[n].matrixL().solve(sig.segment(n * mr, mr)).eval();
        double norm = sig.norm();
        if (norm <= 1e-300) continue;
        stat += std::norm(sig.dot(z) / norm);
        ++used;
    }
    return used > 0 ? stat / used : 0.0;
}

std::vector<PdPoint> detection_probability(const ScenarioConfig& cfg,
                                           const ClutterModel& clutter,
                                           const SensingChannelFactors& factors,
                                           const RcsStatistics& stats,
                                           const std::vector<CVec>& sensing_beams,
                                           const DetectionExperiment& experiment,
                                           const RandomStream& rng, bool parallel) {
    if (experiment.trials < 100) throw DisacError("detection_probability: need >= 100 trials");
    const double threshold = db_to_linear(experiment.threshold_db);
    const double ref = reference_echo_energy(cfg, factors, stats);
    const double r0_trace = clutter.trace();

    std::vector<PdPoint> curve;
    for (double scnr_db : experiment.input_scnr_db) {
        double alpha = std::sqrt(db_to_linear(scnr_db) * r0_trace / ref);
        std::vector<int> hits(experiment.trials, 0);
        RandomStream base = rng.sub("scnr_" + std::to_string(scnr_db));
#pragma omp parallel for schedule(static) if (parallel)
        for (int trial = 0; trial < experiment.trials; ++trial) {
            RandomStream sub = base.sub(static_cast<std::uint64_t>(trial));
            CMat data = simulate_hypothesis_data(cfg, clutter, factors, stats, sensing_beams,
                                                 true, alpha, sub, experiment.snapshots);
            double stat =
                wmf_statistic(cfg, clutter, factors, stats, sensing_beams, data);
            hits[trial] = stat >= threshold ? 1 : 0;
        }
        int detections = 0;
        for (int h : hits) detections += h;
        double n = experiment.trials;
        double p = detections / n;
        // Wilson 95% interval
        const double z = 1.959963984540054;
        double denom = 1.0 + z * z / n;
        double center = (p + z * z / (2.0 * n)) / denom;
        double half = z * std::sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n)) / denom;
        curve.push_back({scnr_db, p, std::max(0.0, center - half), std::min(1.0, center + half)});
    }
    return curve;
}

KldSampleStats sampled_kld_report(const ScenarioConfig& cfg, const ClutterModel& clutter,
                                  const SensingChannelFactors& factors,
                                  const RcsStatistics& stats,
                                  const std::vector<CVec>& sensing_beams, int num_samples,
                                  const RandomStream& rng, bool parallel) {
    if (num_samples < 2) throw DisacError("sampled_kld_report: need at least two samples");
    std::vector<CMat> covs;
    for (const auto& w : sensing_beams) covs.push_back(w * w.adjoint());
    return expected_kld_monte_carlo(clutter, factors, stats, cfg.rcs_model, covs, num_samples,
                                    rng, parallel);
}

}  // namespace disac
