#ifndef DISAC_DETECTION_HPP
#define DISAC_DETECTION_HPP

#include <vector>

#include "disac/robust_sinr.hpp"
#include "disac/sensing.hpp"

namespace disac {

/// Detection experiment description: trials per grid point, the input-SCNR
/// grid, the fixed output-SCNR decision threshold, and how sync errors enter
/// the simulated data.
struct DetectionExperiment {
    int trials = 1000;
    std::vector<double> input_scnr_db;
    double threshold_db = 10.0;
    int snapshots = 100;
    SyncMode sync_mode = SyncMode::Shrinkage;
    bool rcs_per_snapshot = false;
};

struct PdPoint {
    double input_scnr_db = 0.0;
    double pd = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
};

/// Deterministic orthogonal unit-modulus sensing sequences (rows of a DFT);
/// requires T >= N.
CMat sensing_waveforms(int num_nodes, int snapshots);

/// Echo signature of waveform m: the stacked mean received vector
/// shrinkage * L * mu * A * w_m per receive node (estimated AoAs, mean RCS).
CVec nominal_echo_signature(const SensingChannelFactors& factors, const RcsStatistics& stats,
                            const std::vector<CVec>& sensing_beams, int m);

/// Scenario-referenced input SCNR: the nominal echo energy of a full-power
/// isotropic probe divided by tr(R0). The per-solution echo is scaled by a
/// common amplitude alpha to hit a grid value, so better beamformers keep
/// their output-SCNR advantage at matched input SCNR.
double reference_echo_energy(const ScenarioConfig& cfg, const SensingChannelFactors& factors,
                             const RcsStatistics& stats);

/// One received block (N Mr x T) under the chosen hypothesis: clutter + noise
/// drawn from R0, plus (H1) the echo sum_m G w_m s_m with a fresh RCS draw
/// held fixed across the dwell. echo_scale multiplies the echo amplitude.
CMat simulate_hypothesis_data(const ScenarioConfig& cfg, const ClutterModel& clutter,
                              const SensingChannelFactors& factors, const RcsStatistics& stats,
                              const std::vector<CVec>& sensing_beams, bool target_present,
                              double echo_scale, RandomStream& rng, int snapshots);

/// Whitened matched filter: whiten by R0, correlate each waveform across the
/// dwell, match to the whitened nominal signature, and normalize so the H0
/// mean is one (0 dB).
double wmf_statistic(const ScenarioConfig& cfg, const ClutterModel& clutter,
                     const SensingChannelFactors& factors, const RcsStatistics& stats,
                     const std::vector<CVec>& sensing_beams, const CMat& data);

/// Pd over the input-SCNR grid with Wilson 95% confidence intervals. Trials
/// use per-index substreams; the OpenMP path is bit-identical to the serial
/// one.
std::vector<PdPoint> detection_probability(const ScenarioConfig& cfg,
                                           const ClutterModel& clutter,
                                           const SensingChannelFactors& factors,
                                           const RcsStatistics& stats,
                                           const std::vector<CVec>& sensing_beams,
                                           const DetectionExperiment& experiment,
                                           const RandomStream& rng, bool parallel = true);

/// Sample-average KLD with the 10-90% band for a solution's sensing beams.
KldSampleStats sampled_kld_report(const ScenarioConfig& cfg, const ClutterModel& clutter,
                                  const SensingChannelFactors& factors,
                                  const RcsStatistics& stats,
                                  const std::vector<CVec>& sensing_beams, int num_samples,
                                  const RandomStream& rng, bool parallel = true);

}  // namespace disac

#endif
