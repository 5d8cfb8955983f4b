#ifndef DISAC_OPTIMIZER_HPP
#define DISAC_OPTIMIZER_HPP

#include <optional>
#include <string>
#include <vector>

#include "disac/p3.hpp"
#include "disac/robust_sinr.hpp"
#include "disac/sensing.hpp"

namespace disac {

enum class OptimizerStatus { Converged, IterationCap, Infeasible, NumericalTrouble };

std::string to_string(OptimizerStatus s);

struct RankReport {
    std::vector<double> comm_ratio;     // lambda_1 / sum(lambda) per UE matrix
    std::vector<double> sensing_ratio;  // per node matrix
    bool randomization_used = false;
    bool returned_infeasible = false;   // randomization failed to restore feasibility
};

struct BeamformerSolution {
    OptimizerStatus status = OptimizerStatus::NumericalTrouble;
    std::string message;
    LiftedBeams lifted;
    VectorBeams recovered;
    std::vector<double> objective_trace;  // Jensen lower bound per SCA iterate
    double final_objective = 0.0;         // lower bound at the recovered vectors
    RankReport rank_report;
    std::vector<double> worst_case_aoa;   // per node
    std::vector<double> robust_sinrs;     // at the recovered vectors
    int sca_iterations = 0;

    /// Per-node precoder slices W_{c,n} (Mt x K, column k from w_c^{(k)}).
    std::vector<CMat> per_node_precoders(int num_nodes, int tx_antennas) const;
};

/// Sensing covariances (fraction * P / N / Mt) I per node: the isotropic probe
/// used for worst-case AoA selection and SCA initialization.
std::vector<CMat> isotropic_sensing_covs(const ScenarioConfig& cfg, double power_fraction);

/// Coordinate-wise worst-case AoA selection: per node, sweep a uniform odd
/// grid over [estimate - bound, estimate + bound] (other nodes fixed at the
/// current selection), score the Jensen bound under the isotropic probe, keep
/// the minimizer; ties resolve toward the estimate.
std::vector<double> select_worst_case_aoa(const ScenarioConfig& cfg,
                                          const GeometrySummary& geom,
                                          const ClutterModel& clutter,
                                          int grid_points_per_node = 9);

/// Same objective evaluation used by the AoA search, exposed for oracles.
double aoa_probe_objective(const ScenarioConfig& cfg, const GeometrySummary& geom,
                           const ClutterModel& clutter, const std::vector<double>& aoas);

/// Z^{(0)} = R0 + E[Rs] at the half-power isotropic probe.
CMat initialize_z(const ScenarioConfig& cfg, const ClutterModel& clutter,
                  const SensingChannelFactors& factors, const RcsStatistics& stats);

struct ScaOptions {
    P3Options p3;
    SolverSettings solver;
    std::optional<CMat> init_z;  // overrides initialize_z
};

/// Algorithm-1 driver: repeat assemble/solve/update until the Jensen bound
/// changes by at most cfg.sca_tolerance or the iteration cap hits, then
/// recover rank-one beamformers and re-verify feasibility in the complex
/// domain.
BeamformerSolution sca_optimize(const ScenarioConfig& cfg, const DownlinkChannelSet& channels,
                                const SensingChannelFactors& factors, const RcsStatistics& stats,
                                const ClutterModel& clutter, const ScaOptions& options = {});

struct RankOneRecovery {
    CVec vector;
    double eigen_ratio = 0.0;
    bool randomized = false;
};

/// Principal eigenvector when lambda_1/sum(lambda) >= 0.999 (power preserved,
/// first nonzero entry rotated real positive); otherwise 200 Gaussian
/// randomization draws scored by the given objective callback.
RankOneRecovery recover_rank_one(const CMat& lifted, RandomStream& rng);

}  // namespace disac

#endif
