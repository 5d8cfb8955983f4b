#ifndef DISAC_EXPERIMENTS_HPP
#define DISAC_EXPERIMENTS_HPP

#include <string>
#include <vector>

#include "disac/detection.hpp"
#include "disac/optimizer.hpp"
#include "disac/zf.hpp"

namespace disac {

enum class ExperimentKind { Convergence, Tradeoff, Detection, PowerModes, RcsModels, PolarPattern };

struct DeploymentVariant {
    int num_nodes;
    int antennas;
};

/// One experiment description: which figure-style study to run, the base
/// scenario, and the sweep axes.
struct ExperimentSpec {
    ExperimentKind kind = ExperimentKind::Tradeoff;
    ScenarioConfig scenario;
    std::string scenario_text;  // serialized form used for the manifest hash
    std::vector<std::uint64_t> seeds{1};
    std::vector<double> gamma_db{0.0, 4.0, 8.0, 12.0, 16.0, 20.0};
    std::vector<double> delta{0.01, 0.05};
    std::vector<DeploymentVariant> variants{{2, 4}, {1, 8}};
    std::vector<double> aoa_deg{2.0, 5.0};
    std::vector<double> scnr_db;
    int trials = 1000;
    double threshold_db = 10.0;
    int samples = 1000;

    static ExperimentSpec load(const std::string& path);
    static ExperimentSpec parse(const std::string& text, const std::string& base_dir);
    void validate() const;
};

/// Everything derived from one scenario draw: geometry, clutter, channels,
/// the worst-case AoA selection, and sensing factors/statistics at both the
/// worst-case angles (optimization) and the estimated angles (evaluation).
struct ScenarioRealization {
    ScenarioConfig cfg;
    GeometrySummary geom;
    ClutterModel clutter;
    DownlinkChannelSet channels;
    std::vector<double> worst_aoa;
    SensingChannelFactors factors_worst, factors_nominal;
    RcsStatistics stats_worst, stats_nominal;
};

ScenarioRealization realize_scenario(const ScenarioConfig& cfg);

/// Copy of a scenario with a different node/antenna deployment and seed:
/// nodes are re-placed on the base circle radius, UEs redrawn, clutter
/// rebuilt with the default layout.
ScenarioConfig with_deployment(const ScenarioConfig& base, int num_nodes, int antennas,
                               std::uint64_t seed);
ScenarioConfig with_seed(const ScenarioConfig& base, std::uint64_t seed);

/// Proposed-design pipeline on one realization: SCA from the standard start,
/// retried from the ZF-matched start if the ZF benchmark ends higher.
struct PipelineResult {
    BeamformerSolution solution;
    ZfSolution zf;
};
PipelineResult run_pipeline(const ScenarioRealization& real,
                            PowerConstraintMode mode = PowerConstraintMode::TotalSystem);

struct RunResult {
    int exit_code = 0;  // 0 ok, 2 infeasible, 3 solver trouble
    std::vector<std::string> outputs;
    std::string message;
};

RunResult run_experiment(const ExperimentSpec& spec, const std::string& out_dir);

/// Conic-program text dump for the first SCA iterate of the spec's scenario.
std::string dump_first_program(const ScenarioConfig& cfg);

std::uint64_t config_hash(const std::string& serialized);
std::string revision_string();

}  // namespace disac

#endif
