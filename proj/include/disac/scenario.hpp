#ifndef DISAC_SCENARIO_HPP
#define DISAC_SCENARIO_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "disac/common.hpp"
#include "disac/rcs.hpp"
#include "disac/rng.hpp"

namespace disac {

/// One configured clutter scatterer for link (rx node, tx node).
struct ClutterPoint {
    int node_rx = 0;
    int node_tx = 0;
    double angle_rad = 0.0;  // azimuth seen from the rx node
    double power_w = 0.0;
};

/// Worst-case SINR numerator variant. Paper keeps the nominal value; the
/// conservative form subtracts the uncertainty-ball radius from the amplitude.
enum class SinrNumeratorMode { Nominal, Conservative };

/// How residual phase-sync errors enter Monte-Carlo evaluation: deterministic
/// (1-2 delta) gain shrinkage, or per-node phases drawn uniformly in
/// [-delta, delta].
enum class SyncMode { Shrinkage, SampledPhases };

/// Full experiment description. Immutable after construction; all angles are
/// stored in radians and all powers in watts (linear scale).
struct ScenarioConfig {
    int num_nodes = 2;        // N
    int tx_antennas = 4;      // M_t
    int rx_antennas = 4;      // M_r
    int num_ues = 2;          // K

    std::vector<Vec3> node_positions;
    std::vector<Vec3> ue_positions;
    Vec3 target_position = Vec3::Zero();

    double wavelength = 0.03;          // m
    double antenna_spacing = 0.015;    // m
    double rician_factor = 3.1623;     // linear
    double power_budget = 1.0;         // W
    double comm_noise = 1e-3;          // W
    double sensing_noise = 1e-3;       // W
    double sync_error_bound = 0.01;    // delta, in [0, 0.5)
    double aoa_half_width = 0.034907;  // radians, same bound for every node
    double sinr_threshold = 10.0;      // Gamma_c, linear
    int snapshots = 100;               // T
    double sca_tolerance = 0.01;       // epsilon
    int sca_max_iterations = 30;

    RcsModel rcs_model = RcsModel::chi_square(4.0);
    RcsProfile rcs_profile;            // target-frame mean profile
    double target_heading = 0.0;       // radians
    std::vector<ClutterPoint> clutter;

    SinrNumeratorMode sinr_numerator = SinrNumeratorMode::Nominal;
    SyncMode sync_mode = SyncMode::Shrinkage;
    bool rcs_fluctuates_per_snapshot = false;

    std::uint64_t seed = 1;

    /// Throws DisacError describing the first violated invariant.
    void validate() const;
};

/// Per-pair angles and distances derived from the configured geometry.
struct GeometrySummary {
    // theta[n*K + k]: azimuth of UE k from node n's broadside (+x).
    std::vector<double> node_ue_angle;
    std::vector<double> node_ue_distance;
    // Estimated target AoA per node and the slant range.
    std::vector<double> node_target_angle;
    std::vector<double> node_target_distance;
    // Azimuth of each node as seen from the target's ground position
    // (aspect angles before heading correction).
    std::vector<double> target_node_aspect;

    double ue_angle(int n, int k, int num_ues) const { return node_ue_angle[n * num_ues + k]; }
    double ue_distance(int n, int k, int num_ues) const { return node_ue_distance[n * num_ues + k]; }
};

/// Table II defaults: M = 12 antennas per node, 30 dB power-to-noise budgets
/// referenced to the 100 m free-space gain, lambda = 0.03 m, gamma = 5 dB,
/// delta = 0.01, 2 degree AoA bound, K = 3, T = 100, epsilon = 0.01. Nodes sit
/// on a 100 m circle around the target's ground position; UEs are drawn
/// uniformly in a 200 m box using the scenario seed.
ScenarioConfig default_table2_config(int num_nodes = 2, std::uint64_t seed = 1);

/// Smaller variant of the same scenario for desk-scale runs.
ScenarioConfig desk_scale_config(int num_nodes = 2, int antennas_per_node = 4,
                                 int num_ues = 2, std::uint64_t seed = 1);

/// Free-space gains used throughout: downlink (lambda/(4 pi d))^2 and bistatic
/// radar lambda^2 / ((4 pi)^3 d_tx^2 d_rx^2).
double freespace_downlink_gain(double wavelength, double distance);
double freespace_bistatic_gain(double wavelength, double d_tx, double d_rx);

GeometrySummary derive_geometry(const ScenarioConfig& cfg);

/// Deterministic stream keyed by (cfg.seed, label).
RandomStream spawn_rng_stream(const ScenarioConfig& cfg, const std::string& label);

/// Place UEs uniformly in a box_m x box_m square centered on the origin using
/// the stream (cfg.seed, "ue_positions").
void draw_ue_positions(ScenarioConfig& cfg, double box_m);

/// Build the default clutter layout: one scatterer per (n, m) link, offset by
/// offset_rad from the node's target azimuth, clutter-to-noise ratio cnr
/// (linear) relative to the sensing noise power.
std::vector<ClutterPoint> default_clutter(const ScenarioConfig& cfg,
                                          const GeometrySummary& geom,
                                          double offset_rad, double cnr);

/// Key-value config file I/O. Schema documented in the README; angle fields
/// are written in degrees and converted on load. serialize(parse(x)) is
/// bit-exact for accepted configs.
ScenarioConfig load_config(const std::string& path);
ScenarioConfig parse_config(const std::string& text, const std::string& base_dir = ".");
std::string serialize_config(const ScenarioConfig& cfg);
void save_config(const ScenarioConfig& cfg, const std::string& path);

}  // namespace disac

#endif
