#ifndef DISAC_P3_HPP
#define DISAC_P3_HPP

#include <vector>

#include "disac/conic_program.hpp"
#include "disac/ip_solver.hpp"
#include "disac/robust_sinr.hpp"
#include "disac/sensing.hpp"

namespace disac {

enum class PowerConstraintMode { TotalSystem, PerNode, PerAntenna };

std::string to_string(PowerConstraintMode m);

/// Everything the surrogate SDP needs: channels, sensing factors and RCS
/// statistics at the worst-case AoAs, and the clutter model.
struct P3Inputs {
    const ScenarioConfig* cfg = nullptr;
    const DownlinkChannelSet* channels = nullptr;
    const SensingChannelFactors* factors = nullptr;
    const RcsStatistics* stats = nullptr;
    const ClutterModel* clutter = nullptr;
};

struct P3Options {
    PowerConstraintMode power_mode = PowerConstraintMode::TotalSystem;
    std::vector<double> budgets;  // empty: derive from cfg.power_budget
    UncertaintyScaling uncertainty = UncertaintyScaling::RelativeToChannel;
};

/// Assembled surrogate program plus the bookkeeping needed to map solver
/// output back onto complex-valued beamforming matrices.
struct P3Program {
    ConicProgram program;
    std::vector<int> comm_vars;     // embedded W_c^{(k)}
    std::vector<int> sensing_vars;  // embedded W_{s,n}
    int z_var = -1;
    int complex_dof = 0;  // K (N Mt)^2 + N Mt^2 + (N Mr)^2
    double comm_scale = 1.0;
    double sens_scale = 1.0;
    int num_nodes = 0, tx_antennas = 0, rx_antennas = 0, num_ues = 0;

    LiftedBeams extract_beams(const SolveReport& report) const;
    CMat extract_z(const SolveReport& report) const;  // physical units
};

/// Build the SCA surrogate at linearization point z_prev (physical units,
/// Hermitian PD): maximize tr(R0^{-1} Z) - tr(z_prev^{-1} Z) subject to the
/// expected-covariance equality, robust SINR constraints with SOC-bounded norm
/// terms, the selected power constraints, and PSD cones. Rank constraints are
/// relaxed. Data is internally rescaled (channels by their largest norm,
/// sensing quantities by the noise floor) so the solver sees O(1) rows.
P3Program assemble_p3(const P3Inputs& in, const CMat& z_prev, const P3Options& options = {});

/// Same program under a different power-constraint family; TotalSystem
/// reproduces assemble_p3's default constraint exactly.
P3Program alternative_power_constraints(const P3Inputs& in, const CMat& z_prev,
                                        PowerConstraintMode mode,
                                        const std::vector<double>& budgets = {});

}  // namespace disac

#endif
