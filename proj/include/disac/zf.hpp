#ifndef DISAC_ZF_HPP
#define DISAC_ZF_HPP

#include <string>
#include <vector>

#include "disac/robust_sinr.hpp"
#include "disac/sensing.hpp"

namespace disac {

/// Zero-forcing benchmark solution for one power split rho.
struct ZfSolution {
    bool feasible = false;
    double rho = 0.0;  // fraction of the budget on communication
    VectorBeams beams;
    std::vector<double> robust_sinrs;
    double lower_bound_kld = 0.0;
    std::vector<std::string> warnings;
};

/// Pseudo-inverse precoders on the stacked channel matrix, equal per-UE power
/// comm_power / K; zero inter-user interference at the nominal channels.
std::vector<CVec> zf_comm_precoder(const std::vector<CVec>& stacked_channels, double comm_power);

/// Per-node sensing beams: the conjugate target steering projected onto the
/// null space of that node's UE channels, equal power sense_power / N. A
/// numerically vanishing projection falls back to the unprojected steering
/// and appends a warning.
std::vector<CVec> zf_sense_beams(const ScenarioConfig& cfg, const DownlinkChannelSet& channels,
                                 const std::vector<double>& target_aoas, double sense_power,
                                 std::vector<std::string>* warnings = nullptr);

/// One-dimensional grid search over rho: among splits whose robust SINRs meet
/// the threshold, the one maximizing the Jensen-bound KLD wins (lowest rho on
/// ties). Returns feasible = false when no grid point qualifies.
ZfSolution zf_grid_search(const ScenarioConfig& cfg, const DownlinkChannelSet& channels,
                          const SensingChannelFactors& factors, const RcsStatistics& stats,
                          const ClutterModel& clutter, const std::vector<double>& target_aoas,
                          const std::vector<double>& rho_grid = {});

/// Default grid 0.05, 0.10, ..., 0.95.
std::vector<double> default_rho_grid();

}  // namespace disac

#endif
