#ifndef DISAC_ROBUST_SINR_HPP
#define DISAC_ROBUST_SINR_HPP

#include <vector>

#include "disac/channel.hpp"
#include "disac/common.hpp"

namespace disac {

/// Lifted beamforming covariances: one (N Mt) x (N Mt) matrix per UE and one
/// Mt x Mt matrix per node.
struct LiftedBeams {
    std::vector<CMat> comm;
    std::vector<CMat> sensing;
    double total_power() const;
};

/// Recovered rank-one beamformers: stacked per-UE vectors and per-node
/// sensing vectors.
struct VectorBeams {
    std::vector<CVec> comm;
    std::vector<CVec> sensing;
    LiftedBeams lift() const;
    double total_power() const;
};

/// How the CSI uncertainty-ball radius is measured. Absolute uses the plain
/// delta of the worst-case expressions (stacked radius sqrt(N) delta, per-node
/// radius delta). RelativeToChannel scales delta by the channel norm, which is
/// the phase-error reading of the effective-channel model: || (e^{j phi} - 1) h ||
/// <= |phi| ||h||.
enum class UncertaintyScaling { Absolute, RelativeToChannel };

struct UeUncertainty {
    double comm_stacked = 0.0;          // radius of the stacked ball for UE k
    std::vector<double> sensing_node;   // per-node radius for UE k
};

UeUncertainty ue_uncertainty(int k, const DownlinkChannelSet& channels, double delta,
                             UncertaintyScaling scaling);

/// Worst-case desired signal power tr(Q_k W_c^{(k)}), the nominal value.
double worst_case_signal(const CVec& h_k, const CMat& w_ck);

/// Conservative alternative that keeps the uncertainty in the numerator:
/// max(0, tr(Q W) - 2 r ||W h||) for lifted input.
double worst_case_signal_conservative(const CVec& h_k, const CMat& w_ck, double radius);

/// Worst-case interference-plus-noise at UE k: for each interfering lifted
/// matrix W with channel h and ball radius r, the bound contributes
/// tr(h h^H W) + r^2 tr(W) + r ||W h|| + r ||h^H W||. The two norm terms
/// coincide for Hermitian W and both are evaluated; a relative mismatch above
/// 1e-10 is rejected as a non-Hermitian input.
double worst_case_interference(int k, const DownlinkChannelSet& channels,
                               const LiftedBeams& beams, const UeUncertainty& radii,
                               double comm_noise);

/// Worst-case SINR of UE k: worst_case_signal / worst_case_interference.
double robust_sinr_value(int k, const DownlinkChannelSet& channels, const LiftedBeams& beams,
                         double delta, double comm_noise,
                         UncertaintyScaling scaling = UncertaintyScaling::RelativeToChannel,
                         SinrNumeratorMode numerator = SinrNumeratorMode::Nominal);

/// Nominal SINR at e = 0 (no uncertainty terms).
double nominal_sinr_value(int k, const DownlinkChannelSet& channels, const LiftedBeams& beams,
                          double comm_noise);

/// Convenience: all K worst-case SINRs.
std::vector<double> robust_sinr_all(const DownlinkChannelSet& channels, const LiftedBeams& beams,
                                    double delta, double comm_noise,
                                    UncertaintyScaling scaling = UncertaintyScaling::RelativeToChannel,
                                    SinrNumeratorMode numerator = SinrNumeratorMode::Nominal);

}  // namespace disac

#endif
