#ifndef DISAC_CHANNEL_HPP
#define DISAC_CHANNEL_HPP

#include <vector>

#include "disac/common.hpp"
#include "disac/rng.hpp"
#include "disac/scenario.hpp"

namespace disac {

/// ULA steering vector: element i carries phase 2 pi d0 i sin(theta) / lambda,
/// first element at phase zero.
CVec steering_vector(double theta, int num_elements, double spacing, double wavelength);

/// Realized downlink channels for one scenario draw.
struct DownlinkChannelSet {
    int num_nodes = 0;
    int num_ues = 0;
    int tx_antennas = 0;
    std::vector<CVec> per_node;   // h_{n,k}, indexed n*K + k
    std::vector<double> pathloss; // ell_{n,k}, same indexing
    std::vector<CVec> stacked;    // h_k, concatenation over nodes

    const CVec& h(int n, int k) const { return per_node[n * num_ues + k]; }
    double ell(int n, int k) const { return pathloss[n * num_ues + k]; }
    const CVec& h_stacked(int k) const { return stacked[k]; }
};

/// Rician draw per Eq.-style model: sqrt(ell) ( sqrt(g/(g+1)) e^{-j2pi d/lambda} a(theta)
/// + sqrt(1/(g+1)) w ), w with unit-variance CSCG entries.
DownlinkChannelSet draw_downlink_channels(const ScenarioConfig& cfg,
                                          const GeometrySummary& geom, RandomStream& rng);

/// Common phase rotation from a residual sync error; preserves the norm.
CVec apply_sync_error(const CVec& h, double phase);

/// Deterministic factors of one bistatic sensing link: the effective channel
/// for an RCS draw beta is shrinkage * L * beta * A.
struct SensingLink {
    cplx large_scale = 0.0;  // L_{n,m}, |L|^2 = pathloss
    double pathloss = 0.0;   // P_{n,m}
    CMat response;           // A_{n,m} = a_r(theta_n) a_t(theta_m)^T
    CVec a_rx;               // receive steering at node n
    CVec a_tx;               // transmit steering at node m
};

/// All links of the sensing network at the given per-node AoAs, plus the
/// scalar coherence-loss factor (1 - 2 delta).
struct SensingChannelFactors {
    int num_nodes = 0;
    double shrinkage = 1.0;
    std::vector<SensingLink> links;  // row-major (rx n, tx m)

    const SensingLink& link(int n, int m) const { return links[n * num_nodes + m]; }
    CMat effective_channel(int n, int m, double beta) const {
        const SensingLink& l = link(n, m);
        return shrinkage * l.large_scale * beta * l.response;
    }
};

SensingChannelFactors nominal_sensing_factors(const ScenarioConfig& cfg,
                                              const GeometrySummary& geom,
                                              const std::vector<double>& node_aoas);

}  // namespace disac

#endif
