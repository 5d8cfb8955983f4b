#include "disac/channel.hpp"

namespace disac {

CVec steering_vector(double theta, int num_elements, double spacing, double wavelength) {
    if (num_elements < 1) throw DisacError("steering_vector: need at least one element");
    CVec a(num_elements);
    double phase_step = 2.0 * kPi * spacing * std::sin(theta) / wavelength;
    for (int i = 0; i < num_elements; ++i)
        a(i) = std::polar(1.0, phase_step * i);
    return a;
}

DownlinkChannelSet draw_downlink_channels(const ScenarioConfig& cfg,
                                          const GeometrySummary& geom, RandomStream& rng) {
    DownlinkChannelSet set;
    set.num_nodes = cfg.num_nodes;
    set.num_ues = cfg.num_ues;
    set.tx_antennas = cfg.tx_antennas;
    set.per_node.resize(cfg.num_nodes * cfg.num_ues);
    set.pathloss.resize(cfg.num_nodes * cfg.num_ues);

    const double g = cfg.rician_factor;
    const double los_scale = std::sqrt(g / (g + 1.0));
    const double nlos_scale = std::sqrt(1.0 / (g + 1.0));

    for (int n = 0; n < cfg.num_nodes; ++n) {
        for (int k = 0; k < cfg.num_ues; ++k) {
            double d = geom.ue_distance(n, k, cfg.num_ues);
            double ell = freespace_downlink_gain(cfg.wavelength, d);
            CVec los = steering_vector(geom.ue_angle(n, k, cfg.num_ues), cfg.tx_antennas,
                                       cfg.antenna_spacing, cfg.wavelength);
            cplx prop_phase = std::polar(1.0, -2.0 * kPi * d / cfg.wavelength);
            CVec nlos(cfg.tx_antennas);
            for (int i = 0; i < cfg.tx_antennas; ++i) nlos(i) = rng.cgaussian();
            set.per_node[n * cfg.num_ues + k] =
                std::sqrt(ell) * (los_scale * prop_phase * los + nlos_scale * nlos);
            set.pathloss[n * cfg.num_ues + k] = ell;
        }
    }

    set.stacked.resize(cfg.num_ues);
    for (int k = 0; k < cfg.num_ues; ++k) {
        CVec hk(cfg.num_nodes * cfg.tx_antennas);
        for (int n = 0; n < cfg.num_nodes; ++n)
            hk.segment(n * cfg.tx_antennas, cfg.tx_antennas) = set.h(n, k);
        set.stacked[k] = hk;
    }
    return set;
}

CVec apply_sync_error(const CVec& h, double phase) {
    return std::polar(1.0, phase) * h;
}

SensingChannelFactors nominal_sensing_factors(const ScenarioConfig& cfg,
                                              const GeometrySummary& geom,
                                              const std::vector<double>& node_aoas) {
    if (static_cast<int>(node_aoas.size()) != cfg.num_nodes)
        throw DisacError("nominal_sensing_factors: AoA count mismatch");
    SensingChannelFactors f;
    f.num_nodes = cfg.num_nodes;
    f.shrinkage = 1.0 - 2.0 * cfg.sync_error_bound;
    f.links.resize(cfg.num_nodes * cfg.num_nodes);
    for (int n = 0; n < cfg.num_nodes; ++n) {
        double d_rx = geom.node_target_distance[n];
        CVec a_r = steering_vector(node_aoas[n], cfg.rx_antennas, cfg.antenna_spacing,
                                   cfg.wavelength);
        for (int m = 0; m < cfg.num_nodes; ++m) {
            double d_tx = geom.node_target_distance[m];
            SensingLink link;
            link.pathloss = freespace_bistatic_gain(cfg.wavelength, d_tx, d_rx);
            link.large_scale = std::sqrt(link.pathloss) *
                               std::polar(1.0, -2.0 * kPi * (d_rx + d_tx) / cfg.wavelength);
            link.a_rx = a_r;
            link.a_tx = steering_vector(node_aoas[m], cfg.tx_antennas, cfg.antenna_spacing,
                                        cfg.wavelength);
            link.response = link.a_rx * link.a_tx.transpose();
            f.links[n * cfg.num_nodes + m] = std::move(link);
        }
    }
    return f;
}

}  // namespace disac
