#include "disac/zf.hpp"

#include <cmath>

#include "disac/channel.hpp"

namespace disac {

std::vector<double> default_rho_grid() {
    std::vector<double> grid;
    for (int i = 1; i <= 19; ++i) grid.push_back(0.05 * i);
    return grid;
}

std::vector<CVec> zf_comm_precoder(const std::vector<CVec>& stacked_channels, double comm_power) {
    const int k_ues = static_cast<int>(stacked_channels.size());
    if (k_ues == 0) return {};
    const int dim = static_cast<int>(stacked_channels[0].size());
    CMat h(dim, k_ues);
    for (int k = 0; k < k_ues; ++k) h.col(k) = stacked_channels[k];
    CMat gram = h.adjoint() * h;
    Eigen::FullPivLU<CMat> lu(gram);
    if (!lu.isInvertible()) throw DisacError("zf_comm_precoder: rank-deficient channel matrix");
    CMat f = h * lu.inverse();
    std::vector<CVec> out(k_ues);
    double per_ue = comm_power / k_ues;
    for (int k = 0; k < k_ues; ++k) {
        double norm = f.col(k).norm();
        if (norm <= 0.0) throw DisacError("zf_comm_precoder: zero precoder column");
        out[k] = f.col(k) * (std::sqrt(per_ue) / norm);
    }
    return out;
}

std::vector<CVec> zf_sense_beams(const ScenarioConfig& cfg, const DownlinkChannelSet& channels,
                                 const std::vector<double>& target_aoas, double sense_power,
                                 std::vector<std::string>* warnings) {
    const int mt = cfg.tx_antennas;
    std::vector<CVec> out(cfg.num_nodes);
    double per_node = sense_power / cfg.num_nodes;
    for (int n = 0; n < cfg.num_nodes; ++n) {
        // Transmit gain toward the target is a_t^T w, so the matched direction
        // is the conjugate steering vector.
        CVec steer = steering_vector(target_aoas[n], mt, cfg.antenna_spacing, cfg.wavelength)
                         .conjugate();
        CMat hn(mt, cfg.num_ues);
        for (int k = 0; k < cfg.num_ues; ++k) hn.col(k) = channels.h(n, k);
        // Orthonormal basis of the UE-channel span, then project out.
        Eigen::HouseholderQR<CMat> qr(hn);
        CMat q = qr.householderQ() * CMat::Identity(mt, std::min(mt, cfg.num_ues));
        CVec w = steer - q * (q.adjoint() * steer);
        if (w.norm() <= 1e-9 * steer.norm()) {
            if (warnings)
                warnings->push_back("node " + std::to_string(n) +
                                    ": target steering lies in the UE-channel span; using "
                                    "unprojected steering");
            w = steer;
        }
        out[n] = w * (std::sqrt(per_node) / w.norm());
    }
    return out;
}

ZfSolution zf_grid_search(const ScenarioConfig& cfg, const DownlinkChannelSet& channels,
                          const SensingChannelFactors& factors, const RcsStatistics& stats,
                          const ClutterModel& clutter, const std::vector<double>& target_aoas,
                          const std::vector<double>& rho_grid) {
    std::vector<double> grid = rho_grid.empty() ? default_rho_grid() : rho_grid;
    ZfSolution best;
    for (double rho : grid) {
        ZfSolution cand;
        cand.rho = rho;
        cand.beams.comm = zf_comm_precoder(channels.stacked, rho * cfg.power_budget);
        cand.beams.sensing = zf_sense_beams(cfg, channels, target_aoas,
                                            (1.0 - rho) * cfg.power_budget, &cand.warnings);
        LiftedBeams lifted = cand.beams.lift();
        cand.robust_sinrs = robust_sinr_all(channels, lifted, cfg.sync_error_bound,
                                            cfg.comm_noise, UncertaintyScaling::RelativeToChannel,
                                            cfg.sinr_numerator);
        bool ok = true;
        for (double s : cand.robust_sinrs) ok = ok && s >= cfg.sinr_threshold;
        if (!ok) continue;
        cand.feasible = true;
        cand.lower_bound_kld = lower_bound_objective(
            clutter, expected_target_covariance(factors, stats, lifted.sensing));
        if (!best.feasible || cand.lower_bound_kld > best.lower_bound_kld) best = cand;
    }
    return best;
}

}  // namespace disac
