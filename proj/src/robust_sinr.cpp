#include "disac/robust_sinr.hpp"

#include <cmath>

namespace disac {

double LiftedBeams::total_power() const {
    double p = 0.0;
    for (const auto& w : comm) p += w.trace().real();
    for (const auto& w : sensing) p += w.trace().real();
    return p;
}

LiftedBeams VectorBeams::lift() const {
    LiftedBeams out;
    out.comm.reserve(comm.size());
    out.sensing.reserve(sensing.size());
    for (const auto& w : comm) out.comm.push_back(w * w.adjoint());
    for (const auto& w : sensing) out.sensing.push_back(w * w.adjoint());
    return out;
}

double VectorBeams::total_power() const {
    double p = 0.0;
    for (const auto& w : comm) p += w.squaredNorm();
    for (const auto& w : sensing) p += w.squaredNorm();
    return p;
}

UeUncertainty ue_uncertainty(int k, const DownlinkChannelSet& channels, double delta,
                             UncertaintyScaling scaling) {
    UeUncertainty u;
    u.sensing_node.resize(channels.num_nodes);
    if (scaling == UncertaintyScaling::Absolute) {
        u.comm_stacked = std::sqrt(static_cast<double>(channels.num_nodes)) * delta;
        for (int n = 0; n < channels.num_nodes; ++n) u.sensing_node[n] = delta;
    } else {
        u.comm_stacked = delta * channels.h_stacked(k).norm();
        for (int n = 0; n < channels.num_nodes; ++n)
            u.sensing_node[n] = delta * channels.h(n, k).norm();
    }
    return u;
}

double worst_case_signal(const CVec& h_k, const CMat& w_ck) {
    return (h_k.adjoint() * w_ck * h_k)(0).real();
}

double worst_case_signal_conservative(const CVec& h_k, const CMat& w_ck, double radius) {
    double nominal = worst_case_signal(h_k, w_ck);
    double norm = (w_ck * h_k).norm();
    return std::max(0.0, nominal - 2.0 * radius * norm);
}

namespace {

/// One interferer's worst-case contribution over a ball of the given radius.
double interference_term(const CVec& h, const CMat& w, double radius) {
    double nominal = (h.adjoint() * w * h)(0).real();
    double n1 = (w * h).norm();           // ||W h||
    double n2 = (w.adjoint() * h).norm(); // ||h^H W|| as a column vector
    double scale = std::max(n1, n2);
    if (scale > 0.0 && std::abs(n1 - n2) > 1e-10 * scale)
        throw DisacError("worst_case_interference: lifted matrix is not Hermitian");
    return nominal + radius * radius * w.trace().real() + radius * n1 + radius * n2;
}

}  // namespace

double worst_case_interference(int k, const DownlinkChannelSet& channels,
                               const LiftedBeams& beams, const UeUncertainty& radii,
                               double comm_noise) {
    double total = comm_noise;
    const CVec& hk = channels.h_stacked(k);
    for (int j = 0; j < static_cast<int>(beams.comm.size()); ++j) {
        if (j == k) continue;
        total += interference_term(hk, beams.comm[j], radii.comm_stacked);
    }
    for (int n = 0; n < channels.num_nodes; ++n)
        total += interference_term(channels.h(n, k), beams.sensing[n], radii.sensing_node[n]);
    return total;
}

double robust_sinr_value(int k, const DownlinkChannelSet& channels, const LiftedBeams& beams,
                         double delta, double comm_noise, UncertaintyScaling scaling,
                         SinrNumeratorMode numerator) {
    UeUncertainty radii = ue_uncertainty(k, channels, delta, scaling);
    double num = numerator == SinrNumeratorMode::Nominal
                     ? worst_case_signal(channels.h_stacked(k), beams.comm[k])
                     : worst_case_signal_conservative(channels.h_stacked(k), beams.comm[k],
                                                      radii.comm_stacked);
    return num / worst_case_interference(k, channels, beams, radii, comm_noise);
}

double nominal_sinr_value(int k, const DownlinkChannelSet& channels, const LiftedBeams& beams,
                          double comm_noise) {
    const CVec& hk = channels.h_stacked(k);
    double num = worst_case_signal(hk, beams.comm[k]);
    double den = comm_noise;
    for (int j = 0; j < static_cast<int>(beams.comm.size()); ++j)
        if (j != k) den += (hk.adjoint() * beams.comm[j] * hk)(0).real();
    for (int n = 0; n < channels.num_nodes; ++n) {
        const CVec& hnk = channels.h(n, k);
        den += (hnk.adjoint() * beams.sensing[n] * hnk)(0).real();
    }
    return num / den;
}

std::vector<double> robust_sinr_all(const DownlinkChannelSet& channels, const LiftedBeams& beams,
                                    double delta, double comm_noise, UncertaintyScaling scaling,
                                    SinrNumeratorMode numerator) {
    std::vector<double> out(channels.num_ues);
    for (int k = 0; k < channels.num_ues; ++k)
        out[k] = robust_sinr_value(k, channels, beams, delta, comm_noise, scaling, numerator);
    return out;
}

}  // namespace disac
