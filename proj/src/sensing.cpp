#include "disac/sensing.hpp"

#include <algorithm>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace disac {

CMat ClutterModel::full() const {
    CMat r = CMat::Zero(num_nodes * rx_antennas, num_nodes * rx_antennas);
    for (int n = 0; n < num_nodes; ++n)
        r.block(n * rx_antennas, n * rx_antennas, rx_antennas, rx_antennas) = blocks[n];
    return r;
}

double ClutterModel::trace() const {
    double t = 0.0;
    for (const auto& b : blocks) t += b.trace().real();
    return t;
}

ClutterModel build_clutter_covariance(const ScenarioConfig& cfg, const GeometrySummary& geom) {
    (void)geom;
    ClutterModel model;
    model.num_nodes = cfg.num_nodes;
    model.rx_antennas = cfg.rx_antennas;
    model.blocks.assign(cfg.num_nodes,
                        cfg.sensing_noise * CMat::Identity(cfg.rx_antennas, cfg.rx_antennas));
    for (const auto& c : cfg.clutter) {
        if (c.power_w < 0.0) throw DisacError("build_clutter_covariance: negative clutter power");
        CVec a = steering_vector(c.angle_rad, cfg.rx_antennas, cfg.antenna_spacing, cfg.wavelength);
        model.blocks[c.node_rx] += c.power_w * (a * a.adjoint());
    }
    for (auto& b : model.blocks) b = hermitize(b);
    return model;
}

std::vector<CMat> target_covariance_draw(const SensingChannelFactors& factors,
                                         const std::vector<double>& beta_links,
                                         const std::vector<CMat>& sensing_covs) {
    const int n_nodes = factors.num_nodes;
    if (static_cast<int>(beta_links.size()) != n_nodes * n_nodes)
        throw DisacError("target_covariance_draw: beta count mismatch");
    if (static_cast<int>(sensing_covs.size()) != n_nodes)
        throw DisacError("target_covariance_draw: covariance count mismatch");
    std::vector<CMat> blocks(n_nodes);
    for (int n = 0; n < n_nodes; ++n) {
        const int mr = static_cast<int>(factors.link(n, 0).a_rx.size());
        CMat rs = CMat::Zero(mr, mr);
        for (int m = 0; m < n_nodes; ++m) {
            CMat g = factors.effective_channel(n, m, beta_links[n * n_nodes + m]);
            rs += g * sensing_covs[m] * g.adjoint();
        }
        blocks[n] = hermitize(rs);
    }
    return blocks;
}

std::vector<CMat> expected_target_covariance(const SensingChannelFactors& factors,
                                             const RcsStatistics& stats,
                                             const std::vector<CMat>& sensing_covs) {
    const int n_nodes = factors.num_nodes;
    if (stats.num_nodes != n_nodes)
        throw DisacError("expected_target_covariance: stats size mismatch");
    std::vector<CMat> blocks(n_nodes);
    const double shrink2 = factors.shrinkage * factors.shrinkage;
    for (int n = 0; n < n_nodes; ++n) {
        const int mr = static_cast<int>(factors.link(n, 0).a_rx.size());
        CMat rs = CMat::Zero(mr, mr);
        for (int m = 0; m < n_nodes; ++m) {
            const SensingLink& l = factors.link(n, m);
            double w = shrink2 * l.pathloss * stats.link(n, m).second_moment();
            rs += w * (l.response * sensing_covs[m] * l.response.adjoint());
        }
        blocks[n] = hermitize(rs);
    }
    return blocks;
}

namespace {

/// log|X| from a Cholesky factorization; throws if X is not PD.
double logdet_pd(const CMat& x) {
    Eigen::LLT<CMat> llt(hermitize(x));
    if (llt.info() != Eigen::Success) throw DisacError("kld: matrix is not positive definite");
    double ld = 0.0;
    const auto& l = llt.matrixLLT();
    for (int i = 0; i < x.rows(); ++i) ld += std::log(l(i, i).real());
    return 2.0 * ld;
}

}  // namespace

double kld(const CMat& r0, const CMat& r1) {
    if (r0.rows() != r1.rows() || r0.cols() != r1.cols())
        throw DisacError("kld: dimension mismatch");
    Eigen::LLT<CMat> llt0(hermitize(r0));
    if (llt0.info() != Eigen::Success) throw DisacError("kld: R0 is not positive definite");
    double ld0 = 0.0;
    for (int i = 0; i < r0.rows(); ++i) ld0 += std::log(llt0.matrixLLT()(i, i).real());
    ld0 *= 2.0;
    double ld1 = logdet_pd(r1);
    // tr(R0^{-1} R1) without forming the inverse.
    double tr = llt0.solve(hermitize(r1)).trace().real();
    return ld0 - ld1 + tr - static_cast<double>(r0.rows());
}

double kld_blocks(const std::vector<CMat>& r0, const std::vector<CMat>& r1) {
    if (r0.size() != r1.size()) throw DisacError("kld_blocks: block count mismatch");
    double d = 0.0;
    for (std::size_t i = 0; i < r0.size(); ++i) d += kld(r0[i], r1[i]);
    return d;
}

double lower_bound_objective(const ClutterModel& clutter, const std::vector<CMat>& expected_rs) {
    if (expected_rs.size() != clutter.blocks.size())
        throw DisacError("lower_bound_objective: block count mismatch");
    double d = 0.0;
    for (std::size_t n = 0; n < expected_rs.size(); ++n)
        d += kld(clutter.blocks[n], clutter.blocks[n] + expected_rs[n]);
    return d;
}

double kld_for_draw(const ClutterModel& clutter, const SensingChannelFactors& factors,
                    const std::vector<double>& beta_links,
                    const std::vector<CMat>& sensing_covs) {
    auto rs = target_covariance_draw(factors, beta_links, sensing_covs);
    double d = 0.0;
    for (std::size_t n = 0; n < rs.size(); ++n)
        d += kld(clutter.blocks[n], clutter.blocks[n] + rs[n]);
    return d;
}

namespace {

std::vector<double> draw_all_links(const RcsStatistics& stats, const RcsModel& model,
                                   RandomStream& rng) {
    std::vector<double> beta(stats.links.size());
    for (std::size_t i = 0; i < beta.size(); ++i)
        beta[i] = sample_rcs_one(stats.links[i], model, rng);
    return beta;
}

KldSampleStats summarize(std::vector<double>& values) {
    KldSampleStats out;
    out.samples = static_cast<int>(values.size());
    if (values.empty()) return out;
    double sum = 0.0, sum2 = 0.0;
    for (double v : values) {
        sum += v;
        sum2 += v * v;
    }
    out.mean = sum / out.samples;
    out.stddev = out.samples > 1
                     ? std::sqrt(std::max(0.0, (sum2 - sum * sum / out.samples) / (out.samples - 1)))
                     : 0.0;
    std::sort(values.begin(), values.end());
    auto pct = [&](double q) {
        double pos = q * (values.size() - 1);
        std::size_t lo = static_cast<std::size_t>(pos);
        std::size_t hi = std::min(lo + 1, values.size() - 1);
        double t = pos - lo;
        return values[lo] * (1.0 - t) + values[hi] * t;
    };
    out.p10 = pct(0.10);
    out.p90 = pct(0.90);
    return out;
}

}  // namespace

KldSampleStats expected_kld_monte_carlo_serial(const ClutterModel& clutter,
                                               const SensingChannelFactors& factors,
                                               const RcsStatistics& stats, const RcsModel& model,
                                               const std::vector<CMat>& sensing_covs,
                                               int num_samples, const RandomStream& rng) {
    if (num_samples < 1) throw DisacError("expected_kld_monte_carlo: need at least one sample");
    std::vector<double> values(num_samples);
    for (int s = 0; s < num_samples; ++s) {
        RandomStream sub = rng.sub(static_cast<std::uint64_t>(s));
        auto beta = draw_all_links(stats, model, sub);
        values[s] = kld_for_draw(clutter, factors, beta, sensing_covs);
    }
    return summarize(values);
}

KldSampleStats expected_kld_monte_carlo(const ClutterModel& clutter,
                                        const SensingChannelFactors& factors,
                                        const RcsStatistics& stats, const RcsModel& model,
                                        const std::vector<CMat>& sensing_covs, int num_samples,
                                        const RandomStream& rng, bool parallel) {
    if (num_samples < 1) throw DisacError("expected_kld_monte_carlo: need at least one sample");
    if (!parallel)
        return expected_kld_monte_carlo_serial(clutter, factors, stats, model, sensing_covs,
                                               num_samples, rng);
    std::vector<double> values(num_samples);
#pragma omp parallel for schedule(static)
    for (int s = 0; s < num_samples; ++s) {
        RandomStream sub = rng.sub(static_cast<std::uint64_t>(s));
        auto beta = draw_all_links(stats, model, sub);
        values[s] = kld_for_draw(clutter, factors, beta, sensing_covs);
    }
    return summarize(values);
}

}  // namespace disac
