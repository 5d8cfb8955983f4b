#ifndef DISAC_SENSING_HPP
#define DISAC_SENSING_HPP

#include <vector>

#include "disac/channel.hpp"
#include "disac/common.hpp"
#include "disac/rcs.hpp"
#include "disac/rng.hpp"
#include "disac/scenario.hpp"

namespace disac {

/// Clutter-plus-noise covariance per receive node: R_{0,n} = sum_m R^clu_{n,m}
/// + sigma_s^2 I. The full R0 is block-diagonal over nodes.
struct ClutterModel {
    int num_nodes = 0;
    int rx_antennas = 0;
    std::vector<CMat> blocks;  // R_{0,n}, each rx_antennas x rx_antennas

    const CMat& block(int n) const { return blocks[n]; }
    CMat full() const;
    double trace() const;
};

ClutterModel build_clutter_covariance(const ScenarioConfig& cfg, const GeometrySummary& geom);

/// Per-node blocks of the target covariance for one set of RCS draws:
/// block n = sum_m G_{n,m} W_{s,m} G_{n,m}^H with G = shrinkage * L * beta * A.
std::vector<CMat> target_covariance_draw(const SensingChannelFactors& factors,
                                         const std::vector<double>& beta_links,
                                         const std::vector<CMat>& sensing_covs);

/// Expected target covariance: block n = shrinkage^2 sum_m |L|^2 (mu^2 + nu^2)
/// A W A^H, the RCS entering through its second moment.
std::vector<CMat> expected_target_covariance(const SensingChannelFactors& factors,
                                             const RcsStatistics& stats,
                                             const std::vector<CMat>& sensing_covs);

/// Closed-form Gaussian KLD log|R0| - log|R1| + tr(R0^{-1} R1) - dim, computed
/// per block from Cholesky factorizations. Requires R1 = R0 + PSD.
double kld(const CMat& r0, const CMat& r1);
double kld_blocks(const std::vector<CMat>& r0, const std::vector<CMat>& r1);

/// Jensen lower bound on the expected KLD, evaluated at E[Rs].
double lower_bound_objective(const ClutterModel& clutter, const std::vector<CMat>& expected_rs);

struct KldSampleStats {
    double mean = 0.0;
    double p10 = 0.0;
    double p90 = 0.0;
    double stddev = 0.0;
    int samples = 0;
};

/// Sample-average KLD over independent RCS draws. The parallel variant
/// partitions draws across OpenMP workers with per-draw substreams and is
/// bit-identical to the serial one.
KldSampleStats expected_kld_monte_carlo(const ClutterModel& clutter,
                                        const SensingChannelFactors& factors,
                                        const RcsStatistics& stats, const RcsModel& model,
                                        const std::vector<CMat>& sensing_covs, int num_samples,
                                        const RandomStream& rng, bool parallel = true);

KldSampleStats expected_kld_monte_carlo_serial(const ClutterModel& clutter,
                                               const SensingChannelFactors& factors,
                                               const RcsStatistics& stats, const RcsModel& model,
                                               const std::vector<CMat>& sensing_covs,
                                               int num_samples, const RandomStream& rng);

/// One KLD evaluation for a single joint RCS draw (helper shared by the MC
/// variants and the detection harness).
double kld_for_draw(const ClutterModel& clutter, const SensingChannelFactors& factors,
                    const std::vector<double>& beta_links,
                    const std::vector<CMat>& sensing_covs);

}  // namespace disac

#endif
