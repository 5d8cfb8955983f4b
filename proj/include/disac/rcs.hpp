#ifndef DISAC_RCS_HPP
#define DISAC_RCS_HPP

#include <string>
#include <vector>

#include "disac/common.hpp"
#include "disac/rng.hpp"

namespace disac {

/// Fluctuation law of the instantaneous RCS around its angle-dependent mean.
/// ChiSquare draws from Gamma(shape, mean/shape); SwerlingOne is the
/// exponential special case (shape 1) with variance equal to mean squared.
struct RcsModel {
    enum class Kind { ChiSquare, SwerlingOne };
    Kind kind = Kind::ChiSquare;
    double chi_square_shape = 4.0;

    static RcsModel chi_square(double shape) { return {Kind::ChiSquare, shape}; }
    static RcsModel swerling_one() { return {Kind::SwerlingOne, 1.0}; }

    double variance_of_mean(double mu) const {
        if (kind == Kind::SwerlingOne) return mu * mu;
        return mu * mu / chi_square_shape;
    }
    std::string name() const {
        return kind == Kind::SwerlingOne ? "swerling1" : "chisquare";
    }
};

/// Angle-indexed monostatic mean-RCS profile in a target-centered frame.
/// Lookups interpolate linearly with periodic wrap over [-pi, pi).
class RcsProfile {
  public:
    RcsProfile() = default;
    RcsProfile(std::vector<double> angles_rad, std::vector<double> means);

    /// Default two-lobe low-observable pattern 0.1 + 0.9 cos^4(theta),
    /// tabulated on a 1 degree grid.
    static RcsProfile default_two_lobe();

    /// Load `angle_deg, mean_rcs` rows. Angles may be in any order; blank
    /// lines and '#' comments are skipped.
    static RcsProfile from_csv(const std::string& path);

    double mean_at(double angle_rad) const;
    bool empty() const { return angles_.empty(); }
    const std::vector<double>& angles() const { return angles_; }
    const std::vector<double>& means() const { return means_; }

  private:
    std::vector<double> angles_;  // sorted, in [-pi, pi)
    std::vector<double> means_;
};

/// Second-order statistics of one bistatic link's RCS coefficient.
struct LinkRcs {
    double mean = 0.0;       // mu
    double variance = 0.0;   // nu^2
    double second_moment() const { return mean * mean + variance; }
};

/// Per-link (rx node n, tx node m) bistatic RCS statistics.
struct RcsStatistics {
    int num_nodes = 0;
    std::vector<LinkRcs> links;  // row-major (n, m)

    const LinkRcs& link(int n, int m) const { return links[n * num_nodes + m]; }
    LinkRcs& link(int n, int m) { return links[n * num_nodes + m]; }
};

/// cos(|dtheta|/2) monostatic-to-bistatic conversion, difference wrapped to
/// [0, pi]. Symmetric in its arguments and always <= 1.
double bistatic_scale(double theta_n, double theta_m);

/// Mean/variance of one link: the profile is read at the midpoint aspect
/// (transformed into the target frame), scaled by the bistatic factor, and the
/// variance follows the fluctuation model.
LinkRcs link_statistics(const RcsProfile& profile, const RcsModel& model,
                        double theta_n, double theta_m, double target_heading);

/// All-pairs statistics for the node aspect angles seen from the target.
RcsStatistics all_link_statistics(const RcsProfile& profile, const RcsModel& model,
                                  const std::vector<double>& node_aspects,
                                  double target_heading);

/// One instantaneous RCS draw per link (count columns), row-major (link, draw).
std::vector<double> sample_rcs(const LinkRcs& stats, const RcsModel& model,
                               RandomStream& rng, int count);
double sample_rcs_one(const LinkRcs& stats, const RcsModel& model, RandomStream& rng);

/// One sampled draw per grid angle, for polar-pattern plots.
struct PolarPattern {
    std::vector<double> angles_rad;
    std::vector<double> mean;
    std::vector<double> sampled;
};
PolarPattern emit_polar_pattern(const RcsProfile& profile, const RcsModel& model,
                                RandomStream& rng, double resolution_rad);

}  // namespace disac

#endif
