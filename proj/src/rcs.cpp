#include "disac/rcs.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

namespace disac {

RcsProfile::RcsProfile(std::vector<double> angles_rad, std::vector<double> means) {
    if (angles_rad.size() != means.size())
        throw DisacError("RcsProfile: angle/mean size mismatch");
    if (angles_rad.empty()) throw DisacError("RcsProfile: empty profile");
    std::vector<std::size_t> order(angles_rad.size());
    std::iota(order.begin(), order.end(), 0);
    for (auto& a : angles_rad) a = wrap_angle(a);
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return angles_rad[i] < angles_rad[j]; });
    angles_.reserve(order.size());
    means_.reserve(order.size());
    for (std::size_t i : order) {
        if (means[i] < 0.0) throw DisacError("RcsProfile: negative mean RCS");
        if (!angles_.empty() && angles_rad[i] == angles_.back()) continue;
        angles_.push_back(angles_rad[i]);
        means_.push_back(means[i]);
    }
}

RcsProfile RcsProfile::default_two_lobe() {
    std::vector<double> a, m;
    for (int deg = -180; deg < 180; ++deg) {
        double th = deg_to_rad(deg);
        double c = std::cos(th);
        a.push_back(th);
        m.push_back(0.1 + 0.9 * c * c * c * c);
    }
    return RcsProfile(std::move(a), std::move(m));
}

RcsProfile RcsProfile::from_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DisacError("RcsProfile: cannot open " + path);
    std::vector<double> a, m;
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t\r,") == std::string::npos) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        double deg = 0.0, mean = 0.0;
        if (!(ss >> deg >> mean)) throw DisacError("RcsProfile: bad row: " + line);
        a.push_back(deg_to_rad(deg));
        m.push_back(mean);
    }
    return RcsProfile(std::move(a), std::move(m));
}

double RcsProfile::mean_at(double angle_rad) const {
    if (angles_.empty()) throw DisacError("RcsProfile: empty profile");
    if (angles_.size() == 1) return means_[0];
    double th = wrap_angle(angle_rad);
    auto it = std::upper_bound(angles_.begin(), angles_.end(), th);
    std::size_t hi = static_cast<std::size_t>(it - angles_.begin());
    double a0, a1, m0, m1;
    if (hi == 0 || hi == angles_.size()) {
        // Periodic segment between the last and first grid points.
        a0 = angles_.back();
        a1 = angles_.front() + 2.0 * kPi;
        m0 = means_.back();
        m1 = means_.front();
        if (hi == 0) th += 2.0 * kPi;
    } else {
        a0 = angles_[hi - 1];
        a1 = angles_[hi];
        m0 = means_[hi - 1];
        m1 = means_[hi];
    }
    double t = (a1 > a0) ? (th - a0) / (a1 - a0) : 0.0;
    return m0 + t * (m1 - m0);
}

double bistatic_scale(double theta_n, double theta_m) {
    double d = std::abs(wrap_angle(theta_n - theta_m));
    return std::cos(0.5 * d);
}

LinkRcs link_statistics(const RcsProfile& profile, const RcsModel& model,
                        double theta_n, double theta_m, double target_heading) {
    if (profile.empty()) throw DisacError("link_statistics: empty profile");
    // Midpoint along the shorter arc between the two aspects.
    double half_diff = 0.5 * wrap_angle(theta_m - theta_n);
    double aspect = wrap_angle(theta_n + half_diff - target_heading);
    double sigma_bar = profile.mean_at(aspect);
    LinkRcs out;
    out.mean = bistatic_scale(theta_n, theta_m) * sigma_bar;
    out.variance = model.variance_of_mean(out.mean);
    return out;
}

RcsStatistics all_link_statistics(const RcsProfile& profile, const RcsModel& model,
                                  const std::vector<double>& node_aspects,
                                  double target_heading) {
    RcsStatistics stats;
    stats.num_nodes = static_cast<int>(node_aspects.size());
    stats.links.resize(node_aspects.size() * node_aspects.size());
    for (int n = 0; n < stats.num_nodes; ++n)
        for (int m = 0; m < stats.num_nodes; ++m)
            stats.link(n, m) = link_statistics(profile, model, node_aspects[n],
                                               node_aspects[m], target_heading);
    return stats;
}

double sample_rcs_one(const LinkRcs& stats, const RcsModel& model, RandomStream& rng) {
    if (stats.mean <= 0.0) return 0.0;
    if (model.kind == RcsModel::Kind::SwerlingOne) return rng.exponential(stats.mean);
    return rng.gamma(model.chi_square_shape, stats.mean / model.chi_square_shape);
}

std::vector<double> sample_rcs(const LinkRcs& stats, const RcsModel& model,
                               RandomStream& rng, int count) {
    if (count < 1) throw DisacError("sample_rcs: count must be >= 1");
    std::vector<double> out(static_cast<std::size_t>(count));
    for (auto& b : out) b = sample_rcs_one(stats, model, rng);
    return out;
}

PolarPattern emit_polar_pattern(const RcsProfile& profile, const RcsModel& model,
                                RandomStream& rng, double resolution_rad) {
    if (resolution_rad < deg_to_rad(1.0) - 1e-12)
        throw DisacError("emit_polar_pattern: resolution below 1 degree");
    PolarPattern p;
    for (double th = -kPi; th < kPi - 1e-12; th += resolution_rad) {
        double mu = profile.mean_at(th);
        LinkRcs stats{mu, model.variance_of_mean(mu)};
        p.angles_rad.push_back(th);
        p.mean.push_back(mu);
        p.sampled.push_back(sample_rcs_one(stats, model, rng));
    }
    return p;
}

}  // namespace disac
