#include "disac/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace disac {

std::string to_string(OptimizerStatus s) {
    switch (s) {
        case OptimizerStatus::Converged: return "Converged";
        case OptimizerStatus::IterationCap: return "IterationCap";
        case OptimizerStatus::Infeasible: return "Infeasible";
        case OptimizerStatus::NumericalTrouble: return "NumericalTrouble";
    }
    return "?";
}

std::vector<CMat> BeamformerSolution::per_node_precoders(int num_nodes, int tx_antennas) const {
    std::vector<CMat> out(num_nodes);
    const int k_ues = static_cast<int>(recovered.comm.size());
    for (int n = 0; n < num_nodes; ++n) {
        CMat w(tx_antennas, k_ues);
        for (int k = 0; k < k_ues; ++k)
            w.col(k) = recovered.comm[k].segment(n * tx_antennas, tx_antennas);
        out[n] = w;
    }
    return out;
}

std::vector<CMat> isotropic_sensing_covs(const ScenarioConfig& cfg, double power_fraction) {
    double per_node = power_fraction * cfg.power_budget / cfg.num_nodes;
    return std::vector<CMat>(
        cfg.num_nodes,
        (per_node / cfg.tx_antennas) * CMat::Identity(cfg.tx_antennas, cfg.tx_antennas));
}

namespace {

std::vector<double> aspects_of(const std::vector<double>& aoas) {
    std::vector<double> out(aoas.size());
    for (std::size_t i = 0; i < aoas.size(); ++i) out[i] = wrap_angle(aoas[i] + kPi);
    return out;
}

}  // namespace

double aoa_probe_objective(const ScenarioConfig& cfg, const GeometrySummary& geom,
                           const ClutterModel& clutter, const std::vector<double>& aoas) {
    SensingChannelFactors factors = nominal_sensing_factors(cfg, geom, aoas);
    RcsStatistics stats =
        all_link_statistics(cfg.rcs_profile, cfg.rcs_model, aspects_of(aoas), cfg.target_heading);
    auto probe = isotropic_sensing_covs(cfg, 0.5);
    auto ers = expected_target_covariance(factors, stats, probe);
    return lower_bound_objective(clutter, ers);
}

std::vector<double> select_worst_case_aoa(const ScenarioConfig& cfg,
                                          const GeometrySummary& geom,
                                          const ClutterModel& clutter, int grid_points_per_node) {
    if (grid_points_per_node < 3 || grid_points_per_node % 2 == 0)
        throw DisacError("select_worst_case_aoa: grid size must be odd and >= 3");
    std::vector<double> selected = geom.node_target_angle;
    if (cfg.aoa_half_width <= 0.0) return selected;

    for (int n = 0; n < cfg.num_nodes; ++n) {
        const double center = geom.node_target_angle[n];
        double best_obj = 0.0;
        double best_angle = center;
        bool first = true;
        for (int g = 0; g < grid_points_per_node; ++g) {
            double theta = center - cfg.aoa_half_width +
                           2.0 * cfg.aoa_half_width * g / (grid_points_per_node - 1);
            std::vector<double> candidate = selected;
            candidate[n] = theta;
            double obj = aoa_probe_objective(cfg, geom, clutter, candidate);
            double tol = 1e-9 * (1.0 + std::abs(best_obj));
            bool better = first || obj < best_obj - tol;
            bool tie = !first && std::abs(obj - best_obj) <= tol &&
                       std::abs(theta - center) < std::abs(best_angle - center);
            if (better || tie) {
                best_obj = obj;
                best_angle = theta;
                first = false;
            }
        }
        selected[n] = best_angle;
    }
    return selected;
}

CMat initialize_z(const ScenarioConfig& cfg, const ClutterModel& clutter,
                  const SensingChannelFactors& factors, const RcsStatistics& stats) {
    auto probe = isotropic_sensing_covs(cfg, 0.5);
    auto ers = expected_target_covariance(factors, stats, probe);
    CMat z = clutter.full();
    const int mr = clutter.rx_antennas;
    for (int n = 0; n < clutter.num_nodes; ++n)
        z.block(n * mr, n * mr, mr, mr) += ers[n];
    return hermitize(z);
}

namespace {

/// Clamp a Hermitian matrix onto the PSD cone (small negative solver noise).
CMat project_psd(const CMat& x) {
    Eigen::SelfAdjointEigenSolver<CMat> es(hermitize(x));
    Vec ev = es.eigenvalues().cwiseMax(0.0);
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

struct EigenSplit {
    Vec values;
    CMat vectors;
    double ratio = 1.0;
};

EigenSplit eigen_split(const CMat& lifted) {
    EigenSplit out;
    Eigen::SelfAdjointEigenSolver<CMat> es(hermitize(lifted));
    out.values = es.eigenvalues().cwiseMax(0.0);
    out.vectors = es.eigenvectors();
    double total = out.values.sum();
    out.ratio = total > 1e-300 ? out.values.maxCoeff() / total : 1.0;
    return out;
}

CVec phase_normalize(CVec w) {
    for (int i = 0; i < w.size(); ++i) {
        if (std::abs(w(i)) > 1e-12) {
            w *= std::polar(1.0, -std::arg(w(i)));
            break;
        }
    }
    return w;
}

CVec principal_vector(const EigenSplit& split) {
    int d = static_cast<int>(split.values.size());
    double lmax = split.values(d - 1);
    if (lmax <= 0.0) return CVec::Zero(d);
    return phase_normalize(std::sqrt(lmax) * split.vectors.col(d - 1));
}

CVec randomized_vector(const EigenSplit& split, RandomStream& rng) {
    int d = static_cast<int>(split.values.size());
    double total = split.values.sum();
    if (total <= 0.0) return CVec::Zero(d);
    CVec g(d);
    for (int i = 0; i < d; ++i) g(i) = rng.cgaussian();
    CVec w = split.vectors * split.values.cwiseSqrt().asDiagonal() * g;
    double norm2 = w.squaredNorm();
    if (norm2 <= 0.0) return CVec::Zero(d);
    return phase_normalize(w * std::sqrt(total / norm2));
}

struct RestoreResult {
    bool feasible = false;
    double comm_scale = 1.0;     // multiplies every w_c
    double sensing_scale = 1.0;  // multiplies every w_s
    double objective = -1.0;
};

constexpr double kBigStep = 1e6;

/// Minimal common factor on the communication beams restoring every robust
/// SINR constraint, with the sensing beams rescaled to keep every active
/// power constraint within budget. Fixed point of c(s) and s(c); both maps
/// are monotone.
RestoreResult restore_feasibility(const ScenarioConfig& cfg, const DownlinkChannelSet& channels,
                                  const VectorBeams& beams, const ClutterModel& clutter,
                                  const SensingChannelFactors& factors,
                                  const RcsStatistics& stats, const P3Options& popt,
                                  UncertaintyScaling scaling) {
    RestoreResult res;
    const int n_ues = cfg.num_ues;
    const int mt = cfg.tx_antennas;
    LiftedBeams lifted = beams.lift();

    // One (budget, comm power, sensing power) tuple per power constraint.
    struct PowerRow {
        double budget, pc, ps;
    };
    std::vector<PowerRow> rows;
    if (popt.power_mode == PowerConstraintMode::TotalSystem) {
        double budget = popt.budgets.empty() ? cfg.power_budget : popt.budgets[0];
        double pc = 0.0, ps = 0.0;
        for (const auto& w : beams.comm) pc += w.squaredNorm();
        for (const auto& w : beams.sensing) ps += w.squaredNorm();
        rows.push_back({budget, pc, ps});
    } else if (popt.power_mode == PowerConstraintMode::PerNode) {
        for (int n = 0; n < cfg.num_nodes; ++n) {
            double budget = popt.budgets.empty() ? cfg.power_budget / cfg.num_nodes
                                                 : popt.budgets.at(n);
            double pc = 0.0;
            for (const auto& w : beams.comm) pc += w.segment(n * mt, mt).squaredNorm();
            rows.push_back({budget, pc, beams.sensing[n].squaredNorm()});
        }
    } else {
        for (int n = 0; n < cfg.num_nodes; ++n)
            for (int a = 0; a < mt; ++a) {
                double budget = popt.budgets.empty() ? cfg.power_budget / (cfg.num_nodes * mt)
                                                     : popt.budgets.at(n * mt + a);
                double pc = 0.0;
                for (const auto& w : beams.comm) pc += std::norm(w(n * mt + a));
                rows.push_back({budget, pc, std::norm(beams.sensing[n](a))});
            }
    }
    double p_sens = 0.0;
    for (const auto& w : beams.sensing) p_sens += w.squaredNorm();

    // Per-UE affine pieces: numerator c*Nk, interference c*Ik + s*Jk + noise.
    std::vector<double> nk(n_ues), ik(n_ues, 0.0), jk(n_ues, 0.0);
    for (int k = 0; k < n_ues; ++k) {
        UeUncertainty radii = ue_uncertainty(k, channels, cfg.sync_error_bound, scaling);
        const CVec& hk = channels.h_stacked(k);
        nk[k] = cfg.sinr_numerator == SinrNumeratorMode::Nominal
                    ? worst_case_signal(hk, lifted.comm[k])
                    : worst_case_signal_conservative(hk, lifted.comm[k], radii.comm_stacked);
        UeUncertainty comm_only = radii;
        for (auto& r : comm_only.sensing_node) r = 0.0;
        LiftedBeams no_sens = lifted;
        for (auto& w : no_sens.sensing) w.setZero();
        ik[k] = worst_case_interference(k, channels, no_sens, comm_only, 0.0);
        jk[k] = worst_case_interference(k, channels, lifted, radii, 0.0) - ik[k];
    }

    const double gamma = cfg.sinr_threshold;
    auto c_min = [&](double s) {
        double c = 0.0;
        for (int k = 0; k < n_ues; ++k) {
            double margin = nk[k] - gamma * ik[k];
            if (margin <= 0.0) return -1.0;
            c = std::max(c, gamma * (s * jk[k] + cfg.comm_noise) / margin);
        }
        return c;
    };
    auto s_max = [&](double c) {
        double s = kBigStep;
        for (const auto& r : rows) {
            double room = r.budget - c * r.pc;
            if (r.ps > 0.0) s = std::min(s, room / r.ps);
            else if (room < 0.0) s = -1.0;
        }
        return std::max(-1.0, s);
    };

    double s = p_sens > 0.0 ? 1.0 : 0.0;
    double c = c_min(s);
    if (c < 0.0) return res;
    for (int it = 0; it < 60; ++it) {
        double s_new = p_sens > 0.0 ? s_max(c) : 0.0;
        if (s_new < 0.0) return res;
        s_new = std::min(s_new, kBigStep);
        double c_new = c_min(s_new);
        if (c_new < 0.0) return res;
        if (std::abs(s_new - s) <= 1e-14 * (1.0 + s) && std::abs(c_new - c) <= 1e-14 * (1.0 + c)) {
            s = s_new;
            c = c_new;
            break;
        }
        s = s_new;
        c = c_new;
    }
    if (s < 0.0) return res;
    for (const auto& r : rows)
        if (c * r.pc + s * r.ps > r.budget * (1.0 + 1e-9) + 1e-15) return res;

    res.feasible = true;
    res.comm_scale = std::sqrt(std::max(0.0, c));
    res.sensing_scale = std::sqrt(std::max(0.0, s));
    std::vector<CMat> covs;
    for (const auto& w : beams.sensing) {
        CVec ws = res.sensing_scale * w;
        covs.push_back(ws * ws.adjoint());
    }
    res.objective = lower_bound_objective(clutter, expected_target_covariance(factors, stats, covs));
    return res;
}

}  // namespace

RankOneRecovery recover_rank_one(const CMat& lifted, RandomStream& rng) {
    RankOneRecovery out;
    EigenSplit split = eigen_split(lifted);
    out.eigen_ratio = split.ratio;
    if (split.ratio >= 0.999) {
        out.vector = principal_vector(split);
    } else {
        out.vector = randomized_vector(split, rng);
        out.randomized = true;
    }
    return out;
}

BeamformerSolution sca_optimize(const ScenarioConfig& cfg, const DownlinkChannelSet& channels,
                                const SensingChannelFactors& factors, const RcsStatistics& stats,
                                const ClutterModel& clutter, const ScaOptions& options) {
    BeamformerSolution sol;
    P3Inputs inputs{&cfg, &channels, &factors, &stats, &clutter};
    CMat z = options.init_z ? *options.init_z : initialize_z(cfg, clutter, factors, stats);

    const int mr = cfg.rx_antennas;
    bool converged = false;
    bool trouble = false;
    for (int v = 0; v < cfg.sca_max_iterations; ++v) {
        P3Program p3 = assemble_p3(inputs, z, options.p3);
        SolveReport report = solve(p3.program, options.solver);
        if (report.status != SolveStatus::Optimal) {
            SolverSettings relaxed = options.solver;
            relaxed.feastol *= 100.0;
            relaxed.reltol *= 100.0;
            relaxed.abstol *= 100.0;
            report = solve(p3.program, relaxed);
        }
        if (report.status == SolveStatus::Infeasible && v == 0) {
            std::ostringstream msg;
            msg << "surrogate infeasible at first iteration: SINR threshold "
                << linear_to_db(cfg.sinr_threshold) << " dB with budget " << cfg.power_budget
                << " W under " << to_string(options.p3.power_mode) << " power constraints";
            sol.status = OptimizerStatus::Infeasible;
            sol.message = msg.str();
            return sol;
        }
        if (report.status != SolveStatus::Optimal) {
            sol.message = "solver: " + to_string(report.status) + " (" + report.message + ")";
            if (sol.objective_trace.empty()) {
                sol.status = OptimizerStatus::NumericalTrouble;
                return sol;
            }
            trouble = true;  // keep the last good iterate
            break;
        }

        LiftedBeams beams = p3.extract_beams(report);
        for (auto& w : beams.comm) w = project_psd(w);
        for (auto& w : beams.sensing) w = project_psd(w);
        auto ers = expected_target_covariance(factors, stats, beams.sensing);
        double lb = lower_bound_objective(clutter, ers);
        sol.lifted = std::move(beams);
        sol.objective_trace.push_back(lb);
        sol.sca_iterations = v + 1;

        CMat z_next = clutter.full();
        for (int n = 0; n < cfg.num_nodes; ++n)
            z_next.block(n * mr, n * mr, mr, mr) += ers[n];
        z = hermitize(z_next);

        std::size_t len = sol.objective_trace.size();
        if (len >= 2 && std::abs(sol.objective_trace[len - 1] - sol.objective_trace[len - 2]) <=
                            cfg.sca_tolerance) {
            converged = true;
            break;
        }
    }
    sol.status = trouble ? OptimizerStatus::NumericalTrouble
                         : (converged ? OptimizerStatus::Converged : OptimizerStatus::IterationCap);

    // Rank-one recovery: principal eigenvectors where the lifted matrices are
    // numerically rank one, Gaussian randomization rounds otherwise, each
    // candidate set repaired by the minimal-common-factor rescale and scored
    // by the Jensen bound.
    const int n_ues = cfg.num_ues;
    const int n_nodes = cfg.num_nodes;
    std::vector<EigenSplit> comm_split(n_ues), sens_split(n_nodes);
    bool need_random = false;
    for (int k = 0; k < n_ues; ++k) {
        comm_split[k] = eigen_split(sol.lifted.comm[k]);
        sol.rank_report.comm_ratio.push_back(comm_split[k].ratio);
        need_random |= comm_split[k].ratio < 0.999;
    }
    for (int n = 0; n < n_nodes; ++n) {
        sens_split[n] = eigen_split(sol.lifted.sensing[n]);
        sol.rank_report.sensing_ratio.push_back(sens_split[n].ratio);
        need_random |= sens_split[n].ratio < 0.999;
    }
    sol.rank_report.randomization_used = need_random;

    RandomStream rng = spawn_rng_stream(cfg, "rank_one_recovery");
    const int rounds = need_random ? 200 : 1;
    VectorBeams best;
    RestoreResult best_restore;
    for (int r = 0; r < rounds; ++r) {
        VectorBeams cand;
        for (int k = 0; k < n_ues; ++k)
            cand.comm.push_back(comm_split[k].ratio >= 0.999 || r == 0
                                    ? principal_vector(comm_split[k])
                                    : randomized_vector(comm_split[k], rng));
        for (int n = 0; n < n_nodes; ++n)
            cand.sensing.push_back(sens_split[n].ratio >= 0.999 || r == 0
                                       ? principal_vector(sens_split[n])
                                       : randomized_vector(sens_split[n], rng));
        RestoreResult restore = restore_feasibility(cfg, channels, cand, clutter, factors, stats,
                                                    options.p3, options.p3.uncertainty);
        if (restore.feasible && (!best_restore.feasible || restore.objective > best_restore.objective)) {
            best_restore = restore;
            best = std::move(cand);
        }
    }
    if (!best_restore.feasible) {
        // Report the principal-eigenvector solution rescaled into the power
        // budget; SINR feasibility could not be restored.
        sol.rank_report.returned_infeasible = true;
        VectorBeams cand;
        for (int k = 0; k < n_ues; ++k) cand.comm.push_back(principal_vector(comm_split[k]));
        for (int n = 0; n < n_nodes; ++n) cand.sensing.push_back(principal_vector(sens_split[n]));
        double p = cand.total_power();
        double scale = p > 0.0 ? std::sqrt(cfg.power_budget / p) : 1.0;
        scale = std::min(scale, 1.0);
        for (auto& w : cand.comm) w *= scale;
        for (auto& w : cand.sensing) w *= scale;
        best = std::move(cand);
        best_restore.comm_scale = 1.0;
        best_restore.sensing_scale = 1.0;
        std::vector<CMat> covs;
        for (const auto& w : best.sensing) covs.push_back(w * w.adjoint());
        best_restore.objective =
            lower_bound_objective(clutter, expected_target_covariance(factors, stats, covs));
    } else {
        for (auto& w : best.comm) w *= best_restore.comm_scale;
        for (auto& w : best.sensing) w *= best_restore.sensing_scale;
    }
    sol.recovered = std::move(best);
    sol.final_objective = best_restore.objective;
    sol.robust_sinrs = robust_sinr_all(channels, sol.recovered.lift(), cfg.sync_error_bound,
                                       cfg.comm_noise, options.p3.uncertainty,
                                       cfg.sinr_numerator);
    return sol;
}

}  // namespace disac
