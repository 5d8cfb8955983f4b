#include "disac/p3.hpp"

#include <cmath>

namespace disac {

std::string to_string(PowerConstraintMode m) {
    switch (m) {
        case PowerConstraintMode::TotalSystem: return "total";
        case PowerConstraintMode::PerNode: return "per_node";
        case PowerConstraintMode::PerAntenna: return "per_antenna";
    }
    return "?";
}

LiftedBeams P3Program::extract_beams(const SolveReport& report) const {
    LiftedBeams beams;
    for (int v : comm_vars) beams.comm.push_back(extract_hermitian(report.value(v)));
    for (int v : sensing_vars) beams.sensing.push_back(extract_hermitian(report.value(v)));
    return beams;
}

CMat P3Program::extract_z(const SolveReport& report) const {
    return sens_scale * extract_hermitian(report.value(z_var));
}

P3Program assemble_p3(const P3Inputs& in, const CMat& z_prev, const P3Options& options) {
    const ScenarioConfig& cfg = *in.cfg;
    const DownlinkChannelSet& ch = *in.channels;
    const SensingChannelFactors& factors = *in.factors;
    const RcsStatistics& stats = *in.stats;
    const ClutterModel& clutter = *in.clutter;

    const int n_nodes = cfg.num_nodes;
    const int mt = cfg.tx_antennas;
    const int mr = cfg.rx_antennas;
    const int n_ues = cfg.num_ues;
    const int stacked = n_nodes * mt;
    const int zdim = n_nodes * mr;

    if (z_prev.rows() != zdim || z_prev.cols() != zdim)
        throw DisacError("assemble_p3: z_prev dimension mismatch");

    P3Program p3;
    p3.num_nodes = n_nodes;
    p3.tx_antennas = mt;
    p3.rx_antennas = mr;
    p3.num_ues = n_ues;
    p3.complex_dof = n_ues * stacked * stacked + n_nodes * mt * mt + zdim * zdim;

    // Data normalization so the backend sees O(1) coefficients.
    double hmax2 = 0.0;
    for (int k = 0; k < n_ues; ++k) hmax2 = std::max(hmax2, ch.h_stacked(k).squaredNorm());
    p3.comm_scale = hmax2 > 0.0 ? hmax2 : 1.0;
    p3.sens_scale = cfg.sensing_noise;
    const double cscale = 1.0 / p3.comm_scale;        // multiplies channel Gram terms
    const double sscale = 1.0 / p3.sens_scale;        // multiplies sensing covariances

    ConicProgram& prog = p3.program;
    for (int k = 0; k < n_ues; ++k)
        p3.comm_vars.push_back(prog.add_psd_block("Wc" + std::to_string(k), 2 * stacked));
    for (int n = 0; n < n_nodes; ++n)
        p3.sensing_vars.push_back(prog.add_psd_block("Ws" + std::to_string(n), 2 * mt));
    p3.z_var = prog.add_psd_block("Z", 2 * zdim);
    for (int v : p3.comm_vars) prog.add_embedding_structure(v);
    for (int v : p3.sensing_vars) prog.add_embedding_structure(v);
    prog.add_embedding_structure(p3.z_var);

    // Objective: tr(R0^{-1} Z) - tr(z_prev^{-1} Z), invariant under the
    // sensing rescale because both coefficient matrices are scaled by
    // sens_scale while Z is divided by it.
    CMat r0 = clutter.full();
    CMat r0_inv = hermitize(r0).llt().solve(CMat::Identity(zdim, zdim));
    CMat zprev_inv = hermitize(z_prev).llt().solve(CMat::Identity(zdim, zdim));
    ConicProgram::LinExpr objective;
    prog.add_complex_trace(objective, p3.z_var, p3.sens_scale * hermitize(r0_inv - zprev_inv),
                           1.0);
    prog.set_objective(std::move(objective));

    // Z = R0 + E[Rs](W_s): entrywise equalities on the complex degrees of
    // freedom, one real and (off-diagonal) one imaginary row each.
    const double shrink2 = factors.shrinkage * factors.shrinkage;
    for (int pq = 0; pq < zdim * zdim; ++pq) {
        int p = pq / zdim, q = pq % zdim;
        if (p > q) continue;
        int bn = p / mr, bm = q / mr;
        ConicProgram::LinExpr re, im;
        re.add(p3.z_var, p, q, 1.0);
        if (p != q) im.add(p3.z_var, zdim + p, q, 1.0);
        if (bn == bm) {
            int lp = p - bn * mr, lq = q - bn * mr;
            for (int m = 0; m < n_nodes; ++m) {
                const SensingLink& link = factors.link(bn, m);
                double kappa = shrink2 * link.pathloss * stats.link(bn, m).second_moment();
                // (A W A^H)[lp, lq] = tr(W C), C = A^H e_lq e_lp^T A
                CMat c = link.response.row(lq).adjoint() * link.response.row(lp);
                prog.add_complex_trace(re, p3.sensing_vars[m], c, -kappa * sscale);
                if (p != q)
                    prog.add_complex_trace_imag(im, p3.sensing_vars[m], c, -kappa * sscale);
            }
            re.constant = -r0(p, q).real() * sscale;
            if (p != q) im.constant = -r0(p, q).imag() * sscale;
        }
        prog.add_equality(std::move(re));
        if (p != q) prog.add_equality(std::move(im));
    }

    // Robust SINR constraints with SOC auxiliaries for the norm terms. The
    // two coinciding norms ||W h|| and ||h^H W|| of each interferer share one
    // auxiliary, entering with weight 2.
    const double gamma = cfg.sinr_threshold;
    const double noise_scaled = cfg.comm_noise * cscale;
    const double h_rescale = std::sqrt(cscale);
    std::vector<CVec> h_scaled(n_ues);
    for (int k = 0; k < n_ues; ++k) h_scaled[k] = ch.h_stacked(k) * h_rescale;

    auto add_soc_matvec = [&](int var, int dim_complex, const CVec& v, const std::string& name) {
        int t = prog.add_scalar(name, false);
        std::vector<ConicProgram::LinExpr> comps;
        ConicProgram::LinExpr head;
        head.add_scalar(t, 1.0);
        comps.push_back(std::move(head));
        Vec ve = embed_vector(v);
        for (int i = 0; i < 2 * dim_complex; ++i) {
            ConicProgram::LinExpr row;
            for (int j = 0; j < 2 * dim_complex; ++j) row.add(var, i, j, ve(j));
            comps.push_back(std::move(row));
        }
        prog.add_soc(std::move(comps));
        return t;
    };

    for (int k = 0; k < n_ues; ++k) {
        UeUncertainty radii = ue_uncertainty(k, ch, cfg.sync_error_bound, options.uncertainty);
        double rc = radii.comm_stacked * h_rescale;
        ConicProgram::LinExpr sinr;
        CMat qk = h_scaled[k] * h_scaled[k].adjoint();
        prog.add_complex_trace(sinr, p3.comm_vars[k], qk, 1.0);
        if (cfg.sinr_numerator == SinrNumeratorMode::Conservative) {
            int t = add_soc_matvec(p3.comm_vars[k], stacked, h_scaled[k],
                                   "t_num" + std::to_string(k));
            sinr.add_scalar(t, -2.0 * rc);
        }
        for (int j = 0; j < n_ues; ++j) {
            if (j == k) continue;
            prog.add_complex_trace(sinr, p3.comm_vars[j], qk, -gamma);
            prog.add_complex_trace(sinr, p3.comm_vars[j],
                                   CMat::Identity(stacked, stacked), -gamma * rc * rc);
            int t = add_soc_matvec(p3.comm_vars[j], stacked, h_scaled[k],
                                   "t_" + std::to_string(k) + "_" + std::to_string(j));
            sinr.add_scalar(t, -gamma * 2.0 * rc);
        }
        for (int n = 0; n < n_nodes; ++n) {
            double rn = radii.sensing_node[n] * h_rescale;
            CVec hnk = ch.h(n, k) * h_rescale;
            CMat qnk = hnk * hnk.adjoint();
            prog.add_complex_trace(sinr, p3.sensing_vars[n], qnk, -gamma);
            prog.add_complex_trace(sinr, p3.sensing_vars[n], CMat::Identity(mt, mt),
                                   -gamma * rn * rn);
            int u = add_soc_matvec(p3.sensing_vars[n], mt, hnk,
                                   "u_" + std::to_string(n) + "_" + std::to_string(k));
            sinr.add_scalar(u, -gamma * 2.0 * rn);
        }
        sinr.constant = -gamma * noise_scaled;
        prog.add_inequality(std::move(sinr));
    }

    // Power constraints.
    auto add_power_total = [&](double budget) {
        ConicProgram::LinExpr power;
        power.constant = budget;
        for (int v : p3.comm_vars)
            prog.add_complex_trace(power, v, CMat::Identity(stacked, stacked), -1.0);
        for (int v : p3.sensing_vars)
            prog.add_complex_trace(power, v, CMat::Identity(mt, mt), -1.0);
        prog.add_inequality(std::move(power));
    };
    switch (options.power_mode) {
        case PowerConstraintMode::TotalSystem: {
            double budget = options.budgets.empty() ? cfg.power_budget : options.budgets[0];
            add_power_total(budget);
            break;
        }
        case PowerConstraintMode::PerNode: {
            for (int n = 0; n < n_nodes; ++n) {
                double budget = options.budgets.empty() ? cfg.power_budget / n_nodes
                                                        : options.budgets.at(n);
                ConicProgram::LinExpr power;
                power.constant = budget;
                CMat sel = CMat::Zero(stacked, stacked);
                sel.block(n * mt, n * mt, mt, mt).setIdentity();
                for (int v : p3.comm_vars) prog.add_complex_trace(power, v, sel, -1.0);
                prog.add_complex_trace(power, p3.sensing_vars[n], CMat::Identity(mt, mt), -1.0);
                prog.add_inequality(std::move(power));
            }
            break;
        }
        case PowerConstraintMode::PerAntenna: {
            for (int n = 0; n < n_nodes; ++n) {
                for (int a = 0; a < mt; ++a) {
                    double budget = options.budgets.empty()
                                        ? cfg.power_budget / (n_nodes * mt)
                                        : options.budgets.at(n * mt + a);
                    ConicProgram::LinExpr power;
                    power.constant = budget;
                    int i = n * mt + a;
                    CMat sel = CMat::Zero(stacked, stacked);
                    sel(i, i) = 1.0;
                    for (int v : p3.comm_vars) prog.add_complex_trace(power, v, sel, -1.0);
                    CMat sel_s = CMat::Zero(mt, mt);
                    sel_s(a, a) = 1.0;
                    prog.add_complex_trace(power, p3.sensing_vars[n], sel_s, -1.0);
                    prog.add_inequality(std::move(power));
                }
            }
            break;
        }
    }
    return p3;
}

P3Program alternative_power_constraints(const P3Inputs& in, const CMat& z_prev,
                                        PowerConstraintMode mode,
                                        const std::vector<double>& budgets) {
    P3Options options;
    options.power_mode = mode;
    options.budgets = budgets;
    return assemble_p3(in, z_prev, options);
}

}  // namespace disac
