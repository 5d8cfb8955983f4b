#include "disac/experiments.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

namespace disac {

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    auto e = s.find_last_not_of(" \t\r");
    if (b == std::string::npos) return "";
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream ss(s);
    while (std::getline(ss, cur, sep)) {
        cur = trim(cur);
        if (!cur.empty()) out.push_back(cur);
    }
    return out;
}

std::vector<double> parse_doubles(const std::string& s) {
    std::vector<double> out;
    for (const auto& tok : split_list(s, ',')) out.push_back(std::stod(tok));
    return out;
}

ExperimentKind parse_kind(const std::string& s) {
    if (s == "convergence") return ExperimentKind::Convergence;
    if (s == "tradeoff") return ExperimentKind::Tradeoff;
    if (s == "detection") return ExperimentKind::Detection;
    if (s == "power_modes") return ExperimentKind::PowerModes;
    if (s == "rcs_models") return ExperimentKind::RcsModels;
    if (s == "polar") return ExperimentKind::PolarPattern;
    throw DisacError("experiment spec: unknown experiment '" + s + "'");
}

std::string kind_name(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::Convergence: return "convergence";
        case ExperimentKind::Tradeoff: return "tradeoff";
        case ExperimentKind::Detection: return "detection";
        case ExperimentKind::PowerModes: return "power_modes";
        case ExperimentKind::RcsModels: return "rcs_models";
        case ExperimentKind::PolarPattern: return "polar";
    }
    return "?";
}

}  // namespace

std::uint64_t config_hash(const std::string& serialized) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : serialized) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string revision_string() {
#ifdef DISAC_REVISION
    return DISAC_REVISION;
#else
    return "unknown";
#endif
}

ExperimentSpec ExperimentSpec::parse(const std::string& text, const std::string& base_dir) {
    ExperimentSpec spec;
    bool have_scenario = false;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw DisacError("experiment spec: line has no '=': " + line);
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key == "experiment") spec.kind = parse_kind(val);
        else if (key == "scenario") {
            std::filesystem::path p(val);
            if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
            spec.scenario = load_config(p.string());
            have_scenario = true;
        } else if (key == "seeds") {
            spec.seeds.clear();
            for (const auto& tok : split_list(val, ','))
                spec.seeds.push_back(std::stoull(tok));
        } else if (key == "gamma_db") spec.gamma_db = parse_doubles(val);
        else if (key == "delta") spec.delta = parse_doubles(val);
        else if (key == "aoa_deg") spec.aoa_deg = parse_doubles(val);
        else if (key == "scnr_db") spec.scnr_db = parse_doubles(val);
        else if (key == "variants") {
            spec.variants.clear();
            for (const auto& tok : split_list(val, ',')) {
                auto x = tok.find('x');
                if (x == std::string::npos)
                    throw DisacError("experiment spec: variant needs NxM: " + tok);
                spec.variants.push_back(
                    {std::stoi(tok.substr(0, x)), std::stoi(tok.substr(x + 1))});
            }
        } else if (key == "trials") spec.trials = std::stoi(val);
        else if (key == "threshold_db") spec.threshold_db = std::stod(val);
        else if (key == "samples") spec.samples = std::stoi(val);
        else throw DisacError("experiment spec: unknown key '" + key + "'");
    }
    if (!have_scenario) spec.scenario = desk_scale_config();
    if (spec.scnr_db.empty())
        for (double v = -12.0; v <= 12.0 + 1e-9; v += 3.0) spec.scnr_db.push_back(v);
    spec.scenario_text = serialize_config(spec.scenario);
    spec.validate();
    return spec;
}

ExperimentSpec ExperimentSpec::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DisacError("experiment spec: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), std::filesystem::path(path).parent_path().string());
}

void ExperimentSpec::validate() const {
    scenario.validate();
    if (seeds.empty()) throw DisacError("experiment spec: empty seed list");
    if (gamma_db.empty()) throw DisacError("experiment spec: empty gamma sweep");
    if (scnr_db.empty()) throw DisacError("experiment spec: empty SCNR grid");
    if (variants.empty()) throw DisacError("experiment spec: empty variant list");
    if (trials < 100) throw DisacError("experiment spec: trials must be >= 100");
    if (samples < 2) throw DisacError("experiment spec: samples must be >= 2");
}

ScenarioConfig with_deployment(const ScenarioConfig& base, int num_nodes, int antennas,
                               std::uint64_t seed) {
    ScenarioConfig cfg = base;
    cfg.num_nodes = num_nodes;
    cfg.tx_antennas = antennas;
    cfg.rx_antennas = antennas;
    cfg.seed = seed;
    double radius = base.node_positions.empty()
                        ? 100.0
                        : (base.node_positions[0] - base.target_position).norm();
    cfg.node_positions.clear();
    for (int n = 0; n < num_nodes; ++n) {
        double a = 2.0 * kPi * n / num_nodes;
        cfg.node_positions.emplace_back(cfg.target_position.x() + radius * std::cos(a),
                                        cfg.target_position.y() + radius * std::sin(a), 0.0);
    }
    draw_ue_positions(cfg, 200.0);
    cfg.clutter = default_clutter(cfg, derive_geometry(cfg), deg_to_rad(20.0), db_to_linear(10.0));
    cfg.validate();
    return cfg;
}

ScenarioConfig with_seed(const ScenarioConfig& base, std::uint64_t seed) {
    return with_deployment(base, base.num_nodes, base.tx_antennas, seed);
}

ScenarioRealization realize_scenario(const ScenarioConfig& cfg) {
    ScenarioRealization real;
    real.cfg = cfg;
    real.geom = derive_geometry(cfg);
    real.clutter = build_clutter_covariance(cfg, real.geom);
    RandomStream rng = spawn_rng_stream(cfg, "downlink_channels");
    real.channels = draw_downlink_channels(cfg, real.geom, rng);
    real.worst_aoa = select_worst_case_aoa(cfg, real.geom, real.clutter);

    auto aspects = [&](const std::vector<double>& aoas) {
        std::vector<double> out(aoas.size());
        for (std::size_t i = 0; i < aoas.size(); ++i) out[i] = wrap_angle(aoas[i] + kPi);
        return out;
    };
    real.factors_worst = nominal_sensing_factors(cfg, real.geom, real.worst_aoa);
    real.stats_worst = all_link_statistics(cfg.rcs_profile, cfg.rcs_model,
                                           aspects(real.worst_aoa), cfg.target_heading);
    real.factors_nominal = nominal_sensing_factors(cfg, real.geom, real.geom.node_target_angle);
    real.stats_nominal =
        all_link_statistics(cfg.rcs_profile, cfg.rcs_model,
                            aspects(real.geom.node_target_angle), cfg.target_heading);
    return real;
}

PipelineResult run_pipeline(const ScenarioRealization& real, PowerConstraintMode mode) {
    PipelineResult out;
    ScaOptions options;
    options.p3.power_mode = mode;
    out.solution = sca_optimize(real.cfg, real.channels, real.factors_worst, real.stats_worst,
                                real.clutter, options);
    out.solution.worst_case_aoa = real.worst_aoa;
    out.zf = zf_grid_search(real.cfg, real.channels, real.factors_worst, real.stats_worst,
                            real.clutter, real.geom.node_target_angle);

    // SCA is a local method; when the ZF benchmark lands higher, restart from
    // the ZF-matched linearization point, which makes the first surrogate
    // iterate dominate the ZF objective.
    bool ok = out.solution.status == OptimizerStatus::Converged ||
              out.solution.status == OptimizerStatus::IterationCap;
    if (out.zf.feasible &&
        (!ok || out.solution.final_objective < out.zf.lower_bound_kld)) {
        LiftedBeams zf_lifted = out.zf.beams.lift();
        auto ers = expected_target_covariance(real.factors_worst, real.stats_worst,
                                              zf_lifted.sensing);
        CMat z0 = real.clutter.full();
        int mr = real.cfg.rx_antennas;
        for (int n = 0; n < real.cfg.num_nodes; ++n)
            z0.block(n * mr, n * mr, mr, mr) += ers[n];
        ScaOptions warm = options;
        warm.init_z = hermitize(z0);
        BeamformerSolution retry = sca_optimize(real.cfg, real.channels, real.factors_worst,
                                                real.stats_worst, real.clutter, warm);
        retry.worst_case_aoa = real.worst_aoa;
        bool retry_ok = retry.status == OptimizerStatus::Converged ||
                        retry.status == OptimizerStatus::IterationCap;
        if (retry_ok && (!ok || retry.final_objective > out.solution.final_objective))
            out.solution = std::move(retry);
    }
    return out;
}

namespace {

struct CsvFile {
    std::ofstream out;
    std::string path;
    CsvFile(const std::string& dir, const std::string& name, const std::string& header)
        : path(dir + "/" + name) {
        out.open(path);
        if (!out) throw DisacError("cannot write " + path);
        out << header << "\n";
    }
};

class ExitTracker {
  public:
    void note(const BeamformerSolution& s) {
        if (s.status == OptimizerStatus::Infeasible) code_ = std::max(code_, 2);
        if (s.status == OptimizerStatus::NumericalTrouble) code_ = 3;
    }
    void note_infeasible() { code_ = std::max(code_, 2); }
    int code() const { return code_; }

  private:
    int code_ = 0;
};

bool usable(const BeamformerSolution& s) {
    return s.status == OptimizerStatus::Converged || s.status == OptimizerStatus::IterationCap;
}

void run_convergence(const ExperimentSpec& spec, const std::string& dir, RunResult& result,
                     ExitTracker& exit) {
    CsvFile csv(dir, "convergence.csv", "n_nodes,antennas,aoa_halfwidth_deg,seed,iteration,objective");
    for (const auto& variant : spec.variants) {
        for (double aoa : spec.aoa_deg) {
            for (std::uint64_t seed : spec.seeds) {
                ScenarioConfig cfg = with_deployment(spec.scenario, variant.num_nodes,
                                                     variant.antennas, seed);
                cfg.aoa_half_width = deg_to_rad(aoa);
                ScenarioRealization real = realize_scenario(cfg);
                ScaOptions options;
                BeamformerSolution sol = sca_optimize(cfg, real.channels, real.factors_worst,
                                                      real.stats_worst, real.clutter, options);
                exit.note(sol);
                for (std::size_t it = 0; it < sol.objective_trace.size(); ++it)
                    csv.out << variant.num_nodes << "," << variant.antennas << "," << fmt(aoa)
                            << "," << seed << "," << it << "," << fmt(sol.objective_trace[it])
                            << "\n";
            }
        }
    }
    result.outputs.push_back(csv.path);
}

void run_tradeoff(const ExperimentSpec& spec, const std::string& dir, RunResult& result,
                  ExitTracker& exit) {
    CsvFile csv(dir, "tradeoff.csv",
                "n_nodes,antennas,gamma_db,seed,proposed_kld,proposed_status,zf_kld,zf_rho,"
                "zf_feasible,min_robust_sinr_db");
    for (const auto& variant : spec.variants) {
        for (std::uint64_t seed : spec.seeds) {
            for (double gamma : spec.gamma_db) {
                ScenarioConfig cfg = with_deployment(spec.scenario, variant.num_nodes,
                                                     variant.antennas, seed);
                cfg.sinr_threshold = db_to_linear(gamma);
                ScenarioRealization real = realize_scenario(cfg);
                PipelineResult pipe = run_pipeline(real);
                exit.note(pipe.solution);
                double min_sinr = 0.0;
                if (usable(pipe.solution) && !pipe.solution.robust_sinrs.empty()) {
                    min_sinr = pipe.solution.robust_sinrs[0];
                    for (double s : pipe.solution.robust_sinrs) min_sinr = std::min(min_sinr, s);
                }
                csv.out << variant.num_nodes << "," << variant.antennas << "," << fmt(gamma)
                        << "," << seed << ","
                        << fmt(usable(pipe.solution) ? pipe.solution.final_objective : -1.0)
                        << "," << to_string(pipe.solution.status) << ","
                        << fmt(pipe.zf.feasible ? pipe.zf.lower_bound_kld : -1.0) << ","
                        << fmt(pipe.zf.rho) << "," << (pipe.zf.feasible ? 1 : 0) << ","
                        << fmt(min_sinr > 0.0 ? linear_to_db(min_sinr) : -999.0) << "\n";
            }
        }
    }
    result.outputs.push_back(csv.path);
}

void emit_detection_curve(CsvFile& csv, const std::vector<PdPoint>& curve, double gamma_db,
                          double delta, const std::string& model, std::uint64_t seed) {
    for (const auto& p : curve)
        csv.out << fmt(p.input_scnr_db) << "," << fmt(p.pd) << "," << fmt(p.ci_low) << ","
                << fmt(p.ci_high) << "," << fmt(gamma_db) << "," << fmt(delta) << "," << model
                << "," << seed << "\n";
}

void run_detection(const ExperimentSpec& spec, const std::string& dir, RunResult& result,
                   ExitTracker& exit) {
    CsvFile proposed(dir, "detection_proposed.csv",
                     "scnr_db,pd,ci_low,ci_high,gamma_db,delta,model,seed");
    CsvFile zf(dir, "detection_zf.csv", "scnr_db,pd,ci_low,ci_high,gamma_db,delta,model,seed");
    DetectionExperiment exp;
    exp.trials = spec.trials;
    exp.threshold_db = spec.threshold_db;
    exp.input_scnr_db = spec.scnr_db;

    for (double gamma : spec.gamma_db) {
        for (double delta : spec.delta) {
            for (std::uint64_t seed : spec.seeds) {
                ScenarioConfig cfg = with_seed(spec.scenario, seed);
                cfg.sinr_threshold = db_to_linear(gamma);
                cfg.sync_error_bound = delta;
                ScenarioRealization real = realize_scenario(cfg);
                exp.snapshots = cfg.snapshots;
                exp.sync_mode = cfg.sync_mode;
                PipelineResult pipe = run_pipeline(real);
                exit.note(pipe.solution);
                RandomStream rng = spawn_rng_stream(cfg, "detection");
                if (usable(pipe.solution)) {
                    auto curve = detection_probability(cfg, real.clutter, real.factors_nominal,
                                                       real.stats_nominal,
                                                       pipe.solution.recovered.sensing, exp,
                                                       rng.sub("proposed"));
                    emit_detection_curve(proposed, curve, gamma, delta, cfg.rcs_model.name(),
                                         seed);
                }
                if (pipe.zf.feasible) {
                    auto curve = detection_probability(cfg, real.clutter, real.factors_nominal,
                                                       real.stats_nominal, pipe.zf.beams.sensing,
                                                       exp, rng.sub("zf"));
                    emit_detection_curve(zf, curve, gamma, delta, cfg.rcs_model.name(), seed);
                } else {
                    exit.note_infeasible();
                }
            }
        }
    }
    result.outputs.push_back(proposed.path);
    result.outputs.push_back(zf.path);
}

void run_power_modes(const ExperimentSpec& spec, const std::string& dir, RunResult& result,
                     ExitTracker& exit) {
    CsvFile obj(dir, "power_objectives.csv", "mode,seed,objective,total_power");
    CsvFile det(dir, "power_detection.csv", "mode,scnr_db,pd,ci_low,ci_high,seed");
    DetectionExperiment exp;
    exp.trials = spec.trials;
    exp.threshold_db = spec.threshold_db;
    exp.input_scnr_db = spec.scnr_db;

    for (std::uint64_t seed : spec.seeds) {
        ScenarioConfig cfg = with_seed(spec.scenario, seed);
        ScenarioRealization real = realize_scenario(cfg);
        exp.snapshots = cfg.snapshots;
        exp.sync_mode = cfg.sync_mode;

        // Per-antenna, then per-node warm-started from it, then total from
        // per-node: feasible-set nesting makes each stage dominate the last.
        auto solve_mode = [&](PowerConstraintMode mode,
                              const BeamformerSolution* warm_from) {
            ScaOptions options;
            options.p3.power_mode = mode;
            BeamformerSolution sol = sca_optimize(cfg, real.channels, real.factors_worst,
                                                  real.stats_worst, real.clutter, options);
            if (warm_from && usable(*warm_from)) {
                std::vector<CMat> covs;
                for (const auto& w : warm_from->recovered.sensing)
                    covs.push_back(w * w.adjoint());
                auto ers = expected_target_covariance(real.factors_worst, real.stats_worst, covs);
                CMat z0 = real.clutter.full();
                int mr = cfg.rx_antennas;
                for (int n = 0; n < cfg.num_nodes; ++n)
                    z0.block(n * mr, n * mr, mr, mr) += ers[n];
                ScaOptions warm = options;
                warm.init_z = hermitize(z0);
                BeamformerSolution retry = sca_optimize(cfg, real.channels, real.factors_worst,
                                                        real.stats_worst, real.clutter, warm);
                if (usable(retry) &&
                    (!usable(sol) || retry.final_objective > sol.final_objective))
                    sol = std::move(retry);
                // Nesting guarantee: the warm-start solution itself remains
                // feasible for the looser constraint set.
                if (usable(*warm_from) && usable(sol) &&
                    sol.final_objective < warm_from->final_objective) {
                    BeamformerSolution inherited = *warm_from;
                    sol = std::move(inherited);
                }
            }
            return sol;
        };

        BeamformerSolution per_antenna = solve_mode(PowerConstraintMode::PerAntenna, nullptr);
        BeamformerSolution per_node = solve_mode(PowerConstraintMode::PerNode, &per_antenna);
        BeamformerSolution total = solve_mode(PowerConstraintMode::TotalSystem, &per_node);
        exit.note(per_antenna);
        exit.note(per_node);
        exit.note(total);

        struct Row {
            const char* name;
            const BeamformerSolution* sol;
        } rows[] = {{"total", &total}, {"per_node", &per_node}, {"per_antenna", &per_antenna}};
        RandomStream rng = spawn_rng_stream(cfg, "power_detection");
        for (const auto& row : rows) {
            if (!usable(*row.sol)) continue;
            obj.out << row.name << "," << seed << "," << fmt(row.sol->final_objective) << ","
                    << fmt(row.sol->recovered.total_power()) << "\n";
            auto curve = detection_probability(cfg, real.clutter, real.factors_nominal,
                                               real.stats_nominal, row.sol->recovered.sensing,
                                               exp, rng.sub(row.name));
            for (const auto& point : curve)
                det.out << row.name << "," << fmt(point.input_scnr_db) << "," << fmt(point.pd)
                        << "," << fmt(point.ci_low) << "," << fmt(point.ci_high) << "," << seed
                        << "\n";
        }
    }
    result.outputs.push_back(obj.path);
    result.outputs.push_back(det.path);
}

void run_rcs_models(const ExperimentSpec& spec, const std::string& dir, RunResult& result,
                    ExitTracker& exit) {
    CsvFile csv(dir, "rcs_models.csv",
                "model,gamma_db,seed,lower_bound,mean_kld,p10,p90,samples");
    RcsModel models[] = {RcsModel::chi_square(4.0), RcsModel::swerling_one()};
    for (const auto& model : models) {
        for (double gamma : spec.gamma_db) {
            for (std::uint64_t seed : spec.seeds) {
                ScenarioConfig cfg = with_seed(spec.scenario, seed);
                cfg.sinr_threshold = db_to_linear(gamma);
                cfg.rcs_model = model;
                ScenarioRealization real = realize_scenario(cfg);
                PipelineResult pipe = run_pipeline(real);
                exit.note(pipe.solution);
                if (!usable(pipe.solution)) continue;
                RandomStream rng = spawn_rng_stream(cfg, "rcs_band");
                KldSampleStats stats = sampled_kld_report(
                    cfg, real.clutter, real.factors_nominal, real.stats_nominal,
                    pipe.solution.recovered.sensing, spec.samples, rng);
                csv.out << model.name() << "," << fmt(gamma) << "," << seed << ","
                        << fmt(pipe.solution.final_objective) << "," << fmt(stats.mean) << ","
                        << fmt(stats.p10) << "," << fmt(stats.p90) << "," << stats.samples
                        << "\n";
            }
        }
    }
    result.outputs.push_back(csv.path);
}

void run_polar(const ExperimentSpec& spec, const std::string& dir, RunResult& result) {
    CsvFile csv(dir, "polar_pattern.csv", "model,angle_deg,mean_rcs,sampled_rcs");
    RcsModel models[] = {RcsModel::chi_square(4.0), RcsModel::swerling_one()};
    for (const auto& model : models) {
        RandomStream rng(spec.scenario.seed, "polar_" + model.name());
        PolarPattern pattern =
            emit_polar_pattern(spec.scenario.rcs_profile, model, rng, deg_to_rad(1.0));
        for (std::size_t i = 0; i < pattern.angles_rad.size(); ++i)
            csv.out << model.name() << "," << fmt(rad_to_deg(pattern.angles_rad[i])) << ","
                    << fmt(pattern.mean[i]) << "," << fmt(pattern.sampled[i]) << "\n";
    }
    result.outputs.push_back(csv.path);
}

}  // namespace

RunResult run_experiment(const ExperimentSpec& spec, const std::string& out_dir) {
    auto start = std::chrono::steady_clock::now();
    std::filesystem::create_directories(out_dir);
    RunResult result;
    ExitTracker exit;
    switch (spec.kind) {
        case ExperimentKind::Convergence: run_convergence(spec, out_dir, result, exit); break;
        case ExperimentKind::Tradeoff: run_tradeoff(spec, out_dir, result, exit); break;
        case ExperimentKind::Detection: run_detection(spec, out_dir, result, exit); break;
        case ExperimentKind::PowerModes: run_power_modes(spec, out_dir, result, exit); break;
        case ExperimentKind::RcsModels: run_rcs_models(spec, out_dir, result, exit); break;
        case ExperimentKind::PolarPattern: run_polar(spec, out_dir, result); break;
    }
    result.exit_code = exit.code();

    nlohmann::json manifest;
    manifest["experiment"] = kind_name(spec.kind);
    manifest["config_hash"] = config_hash(spec.scenario_text);
    manifest["revision"] = revision_string();
    manifest["seeds"] = spec.seeds;
    manifest["outputs"] = result.outputs;
    manifest["exit_code"] = result.exit_code;
    manifest["wall_time_s"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::ofstream mf(out_dir + "/manifest.json");
    mf << manifest.dump(2) << "\n";
    result.outputs.push_back(out_dir + "/manifest.json");
    return result;
}

std::string dump_first_program(const ScenarioConfig& cfg) {
    ScenarioRealization real = realize_scenario(cfg);
    CMat z0 = initialize_z(cfg, real.clutter, real.factors_worst, real.stats_worst);
    P3Inputs inputs{&cfg, &real.channels, &real.factors_worst, &real.stats_worst, &real.clutter};
    P3Program p3 = assemble_p3(inputs, z0);
    return p3.program.dump();
}

}  // namespace disac
