#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "disac/experiments.hpp"

int main(int argc, char** argv) {
    CLI::App app{"disac: robust beamforming experiments for coherent distributed ISAC"};
    app.require_subcommand(1);

    std::string spec_path;
    std::string out_dir;
    std::string seeds_csv;
    int workers = 0;
    bool full_scale = false;

    auto* run = app.add_subcommand("run", "run an experiment spec and emit CSV results");
    run->add_option("spec", spec_path, "experiment spec file")->required();
    run->add_option("--out", out_dir, "output directory (default $DISAC_OUT_ROOT or ./results)");
    run->add_option("--seeds", seeds_csv, "comma-separated seed list override");
    run->add_option("--workers", workers, "worker thread count (0 = library default)");
    run->add_flag("--full-scale", full_scale,
                  "run at the full 12-antenna, 3-UE parameter scale");

    std::string validate_path;
    auto* validate = app.add_subcommand("validate", "parse and validate an experiment spec");
    validate->add_option("spec", validate_path, "experiment spec file")->required();

    std::string dump_path;
    auto* dump = app.add_subcommand("dump-program", "dump the first surrogate conic program");
    dump->add_option("spec", dump_path, "experiment spec file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate->parsed()) {
            disac::ExperimentSpec spec = disac::ExperimentSpec::load(validate_path);
            std::cout << "ok: config hash " << disac::config_hash(spec.scenario_text) << "\n";
            return 0;
        }
        if (dump->parsed()) {
            disac::ExperimentSpec spec = disac::ExperimentSpec::load(dump_path);
            std::cout << disac::dump_first_program(spec.scenario);
            return 0;
        }

        disac::ExperimentSpec spec = disac::ExperimentSpec::load(spec_path);
        if (!seeds_csv.empty()) {
            spec.seeds.clear();
            std::stringstream ss(seeds_csv);
            std::string tok;
            while (std::getline(ss, tok, ',')) spec.seeds.push_back(std::stoull(tok));
        }
        if (full_scale) {
            spec.scenario.tx_antennas = 12;
            spec.scenario.rx_antennas = 12;
            spec.scenario.num_ues = 3;
            disac::draw_ue_positions(spec.scenario, 200.0);
            spec.scenario_text = disac::serialize_config(spec.scenario);
        }
#ifdef _OPENMP
        if (workers > 0) omp_set_num_threads(workers);
#else
        (void)workers;
#endif
        if (out_dir.empty()) {
            const char* root = std::getenv("DISAC_OUT_ROOT");
            out_dir = root ? std::string(root) : "results";
        }
        disac::RunResult result = disac::run_experiment(spec, out_dir);
        for (const auto& f : result.outputs) std::cout << "wrote " << f << "\n";
        if (result.exit_code != 0)
            std::cerr << "completed with status " << result.exit_code
                      << (result.exit_code == 2 ? " (infeasible experiment)"
                                                : " (solver trouble)")
                      << "\n";
        return result.exit_code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
