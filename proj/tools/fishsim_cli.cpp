#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "fishsim/config.hpp"
#include "fishsim/control_gen.hpp"
#include "fishsim/experiment.hpp"
#include "fishsim/io.hpp"

namespace fs = std::filesystem;
using namespace fishsim;

namespace {

struct CommonOpts {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;
    std::optional<std::string> out;
    std::string scale = "full";
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "experiment config file");
    cmd->add_option("--seed", opts.seed, "master seed override");
    cmd->add_option("--workers", opts.workers, "evaluation worker count");
    cmd->add_option("--out", opts.out, "output directory override");
    cmd->add_option("--scale", opts.scale, "full|desk")
        ->check(CLI::IsMember({"full", "desk"}));
}

ExperimentConfig resolve_config(const CommonOpts& opts) {
    ExperimentConfig config =
        opts.config_path.empty() ? ExperimentConfig{} : load_config(opts.config_path);
    if (opts.seed) config.master_seed = *opts.seed;
    if (opts.workers) config.workers = *opts.workers;
    if (opts.out) config.out_dir = *opts.out;
    if (opts.scale == "desk") config.apply_desk_scale();
    config.sync_derived();
    return config;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fishsim: collective-motion controller calibration"};
    app.require_subcommand(1);

    CommonOpts opts;

    auto* gen_cmd = app.add_subcommand("gen-control",
                                       "generate synthetic control trajectories");
    add_common(gen_cmd, opts);

    auto* analyze_cmd =
        app.add_subcommand("analyze", "compute the behavioural signature of a trajectory");
    add_common(analyze_cmd, opts);
    std::string analyze_input;
    bool analyze_pixels = false;
    analyze_cmd->add_option("--input", analyze_input, "trajectory CSV")->required();
    analyze_cmd->add_flag("--pixels", analyze_pixels, "input coordinates are pixels");

    auto* sim_cmd = app.add_subcommand("simulate", "run one controller simulation");
    add_common(sim_cmd, opts);
    std::string sim_genome;
    sim_cmd->add_option("--genome", sim_genome, "genome CSV (first row used)")
        ->required();

    auto* qd_cmd = app.add_subcommand("evolve-qd", "run CVT-MAP-Elites trials");
    add_common(qd_cmd, opts);
    auto* cma_cmd = app.add_subcommand("evolve-cmaes", "run CMA-ES baseline trials");
    add_common(cma_cmd, opts);

    auto* cmp_cmd = app.add_subcommand("compare", "statistical comparison of methods");
    add_common(cmp_cmd, opts);
    std::vector<std::string> record_files;
    cmp_cmd->add_option("--records", record_files, "trial record CSV files")
        ->required();

    auto* plot_cmd = app.add_subcommand("export-plots", "emit plot-data files");
    add_common(plot_cmd, opts);
    std::string plot_archive, plot_traj;
    plot_cmd->add_option("--archive", plot_archive, "archive CSV to scatter-export");
    plot_cmd->add_option("--trajectory", plot_traj, "trajectory CSV to analyse");

    CLI11_PARSE(app, argc, argv);

    try {
        const ExperimentConfig config = resolve_config(opts);
        fs::create_directories(config.out_dir);

        if (gen_cmd->parsed()) {
            ExperimentConfig cfg = config;
            cfg.control_dir.clear();
            const BehaviouralSignature control = prepare_control(cfg);
            export_signature(control, cfg.metrics,
                             (fs::path(cfg.out_dir) / "control").string(), "control");
            std::cout << "control written to " << cfg.out_dir << "/control\n";
        } else if (analyze_cmd->parsed()) {
            const auto loaded = load_trajectory_csv(
                analyze_input,
                analyze_pixels ? CoordinateUnit::Pixels : CoordinateUnit::Meters,
                config.arena);
            const BehaviouralSignature sig =
                compute_signature(loaded.trajectory, config.metrics);
            if (sig.range_warning()) {
                std::cerr << "warning: >5% of samples clamped; check units\n";
            }
            export_signature(sig, config.metrics, config.out_dir,
                             fs::path(analyze_input).stem().string());
            std::cout << "signature written to " << config.out_dir << "\n";
        } else if (sim_cmd->parsed()) {
            const auto genomes = load_genomes_csv(sim_genome);
            if (genomes.empty()) throw DataError("genome file is empty");
            SimulationConfig sim = config.sim;
            sim.seed = config.master_seed;
            const Trajectory traj = simulate(decode(genomes.front()), sim, config.arena);
            const std::string out = (fs::path(config.out_dir) / "trajectory.csv").string();
            save_trajectory_csv(traj, out);
            std::cout << "trajectory written to " << out << "\n";
        } else if (qd_cmd->parsed() || cma_cmd->parsed()) {
            const BehaviouralSignature control = prepare_control(config);
            const EvaluationContext ctx = make_context(config, control);
            std::vector<TrialRecord> records;
            const std::string method = qd_cmd->parsed() ? "qd" : "cmaes";
            for (int t = 0; t < config.n_trials; ++t) {
                char name[32];
                std::snprintf(name, sizeof(name), "trial_%02d", t);
                const std::string dir =
                    (fs::path(config.out_dir) / method / name).string();
                TrialRecord rec = qd_cmd->parsed()
                                      ? run_qd_trial(config, ctx, t, dir)
                                      : run_cmaes_trial(config, ctx, t, dir);
                std::cout << method << " " << name << ": best fitness "
                          << rec.best_fitness << "\n";
                records.push_back(std::move(rec));
            }
            save_trial_records_csv(
                records,
                (fs::path(config.out_dir) / (method + "_records.csv")).string());
        } else if (cmp_cmd->parsed()) {
            std::vector<TrialRecord> records;
            for (const auto& f : record_files) {
                auto part = load_trial_records_csv(f);
                records.insert(records.end(), part.begin(), part.end());
            }
            const ComparisonReport report = compare_methods(records);
            std::cout << report.text;
            save_comparison_csv(report,
                                (fs::path(config.out_dir) / "report.csv").string());
        } else if (plot_cmd->parsed()) {
            if (plot_archive.empty() && plot_traj.empty()) {
                throw ConfigError("export-plots: need --archive or --trajectory");
            }
            if (!plot_archive.empty()) {
                const Archive archive = load_archive_csv(plot_archive);
                export_archive_scatter(
                    archive, (fs::path(config.out_dir) / "niche_scatter.csv").string());
            }
            if (!plot_traj.empty()) {
                const auto loaded = load_trajectory_csv(
                    plot_traj, CoordinateUnit::Meters, config.arena);
                export_signature(compute_signature(loaded.trajectory, config.metrics),
                                 config.metrics, config.out_dir,
                                 fs::path(plot_traj).stem().string());
            }
            std::cout << "plot data written to " << config.out_dir << "\n";
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const NumericalFailure& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
