#include "fishsim/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fishsim/control_gen.hpp"
#include "fishsim/io.hpp"

namespace fishsim {

namespace fs = std::filesystem;

namespace {

std::string fmt(double v, const char* spec = "%.17g") {
    char buf[32];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

std::uint64_t trial_seed(std::uint64_t master_seed, const std::string& method,
                         int trial_index) {
    std::uint64_t h = 1469598103934665603ull ^ master_seed;
    for (char c : method) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    h ^= static_cast<std::uint64_t>(trial_index) + 1;
    h *= 1099511628211ull;
    return h;
}

std::string trial_name(int index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "trial_%02d", index);
    return buf;
}

}  // namespace

void save_trial_records_csv(const std::vector<TrialRecord>& records,
                            const std::string& path) {
    std::ofstream os(path);
    if (!os) throw DataError("cannot open for writing: " + path);
    os << "method,trial,seed,best_fitness,d0,d1,d2,d3,wall_clock_s";
    for (int i = 0; i < kGenomeLength; ++i) os << ",g" << i;
    os << '\n';
    for (const auto& r : records) {
        os << r.method << ',' << r.trial_index << ',' << r.seed << ','
           << fmt(r.best_fitness);
        for (double d : r.scores) os << ',' << fmt(d);
        os << ',' << fmt(r.wall_clock_seconds, "%.3f");
        for (double g : r.best_genome) os << ',' << fmt(g);
        os << '\n';
    }
}

std::vector<TrialRecord> load_trial_records_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw DataError("cannot open trial records: " + path);
    std::string line;
    if (!std::getline(is, line)) throw DataError(path + ": empty file");
    std::vector<TrialRecord> records;
    int line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ls(line);
        TrialRecord r;
        std::string field;
        auto next = [&](const char* what) {
            if (!std::getline(ls, field, ',')) {
                throw DataError(path + ":" + std::to_string(line_no) + ": missing " +
                                what);
            }
            return field;
        };
        r.method = next("method");
        r.trial_index = std::stoi(next("trial"));
        r.seed = std::stoull(next("seed"));
        r.best_fitness = std::stod(next("best_fitness"));
        for (double& d : r.scores) d = std::stod(next("descriptor"));
        r.wall_clock_seconds = std::stod(next("wall_clock"));
        r.best_genome.reserve(kGenomeLength);
        for (int i = 0; i < kGenomeLength; ++i)
            r.best_genome.push_back(std::stod(next("gene")));
        records.push_back(std::move(r));
    }
    return records;
}

BehaviouralSignature prepare_control(const ExperimentConfig& config, bool write_files) {
    std::vector<Trajectory> trials;
    if (!config.control_dir.empty()) {
        std::vector<std::string> paths;
        for (const auto& entry : fs::directory_iterator(config.control_dir)) {
            if (entry.path().extension() == ".csv") paths.push_back(entry.path());
        }
        if (paths.empty()) {
            throw DataError("no control trajectories in " + config.control_dir);
        }
        std::sort(paths.begin(), paths.end());
        for (const auto& p : paths) {
            trials.push_back(
                load_trajectory_csv(p, CoordinateUnit::Meters, config.arena).trajectory);
        }
    } else {
        trials = gen_control(config.control, config.sim, config.arena,
                             trial_seed(config.master_seed, "control", 0));
        if (write_files) {
            const fs::path dir = fs::path(config.out_dir) / "control";
            fs::create_directories(dir);
            for (std::size_t i = 0; i < trials.size(); ++i) {
                save_trajectory_csv(
                    trials[i],
                    (dir / (trial_name(static_cast<int>(i)) + ".csv")).string());
            }
        }
    }
    std::vector<BehaviouralSignature> sigs;
    sigs.reserve(trials.size());
    for (const auto& t : trials) sigs.push_back(compute_signature(t, config.metrics));
    return aggregate_control(sigs);
}

EvaluationContext make_context(const ExperimentConfig& config,
                               BehaviouralSignature control) {
    EvaluationContext ctx;
    ctx.sim = config.sim;
    ctx.arena = config.arena;
    ctx.metrics = config.metrics;
    ctx.control = std::move(control);
    ctx.master_seed = config.master_seed;
    return ctx;
}

TrialRecord run_qd_trial(const ExperimentConfig& config, const EvaluationContext& ctx,
                         int trial_index, const std::string& trial_dir) {
    const auto start = std::chrono::steady_clock::now();
    QdConfig qc = config.qd;
    qc.seed = trial_seed(config.master_seed, "qd", trial_index);
    qc.workers = config.workers;

    std::vector<BatchRecord> progress;
    const Archive archive = run_qd(
        qc,
        [&ctx](const Genome& g) {
            const Evaluation e = evaluate_genome(g, ctx);
            return std::make_pair(e.fitness, e.descriptor);
        },
        [&progress](const BatchRecord& r, const Archive&) { progress.push_back(r); });

    TrialRecord record;
    record.method = "qd";
    record.trial_index = trial_index;
    record.seed = qc.seed;
    for (const auto& slot : archive.niches) {
        if (slot && slot->fitness >= record.best_fitness) {
            if (record.best_genome.empty() || slot->fitness > record.best_fitness) {
                record.best_fitness = slot->fitness;
                record.best_genome = slot->genome;
                record.scores = slot->descriptor;
            }
        }
    }
    record.wall_clock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    if (!trial_dir.empty()) {
        fs::create_directories(trial_dir);
        save_archive_csv(archive, config.digest(),
                         (fs::path(trial_dir) / "archive.csv").string());
        save_qd_progress_csv(progress, (fs::path(trial_dir) / "progress.csv").string());
        export_archive_scatter(archive,
                               (fs::path(trial_dir) / "niche_scatter.csv").string());
        save_genomes_csv({record.best_genome},
                         (fs::path(trial_dir) / "best_genome.csv").string());
    }
    return record;
}

TrialRecord run_cmaes_trial(const ExperimentConfig& config,
                            const EvaluationContext& ctx, int trial_index,
                            const std::string& trial_dir) {
    const auto start = std::chrono::steady_clock::now();
    CmaConfig cc = config.cmaes;
    cc.dim = kGenomeLength;
    cc.seed = trial_seed(config.master_seed, "cmaes", trial_index);
    cc.workers = config.workers;

    const CmaResult result = run_cmaes(
        cc, [&ctx](const Genome& g) { return evaluate_genome(g, ctx).fitness; });

    TrialRecord record;
    record.method = "cmaes";
    record.trial_index = trial_index;
    record.seed = cc.seed;
    record.best_genome = result.best_genome;
    const Evaluation best = evaluate_genome(result.best_genome, ctx);
    record.best_fitness = best.fitness;
    record.scores = best.descriptor;
    record.wall_clock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    if (!trial_dir.empty()) {
        fs::create_directories(trial_dir);
        save_cma_history_csv(result.history,
                             (fs::path(trial_dir) / "history.csv").string());
        save_genomes_csv({record.best_genome},
                         (fs::path(trial_dir) / "best_genome.csv").string());
    }
    return record;
}

ComparisonReport compare_methods(const std::vector<TrialRecord>& records) {
    ComparisonReport report;
    report.qd.method = "qd";
    report.cmaes.method = "cmaes";
    for (const auto& r : records) {
        if (r.method == "qd") report.qd.best_fitnesses.push_back(r.best_fitness);
        else if (r.method == "cmaes")
            report.cmaes.best_fitnesses.push_back(r.best_fitness);
    }
    if (report.qd.best_fitnesses.empty() || report.cmaes.best_fitnesses.empty()) {
        throw std::invalid_argument("compare_methods: need trials from both methods");
    }
    report.qd_summary = summarize(report.qd);
    report.cmaes_summary = summarize(report.cmaes);
    report.test = mann_whitney_u(report.qd.best_fitnesses, report.cmaes.best_fitnesses);
    report.qd_dominates = dominance_check(report.qd, report.cmaes);

    std::ostringstream os;
    auto row = [&os](const char* name, const TrialSet& s, const Summary& sum) {
        os << name << ": n=" << s.best_fitnesses.size() << " median="
           << fmt(sum.median, "%.6f") << " q1=" << fmt(sum.q1, "%.6f")
           << " q3=" << fmt(sum.q3, "%.6f") << " max=" << fmt(sum.max, "%.6f") << '\n';
    };
    os << "Best-fitness comparison across trials\n";
    row("qd   ", report.qd, report.qd_summary);
    row("cmaes", report.cmaes, report.cmaes_summary);
    os << "Mann-Whitney U=" << fmt(report.test.u, "%.6g")
       << " two-sided p=" << fmt(report.test.p_value, "%.6g")
       << (report.test.exact ? " (exact)" : " (normal approx.)") << '\n';
    os << "dominance (qd max > cmaes max): " << (report.qd_dominates ? "yes" : "no")
       << '\n';
    report.text = os.str();
    return report;
}

void save_comparison_csv(const ComparisonReport& report, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw DataError("cannot open for writing: " + path);
    os << "method,n,median,q1,q3,max,U,p\n";
    auto row = [&os, &report](const TrialSet& s, const Summary& sum) {
        os << s.method << ',' << s.best_fitnesses.size() << ',' << fmt(sum.median)
           << ',' << fmt(sum.q1) << ',' << fmt(sum.q3) << ',' << fmt(sum.max) << ','
           << fmt(report.test.u) << ',' << fmt(report.test.p_value) << '\n';
    };
    row(report.qd, report.qd_summary);
    row(report.cmaes, report.cmaes_summary);
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
    fs::create_directories(config.out_dir);
    const BehaviouralSignature control = prepare_control(config);
    export_signature(control, config.metrics,
                     (fs::path(config.out_dir) / "control").string(), "control");
    const EvaluationContext ctx = make_context(config, control);

    ExperimentResult result;
    std::ostringstream failures;
    for (const std::string method : {"qd", "cmaes"}) {
        for (int t = 0; t < config.n_trials; ++t) {
            const std::string dir =
                (fs::path(config.out_dir) / method / trial_name(t)).string();
            try {
                TrialRecord record = method == "qd"
                                         ? run_qd_trial(config, ctx, t, dir)
                                         : run_cmaes_trial(config, ctx, t, dir);
                // Signature files of the best controller, for plotting.
                SimulationConfig sim = ctx.sim;
                sim.seed = derive_sim_seed(ctx.master_seed, record.best_genome);
                const Trajectory traj = simulate(decode(record.best_genome), sim,
                                                 ctx.arena);
                export_signature(compute_signature(traj, ctx.metrics), ctx.metrics, dir,
                                 "best");
                result.records.push_back(std::move(record));
            } catch (const std::exception& e) {
                failures << method << " " << trial_name(t) << " failed: " << e.what()
                         << '\n';
            }
        }
    }
    save_trial_records_csv(result.records,
                           (fs::path(config.out_dir) / "trial_records.csv").string());

    result.report = compare_methods(result.records);
    if (!failures.str().empty()) {
        result.report.text += "Failed trials:\n" + failures.str();
    }
    std::ofstream report_txt(fs::path(config.out_dir) / "report.txt");
    report_txt << result.report.text;
    save_comparison_csv(result.report,
                        (fs::path(config.out_dir) / "report.csv").string());
    return result;
}

}  // namespace fishsim
