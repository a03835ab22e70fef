#pragma once

#include <string>
#include <vector>

#include "fishsim/config.hpp"
#include "fishsim/evaluator.hpp"
#include "fishsim/stats.hpp"

namespace fishsim {

struct TrialRecord {
    std::string method;  // "qd" or "cmaes"
    int trial_index = 0;
    std::uint64_t seed = 0;
    Genome best_genome;
    double best_fitness = 0.0;
    Descriptor scores{};  // (I_D, I_L, I_P, I_E)
    double wall_clock_seconds = 0.0;
};

void save_trial_records_csv(const std::vector<TrialRecord>& records,
                            const std::string& path);
std::vector<TrialRecord> load_trial_records_csv(const std::string& path);

/// Builds the aggregated control signature: load trajectories from
/// config.control_dir when set, otherwise generate them (and write them
/// under out_dir/control).
BehaviouralSignature prepare_control(const ExperimentConfig& config,
                                     bool write_files = true);

EvaluationContext make_context(const ExperimentConfig& config,
                               BehaviouralSignature control);

TrialRecord run_qd_trial(const ExperimentConfig& config, const EvaluationContext& ctx,
                         int trial_index, const std::string& trial_dir);
TrialRecord run_cmaes_trial(const ExperimentConfig& config,
                            const EvaluationContext& ctx, int trial_index,
                            const std::string& trial_dir);

struct ComparisonReport {
    TrialSet qd;
    TrialSet cmaes;
    Summary qd_summary;
    Summary cmaes_summary;
    MannWhitneyResult test;
    bool qd_dominates = false;
    std::string text;  // human-readable rendering
};

ComparisonReport compare_methods(const std::vector<TrialRecord>& records);
void save_comparison_csv(const ComparisonReport& report, const std::string& path);

struct ExperimentResult {
    std::vector<TrialRecord> records;
    ComparisonReport report;
};

/// Full pipeline: control, n_trials runs of each optimizer, stats report.
/// A failed trial is recorded and skipped; remaining trials proceed.
ExperimentResult run_experiment(const ExperimentConfig& config);

}  // namespace fishsim
