#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "fishsim/cmaes.hpp"
#include "fishsim/metrics.hpp"
#include "fishsim/qd.hpp"
#include "fishsim/sim.hpp"

namespace fishsim {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Parameters of the rule-based reference behaviour used to generate
/// synthetic control trajectories.
struct ControlGenParams {
    int n_trials = 10;
    double speed_mean = 0.12;        // m/s, mean-reverting target
    double speed_reversion = 1.5;    // 1/s
    double speed_noise = 0.05;       // m/s per sqrt(s)
    double wall_zone = 0.1;          // m, tangent-following activates inside
    double weight_wall_tangent = 2.5;
    double weight_wall_attract = 0.4;
    double weight_centroid = 0.6;
    double weight_persistence = 2.0;
    double heading_noise = 0.25;     // rad per step
    double max_turn = 1.8;           // rad/s
};

struct ExperimentConfig {
    Arena arena;
    SimulationConfig sim;
    MetricsConfig metrics;
    QdConfig qd;
    CmaConfig cmaes;
    ControlGenParams control;
    int n_trials = 10;
    std::uint64_t master_seed = 42;
    int workers = 1;
    std::string out_dir = "out";
    std::string control_dir;  // load control from here instead of generating

    /// Keeps derived fields consistent (metrics side/v_max/dt follow sim).
    void sync_derived();
    /// Shrinks steps and budgets for desk-scale runs.
    void apply_desk_scale();
    /// Stable digest of every knob, recorded in output files.
    std::string digest() const;
};

/// Parses the sectioned key/value config format. Unknown sections or keys
/// are errors.
ExperimentConfig parse_config(std::istream& is);
ExperimentConfig load_config(const std::string& path);

}  // namespace fishsim
