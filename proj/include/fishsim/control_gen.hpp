#pragma once

#include <cstdint>
#include <vector>

#include "fishsim/config.hpp"
#include "fishsim/sim.hpp"

namespace fishsim {

/// Generates one trial of the rule-based reference behaviour: wall
/// following near walls, attraction towards the group centroid, heading
/// persistence, plus noise; speed mean-reverts around a cruising speed.
Trajectory gen_control_trial(const ControlGenParams& params,
                             const SimulationConfig& sim, const Arena& arena,
                             std::uint64_t seed);

/// One trajectory per trial, seeds seed, seed+1, ...
std::vector<Trajectory> gen_control(const ControlGenParams& params,
                                    const SimulationConfig& sim, const Arena& arena,
                                    std::uint64_t seed);

}  // namespace fishsim
