#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "fishsim/angles.hpp"

namespace fishsim {

inline constexpr int kNumAgents = 5;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }

struct Arena {
    double side = 1.0;
    double margin = 0.005;
};

struct AgentState {
    Vec2 position;
    double heading = 0.0;        // wrapped to [-pi, pi)
    double linear_speed = 0.0;   // m/s, in [0, v_max]
    double angular_speed = 0.0;  // rad/s
};

struct SimulationConfig {
    int n_agents = kNumAgents;  // fixed
    double dt = 1.0 / 15.0;
    int n_steps = 27000;
    double v_max = 0.35;   // m/s
    double dv_max = 0.05;  // m/s per step
    double dw_max = 2.0;   // rad/s per step
    std::uint64_t seed = 0;

    double angular_speed_bound() const { return kPi / dt; }
};

using PerceptionVector = std::array<double, 20>;

struct Action {
    double delta_linear = 0.0;   // raw, in [-1, 1]
    double delta_angular = 0.0;  // raw, in [-1, 1]
};

/// Positions of all agents over a trial. Headings and speeds are derived
/// from positions so that simulated and loaded trajectories are analysed
/// identically.
struct Trajectory {
    double dt = 1.0 / 15.0;
    std::vector<std::array<Vec2, kNumAgents>> positions;

    std::size_t n_steps() const { return positions.size(); }

    /// Displacement-based headings for steps 1..n-1 (size n-1). Zero
    /// displacement keeps the previous heading.
    std::vector<std::array<double, kNumAgents>> derived_headings() const;
    /// Speeds |pos[t]-pos[t-1]|/dt for steps 1..n-1 (size n-1).
    std::vector<std::array<double, kNumAgents>> derived_speeds() const;
};

class MlpParams;  // controller.hpp

PerceptionVector build_perception(int focal_index,
                                  const std::array<AgentState, kNumAgents>& states,
                                  const Arena& arena, const SimulationConfig& config);

AgentState apply_action(const AgentState& state, const Action& action,
                        const SimulationConfig& config, const Arena& arena);

std::array<AgentState, kNumAgents> init_agents(const SimulationConfig& config,
                                               const Arena& arena, std::mt19937_64& rng);

Trajectory simulate(const MlpParams& controller, const SimulationConfig& config,
                    const Arena& arena);

}  // namespace fishsim
