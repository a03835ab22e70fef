#include "fishsim/control_gen.hpp"

#include <algorithm>
#include <cmath>

namespace fishsim {

namespace {

struct WallContext {
    double distance;
    double normal_angle;  // inward normal of the nearest wall
};

WallContext nearest_wall_context(Vec2 p, const Arena& arena) {
    const double s = arena.side;
    const std::array<double, 4> d = {p.x, s - p.x, p.y, s - p.y};
    const std::array<double, 4> inward = {0.0, kPi, kPi / 2.0, -kPi / 2.0};
    std::size_t best = 0;
    for (std::size_t i = 1; i < 4; ++i)
        if (d[i] < d[best]) best = i;
    return {d[best], inward[best]};
}

}  // namespace

Trajectory gen_control_trial(const ControlGenParams& params,
                             const SimulationConfig& sim, const Arena& arena,
                             std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::array<AgentState, kNumAgents> states = init_agents(sim, arena, rng);
    for (auto& s : states) s.linear_speed = params.speed_mean;

    std::normal_distribution<double> gauss(0.0, 1.0);
    const double dt = sim.dt;
    const double sqrt_dt = std::sqrt(dt);

    Trajectory traj;
    traj.dt = dt;
    traj.positions.reserve(sim.n_steps);
    auto record = [&] {
        std::array<Vec2, kNumAgents> row;
        for (int i = 0; i < kNumAgents; ++i) row[i] = states[i].position;
        traj.positions.push_back(row);
    };
    record();

    for (int step = 1; step < sim.n_steps; ++step) {
        std::array<AgentState, kNumAgents> next = states;
        for (int i = 0; i < kNumAgents; ++i) {
            const AgentState& me = states[i];

            // Weighted circular blend of the behaviour components.
            double vx = params.weight_persistence * std::cos(me.heading);
            double vy = params.weight_persistence * std::sin(me.heading);

            Vec2 centroid{0.0, 0.0};
            for (int j = 0; j < kNumAgents; ++j) {
                if (j == i) continue;
                centroid = centroid + states[j].position;
            }
            centroid.x /= kNumAgents - 1;
            centroid.y /= kNumAgents - 1;
            const Vec2 to_centroid = centroid - me.position;
            if (norm(to_centroid) > 1e-9) {
                const double a = std::atan2(to_centroid.y, to_centroid.x);
                vx += params.weight_centroid * std::cos(a);
                vy += params.weight_centroid * std::sin(a);
            }

            const WallContext wall = nearest_wall_context(me.position, arena);
            if (wall.distance < params.wall_zone) {
                // Follow the wall: tangent whose sense is closest to the
                // current heading.
                const double t1 = wrap_angle(wall.normal_angle + kPi / 2.0);
                const double t2 = wrap_angle(wall.normal_angle - kPi / 2.0);
                const double tangent =
                    std::abs(wrap_angle(t1 - me.heading)) <
                            std::abs(wrap_angle(t2 - me.heading))
                        ? t1
                        : t2;
                vx += params.weight_wall_tangent * std::cos(tangent);
                vy += params.weight_wall_tangent * std::sin(tangent);
                // Nudge off the wall when pressed against it.
                if (wall.distance < 0.02) {
                    vx += 0.5 * std::cos(wall.normal_angle);
                    vy += 0.5 * std::sin(wall.normal_angle);
                }
            } else {
                // Drift towards the nearest wall (wall-biased occupancy).
                const double outward = wrap_angle(wall.normal_angle + kPi);
                vx += params.weight_wall_attract * std::cos(outward);
                vy += params.weight_wall_attract * std::sin(outward);
            }

            double desired = std::atan2(vy, vx) + params.heading_noise * gauss(rng);
            double turn = wrap_angle(desired - me.heading);
            turn = std::clamp(turn, -params.max_turn * dt, params.max_turn * dt);
            next[i].heading = wrap_angle(me.heading + turn);

            double v = me.linear_speed +
                       params.speed_reversion * (params.speed_mean - me.linear_speed) *
                           dt +
                       params.speed_noise * sqrt_dt * gauss(rng);
            next[i].linear_speed = std::clamp(v, 0.0, sim.v_max);

            next[i].position.x =
                me.position.x + next[i].linear_speed * dt * std::cos(next[i].heading);
            next[i].position.y =
                me.position.y + next[i].linear_speed * dt * std::sin(next[i].heading);
            next[i].position.x =
                std::clamp(next[i].position.x, arena.margin, arena.side - arena.margin);
            next[i].position.y =
                std::clamp(next[i].position.y, arena.margin, arena.side - arena.margin);
        }
        states = next;
        record();
    }
    return traj;
}

std::vector<Trajectory> gen_control(const ControlGenParams& params,
                                    const SimulationConfig& sim, const Arena& arena,
                                    std::uint64_t seed) {
    std::vector<Trajectory> out;
    out.reserve(params.n_trials);
    for (int t = 0; t < params.n_trials; ++t)
        out.push_back(gen_control_trial(params, sim, arena, seed + t));
    return out;
}

}  // namespace fishsim
