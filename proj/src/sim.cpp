#include "fishsim/sim.hpp"

#include <algorithm>
#include <cmath>

#include "fishsim/controller.hpp"

namespace fishsim {

namespace {

double clamp_unit(double v) { return std::clamp(v, -1.0, 1.0); }

struct WallInfo {
    double distance;
    Vec2 closest_point;
};

WallInfo nearest_wall(Vec2 p, const Arena& arena) {
    const double s = arena.side;
    // west, east, south, north; first minimum wins on ties
    const std::array<double, 4> d = {p.x, s - p.x, p.y, s - p.y};
    const std::array<Vec2, 4> cp = {Vec2{0.0, p.y}, Vec2{s, p.y}, Vec2{p.x, 0.0},
                                    Vec2{p.x, s}};
    std::size_t best = 0;
    for (std::size_t i = 1; i < 4; ++i)
        if (d[i] < d[best]) best = i;
    return {d[best], cp[best]};
}

}  // namespace

PerceptionVector build_perception(int focal_index,
                                  const std::array<AgentState, kNumAgents>& states,
                                  const Arena& arena, const SimulationConfig& config) {
    if (focal_index < 0 || focal_index >= kNumAgents) {
        throw std::invalid_argument("build_perception: focal_index out of range");
    }
    const AgentState& focal = states[focal_index];
    const double diag = std::sqrt(2.0) * arena.side;

    // Neighbours sorted by increasing distance to the focal agent.
    struct Neighbour {
        double distance;
        int index;
    };
    std::array<Neighbour, kNumAgents - 1> neighbours;
    int n = 0;
    for (int i = 0; i < kNumAgents; ++i) {
        if (i == focal_index) continue;
        neighbours[n++] = {norm(states[i].position - focal.position), i};
    }
    std::sort(neighbours.begin(), neighbours.end(),
              [](const Neighbour& a, const Neighbour& b) {
                  return a.distance < b.distance ||
                         (a.distance == b.distance && a.index < b.index);
              });

    PerceptionVector v;
    v[0] = clamp_unit(focal.linear_speed / config.v_max);
    v[1] = clamp_unit(focal.angular_speed / config.angular_speed_bound());
    for (int k = 0; k < kNumAgents - 1; ++k) {
        const AgentState& other = states[neighbours[k].index];
        const Vec2 rel = other.position - focal.position;
        v[2 + k] = clamp_unit(neighbours[k].distance / diag);
        const double bearing =
            neighbours[k].distance > 0.0
                ? wrap_angle(std::atan2(rel.y, rel.x) - focal.heading)
                : 0.0;
        v[6 + k] = clamp_unit(bearing / kPi);
        v[10 + k] = clamp_unit(wrap_angle(other.heading - focal.heading) / kPi);
        v[14 + k] =
            clamp_unit((other.linear_speed - focal.linear_speed) / (2.0 * config.v_max));
    }
    const WallInfo wall = nearest_wall(focal.position, arena);
    v[18] = clamp_unit(wall.distance / (arena.side / 2.0));
    const Vec2 to_wall = wall.closest_point - focal.position;
    const double wall_bearing =
        wall.distance > 0.0 ? wrap_angle(std::atan2(to_wall.y, to_wall.x) - focal.heading)
                            : 0.0;
    v[19] = clamp_unit(wall_bearing / kPi);
    return v;
}

AgentState apply_action(const AgentState& state, const Action& action,
                        const SimulationConfig& config, const Arena& arena) {
    AgentState next;
    next.linear_speed =
        std::clamp(state.linear_speed + action.delta_linear * config.dv_max, 0.0,
                   config.v_max);
    const double w_bound = config.angular_speed_bound();
    next.angular_speed =
        std::clamp(state.angular_speed + action.delta_angular * config.dw_max, -w_bound,
                   w_bound);
    next.heading = wrap_angle(state.heading + next.angular_speed * config.dt);
    next.position.x =
        state.position.x + next.linear_speed * config.dt * std::cos(next.heading);
    next.position.y =
        state.position.y + next.linear_speed * config.dt * std::sin(next.heading);
    const double lo = arena.margin;
    const double hi = arena.side - arena.margin;
    next.position.x = std::clamp(next.position.x, lo, hi);
    next.position.y = std::clamp(next.position.y, lo, hi);
    return next;
}

std::array<AgentState, kNumAgents> init_agents(const SimulationConfig& config,
                                               const Arena& arena, std::mt19937_64& rng) {
    (void)config;
    const double c = arena.side / 2.0;
    std::uniform_real_distribution<double> pos(c - 0.1, c + 0.1);
    std::uniform_real_distribution<double> angle(-kPi, kPi);
    std::array<AgentState, kNumAgents> states;
    for (auto& s : states) {
        s.position.x = pos(rng);
        s.position.y = pos(rng);
        s.heading = wrap_angle(angle(rng));
        s.linear_speed = 0.0;
        s.angular_speed = 0.0;
    }
    return states;
}

Trajectory simulate(const MlpParams& controller, const SimulationConfig& config,
                    const Arena& arena) {
    std::mt19937_64 rng(config.seed);
    std::array<AgentState, kNumAgents> states = init_agents(config, arena, rng);

    Trajectory traj;
    traj.dt = config.dt;
    traj.positions.reserve(config.n_steps);
    auto record = [&traj](const std::array<AgentState, kNumAgents>& s) {
        std::array<Vec2, kNumAgents> row;
        for (int i = 0; i < kNumAgents; ++i) row[i] = s[i].position;
        traj.positions.push_back(row);
    };
    record(states);

    for (int step = 1; step < config.n_steps; ++step) {
        // Synchronous update: all perceptions from the previous step's state.
        std::array<AgentState, kNumAgents> next;
        for (int i = 0; i < kNumAgents; ++i) {
            const PerceptionVector input = build_perception(i, states, arena, config);
            const Action action = controller.forward(input);
            next[i] = apply_action(states[i], action, config, arena);
        }
        states = next;
        record(states);
    }
    return traj;
}

std::vector<std::array<double, kNumAgents>> Trajectory::derived_headings() const {
    std::vector<std::array<double, kNumAgents>> out;
    if (positions.size() < 2) return out;
    out.resize(positions.size() - 1);
    std::array<double, kNumAgents> last{};
    for (std::size_t t = 1; t < positions.size(); ++t) {
        for (int i = 0; i < kNumAgents; ++i) {
            const Vec2 disp = positions[t][i] - positions[t - 1][i];
            if (norm(disp) > 1e-12) last[i] = std::atan2(disp.y, disp.x);
            out[t - 1][i] = last[i];
        }
    }
    return out;
}

std::vector<std::array<double, kNumAgents>> Trajectory::derived_speeds() const {
    std::vector<std::array<double, kNumAgents>> out;
    if (positions.size() < 2) return out;
    out.resize(positions.size() - 1);
    for (std::size_t t = 1; t < positions.size(); ++t)
        for (int i = 0; i < kNumAgents; ++i)
            out[t - 1][i] = norm(positions[t][i] - positions[t - 1][i]) / dt;
    return out;
}

}  // namespace fishsim
