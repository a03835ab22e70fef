#include "fishsim/evaluator.hpp"

#include <cmath>
#include <cstring>

namespace fishsim {

std::uint64_t derive_sim_seed(std::uint64_t master_seed, const Genome& genome) {
    std::uint64_t h = 1469598103934665603ull ^ master_seed;
    for (double g : genome) {
        std::uint64_t bits;
        std::memcpy(&bits, &g, sizeof(bits));
        for (int shift = 0; shift < 64; shift += 8) {
            h ^= (bits >> shift) & 0xff;
            h *= 1099511628211ull;
        }
    }
    return h;
}

Evaluation evaluate_genome(const Genome& genome, const EvaluationContext& ctx) {
    const MlpParams params = decode(genome);
    SimulationConfig sim = ctx.sim;
    sim.seed = derive_sim_seed(ctx.master_seed, genome);
    const Trajectory traj = simulate(params, sim, ctx.arena);
    const BehaviouralSignature sig = compute_signature(traj, ctx.metrics);
    const auto scores = feature_similarities(sig, ctx.control);
    Evaluation eval;
    eval.descriptor = scores;
    eval.fitness = std::pow(scores[0] * scores[1] * scores[2] * scores[3], 0.25);
    return eval;
}

}  // namespace fishsim
