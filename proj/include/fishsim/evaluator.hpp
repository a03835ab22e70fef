#pragma once

#include <cstdint>

#include "fishsim/config.hpp"
#include "fishsim/controller.hpp"
#include "fishsim/metrics.hpp"
#include "fishsim/qd.hpp"

namespace fishsim {

/// Per-genome simulation seed: master seed mixed with an FNV-1a hash of the
/// genome bytes, so every genome gets one fixed, reproducible simulation.
std::uint64_t derive_sim_seed(std::uint64_t master_seed, const Genome& genome);

struct EvaluationContext {
    SimulationConfig sim;
    Arena arena;
    MetricsConfig metrics;
    BehaviouralSignature control;
    std::uint64_t master_seed = 0;
};

struct Evaluation {
    double fitness = 0.0;
    Descriptor descriptor{};  // (I_D, I_L, I_P, I_E)
};

Evaluation evaluate_genome(const Genome& genome, const EvaluationContext& ctx);

}  // namespace fishsim
