#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include "fishsim/sim.hpp"

namespace fishsim {

inline constexpr int kInputs = 20;
inline constexpr int kHidden = 10;
inline constexpr int kOutputs = 2;
inline constexpr int kGenomeLength =
    (kInputs + 1) * kHidden + (kHidden + 1) * kOutputs;  // 232

using Genome = std::vector<double>;

struct TopologyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Decoded MLP: 20 inputs, 10 tanh hidden units, 2 tanh outputs.
class MlpParams {
  public:
    std::array<std::array<double, kInputs>, kHidden> hidden_weights{};
    std::array<double, kHidden> hidden_biases{};
    std::array<std::array<double, kHidden>, kOutputs> output_weights{};
    std::array<double, kOutputs> output_biases{};

    Action forward(const PerceptionVector& input) const;
};

/// Genome layout: 200 hidden weights (unit-major), 10 hidden biases,
/// 20 output weights (unit-major), 2 output biases.
MlpParams decode(const Genome& genome);
Genome encode(const MlpParams& params);

}  // namespace fishsim
