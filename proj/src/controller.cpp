#include "fishsim/controller.hpp"

#include <cmath>

namespace fishsim {

MlpParams decode(const Genome& genome) {
    if (genome.size() != static_cast<std::size_t>(kGenomeLength)) {
        throw TopologyError("genome length mismatch: expected " +
                            std::to_string(kGenomeLength) + ", got " +
                            std::to_string(genome.size()));
    }
    MlpParams p;
    std::size_t k = 0;
    for (int h = 0; h < kHidden; ++h)
        for (int i = 0; i < kInputs; ++i) p.hidden_weights[h][i] = genome[k++];
    for (int h = 0; h < kHidden; ++h) p.hidden_biases[h] = genome[k++];
    for (int o = 0; o < kOutputs; ++o)
        for (int h = 0; h < kHidden; ++h) p.output_weights[o][h] = genome[k++];
    for (int o = 0; o < kOutputs; ++o) p.output_biases[o] = genome[k++];
    return p;
}

Genome encode(const MlpParams& p) {
    Genome g;
    g.reserve(kGenomeLength);
    for (int h = 0; h < kHidden; ++h)
        for (int i = 0; i < kInputs; ++i) g.push_back(p.hidden_weights[h][i]);
    for (int h = 0; h < kHidden; ++h) g.push_back(p.hidden_biases[h]);
    for (int o = 0; o < kOutputs; ++o)
        for (int h = 0; h < kHidden; ++h) g.push_back(p.output_weights[o][h]);
    for (int o = 0; o < kOutputs; ++o) g.push_back(p.output_biases[o]);
    return g;
}

Action MlpParams::forward(const PerceptionVector& input) const {
    std::array<double, kHidden> hidden;
    for (int h = 0; h < kHidden; ++h) {
        double acc = hidden_biases[h];
        for (int i = 0; i < kInputs; ++i) acc += hidden_weights[h][i] * input[i];
        hidden[h] = std::tanh(acc);
    }
    std::array<double, kOutputs> out;
    for (int o = 0; o < kOutputs; ++o) {
        double acc = output_biases[o];
        for (int h = 0; h < kHidden; ++h) acc += output_weights[o][h] * hidden[h];
        out[o] = std::tanh(acc);
    }
    return Action{out[0], out[1]};
}

}  // namespace fishsim
