#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <vector>

#include "fishsim/controller.hpp"

namespace fishsim {

/// Behaviour descriptor: the four per-feature similarity scores vs control.
using Descriptor = std::array<double, 4>;

using Centroids = std::vector<Descriptor>;

struct Elite {
    Genome genome;
    double fitness = 0.0;
    Descriptor descriptor{};
};

struct Archive {
    Centroids centroids;
    std::vector<std::optional<Elite>> niches;
    std::uint64_t evaluations = 0;
    std::uint64_t insertions = 0;
    std::uint64_t rejections = 0;

    explicit Archive(Centroids c) : centroids(std::move(c)), niches(centroids.size()) {}

    std::size_t filled_count() const;
    double best_fitness() const;  // -inf when empty
    double qd_score() const;      // sum of elite fitnesses
};

struct QdConfig {
    int init_evals = 6000;
    int batches = 450;
    int batch_size = 120;
    int k = 32;
    int cvt_samples = 100000;
    double mutation_sigma = 0.2;
    double mutation_rate = 0.1;
    std::uint64_t cvt_seed = 1;
    std::uint64_t seed = 0;
    int workers = 1;

    int total_budget() const { return init_evals + batches * batch_size; }
};

struct BatchRecord {
    int batch = 0;  // 0 = initial batch
    std::uint64_t evals = 0;
    std::size_t filled = 0;
    double best_fitness = 0.0;
    double qd_score = 0.0;
};

/// k-means++ seeding followed by Lloyd iterations (max 200 or relative
/// inertia change < 1e-6).
Centroids kmeans(const std::vector<Descriptor>& samples, int k, std::uint64_t seed);

/// k-means over n_samples uniform samples in [0,1]^4.
Centroids build_cvt(int k, int n_samples, std::uint64_t seed);

std::size_t assign_niche(const Descriptor& descriptor, const Centroids& centroids);

bool try_insert(Archive& archive, const Genome& genome, double fitness,
                const Descriptor& descriptor);

const Genome& select_parent(const Archive& archive, std::mt19937_64& rng);

Genome mutate(const Genome& genome, std::mt19937_64& rng, double sigma, double rate);

using EvalFn = std::function<std::pair<double, Descriptor>(const Genome&)>;
using BatchCallback = std::function<void(const BatchRecord&, const Archive&)>;

Archive run_qd(const QdConfig& config, const EvalFn& eval_fn,
               const BatchCallback& on_batch = nullptr);

}  // namespace fishsim
