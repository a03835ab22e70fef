#include "fishsim/qd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "fishsim/parallel.hpp"

namespace fishsim {

namespace {

constexpr std::size_t kDescriptorDim = std::tuple_size<Descriptor>::value;

double squared_distance(const Descriptor& a, const Descriptor& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < kDescriptorDim; ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

}  // namespace

std::size_t Archive::filled_count() const {
    std::size_t n = 0;
    for (const auto& e : niches)
        if (e) ++n;
    return n;
}

double Archive::best_fitness() const {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& e : niches)
        if (e) best = std::max(best, e->fitness);
    return best;
}

double Archive::qd_score() const {
    double total = 0.0;
    for (const auto& e : niches)
        if (e) total += e->fitness;
    return total;
}

Centroids kmeans(const std::vector<Descriptor>& samples, int k, std::uint64_t seed) {
    if (k < 1) throw std::invalid_argument("kmeans: k must be >= 1");
    if (samples.size() < static_cast<std::size_t>(k)) {
        throw std::invalid_argument("kmeans: k > n_samples");
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    // k-means++ seeding
    Centroids centroids;
    centroids.reserve(k);
    std::uniform_int_distribution<std::size_t> pick(0, samples.size() - 1);
    centroids.push_back(samples[pick(rng)]);
    std::vector<double> d2(samples.size());
    for (int c = 1; c < k; ++c) {
        double total = 0.0;
        for (std::size_t i = 0; i < samples.size(); ++i) {
            double best = squared_distance(samples[i], centroids[0]);
            for (std::size_t j = 1; j < centroids.size(); ++j)
                best = std::min(best, squared_distance(samples[i], centroids[j]));
            d2[i] = best;
            total += best;
        }
        double target = unit(rng) * total;
        std::size_t chosen = samples.size() - 1;
        double acc = 0.0;
        for (std::size_t i = 0; i < samples.size(); ++i) {
            acc += d2[i];
            if (acc >= target) {
                chosen = i;
                break;
            }
        }
        centroids.push_back(samples[chosen]);
    }

    // Lloyd iterations
    std::vector<std::size_t> assignment(samples.size());
    double prev_inertia = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < 200; ++iter) {
        double inertia = 0.0;
        for (std::size_t i = 0; i < samples.size(); ++i) {
            std::size_t best = 0;
            double best_d = squared_distance(samples[i], centroids[0]);
            for (std::size_t j = 1; j < centroids.size(); ++j) {
                const double d = squared_distance(samples[i], centroids[j]);
                if (d < best_d) {
                    best_d = d;
                    best = j;
                }
            }
            assignment[i] = best;
            inertia += best_d;
        }
        std::vector<Descriptor> sums(k, Descriptor{});
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t i = 0; i < samples.size(); ++i) {
            for (std::size_t d = 0; d < kDescriptorDim; ++d)
                sums[assignment[i]][d] += samples[i][d];
            ++counts[assignment[i]];
        }
        for (int j = 0; j < k; ++j) {
            if (counts[j] == 0) continue;  // keep previous centroid
            for (std::size_t d = 0; d < kDescriptorDim; ++d)
                centroids[j][d] = sums[j][d] / counts[j];
        }
        if (std::isfinite(prev_inertia) &&
            std::abs(prev_inertia - inertia) <= 1e-6 * prev_inertia) {
            break;
        }
        prev_inertia = inertia;
    }
    return centroids;
}

Centroids build_cvt(int k, int n_samples, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    if (n_samples < k) throw std::invalid_argument("build_cvt: k > n_samples");
    std::vector<Descriptor> samples(n_samples);
    for (auto& s : samples)
        for (auto& v : s) v = unit(rng);
    // Reuse the same stream for seeding so centroids stay a pure function
    // of (k, n_samples, seed).
    std::uniform_int_distribution<std::uint64_t> derive;
    return kmeans(samples, k, derive(rng));
}

std::size_t assign_niche(const Descriptor& descriptor, const Centroids& centroids) {
    std::size_t best = 0;
    double best_d = squared_distance(descriptor, centroids[0]);
    for (std::size_t j = 1; j < centroids.size(); ++j) {
        const double d = squared_distance(descriptor, centroids[j]);
        if (d < best_d) {  // ties keep the lowest index
            best_d = d;
            best = j;
        }
    }
    return best;
}

bool try_insert(Archive& archive, const Genome& genome, double fitness,
                const Descriptor& descriptor) {
    if (!std::isfinite(fitness)) {
        throw std::invalid_argument("try_insert: non-finite fitness");
    }
    ++archive.evaluations;
    const std::size_t niche = assign_niche(descriptor, archive.centroids);
    auto& slot = archive.niches[niche];
    if (!slot || fitness > slot->fitness) {
        slot = Elite{genome, fitness, descriptor};
        ++archive.insertions;
        return true;
    }
    ++archive.rejections;
    return false;
}

const Genome& select_parent(const Archive& archive, std::mt19937_64& rng) {
    std::vector<std::size_t> filled;
    filled.reserve(archive.niches.size());
    for (std::size_t i = 0; i < archive.niches.size(); ++i)
        if (archive.niches[i]) filled.push_back(i);
    if (filled.empty()) throw std::runtime_error("select_parent: empty archive");
    std::uniform_int_distribution<std::size_t> pick(0, filled.size() - 1);
    return archive.niches[filled[pick(rng)]]->genome;
}

Genome mutate(const Genome& genome, std::mt19937_64& rng, double sigma, double rate) {
    Genome child = genome;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> noise(0.0, sigma);
    bool any = false;
    for (double& g : child) {
        if (unit(rng) < rate) {
            g += noise(rng);
            any = true;
        }
    }
    if (!any && !child.empty()) {
        std::uniform_int_distribution<std::size_t> pick(0, child.size() - 1);
        child[pick(rng)] += noise(rng);
    }
    return child;
}

Archive run_qd(const QdConfig& config, const EvalFn& eval_fn,
               const BatchCallback& on_batch) {
    Archive archive(build_cvt(config.k, config.cvt_samples, config.cvt_seed));
    std::mt19937_64 rng(config.seed);
    std::normal_distribution<double> init_gene(0.0, 1.0);

    auto evaluate_and_insert = [&](std::vector<Genome>& candidates, int batch) {
        std::vector<std::pair<double, Descriptor>> results(candidates.size());
        std::vector<std::string> errors(candidates.size());
        parallel_for(candidates.size(), config.workers, [&](std::size_t i) {
            try {
                results[i] = eval_fn(candidates[i]);
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        });
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            if (!errors[i].empty()) {
                throw std::runtime_error("run_qd: evaluation failed at batch " +
                                         std::to_string(batch) + ", candidate " +
                                         std::to_string(i) + ": " + errors[i]);
            }
        }
        // Insertion stays in candidate order so runs are seed-reproducible
        // regardless of worker count.
        for (std::size_t i = 0; i < candidates.size(); ++i)
            try_insert(archive, candidates[i], results[i].first, results[i].second);
        if (on_batch) {
            on_batch(BatchRecord{batch, archive.evaluations, archive.filled_count(),
                                 archive.best_fitness(), archive.qd_score()},
                     archive);
        }
    };

    std::vector<Genome> initial(config.init_evals);
    for (auto& g : initial) {
        g.resize(kGenomeLength);
        for (double& v : g) v = init_gene(rng);
    }
    evaluate_and_insert(initial, 0);

    for (int batch = 1; batch <= config.batches; ++batch) {
        std::vector<Genome> offspring;
        offspring.reserve(config.batch_size);
        for (int i = 0; i < config.batch_size; ++i) {
            const Genome& parent = select_parent(archive, rng);
            offspring.push_back(
                mutate(parent, rng, config.mutation_sigma, config.mutation_rate));
        }
        evaluate_and_insert(offspring, batch);
    }
    return archive;
}

}  // namespace fishsim
