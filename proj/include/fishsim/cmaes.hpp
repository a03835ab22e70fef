#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace fishsim {

struct NumericalFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Rank-mu CMA-ES state (Hansen's reference formulation), maximizing.
class CmaState {
  public:
    CmaState(int dim, double sigma0, std::uint64_t seed,
             const std::vector<double>& mean0 = {});

    /// Samples lambda candidates from N(mean, sigma^2 C).
    std::vector<std::vector<double>> ask(int lambda);

    /// Rank-based update; fitnesses are maximized.
    void tell(const std::vector<std::vector<double>>& genomes,
              const std::vector<double>& fitnesses);

    int dim() const { return dim_; }
    int generation() const { return generation_; }
    double sigma() const { return sigma_; }
    const Eigen::VectorXd& mean() const { return mean_; }
    const Eigen::MatrixXd& covariance() const { return cov_; }

    void save(std::ostream& os) const;
    static CmaState load(std::istream& is);

  private:
    void refresh_eigensystem();

    int dim_;
    int generation_ = 0;
    double sigma_;
    Eigen::VectorXd mean_;
    Eigen::MatrixXd cov_;
    Eigen::VectorXd path_sigma_;
    Eigen::VectorXd path_cov_;
    Eigen::MatrixXd eigen_basis_;   // B
    Eigen::VectorXd eigen_scales_;  // sqrt of eigenvalues (D)
    bool eigen_fresh_ = false;
    std::mt19937_64 rng_;
};

struct CmaConfig {
    int dim = 232;
    int lambda = 120;
    int generations = 500;
    double sigma0 = 0.5;
    std::uint64_t seed = 0;
    int workers = 1;
    int total_budget() const { return lambda * generations; }
};

struct GenerationRecord {
    int generation = 0;
    std::uint64_t evals = 0;
    double best = 0.0;
    double median = 0.0;
    double sigma = 0.0;
};

struct CmaResult {
    std::vector<double> best_genome;
    double best_fitness = 0.0;
    std::vector<GenerationRecord> history;
};

using ScalarEvalFn = std::function<double(const std::vector<double>&)>;

CmaResult run_cmaes(const CmaConfig& config, const ScalarEvalFn& eval_fn,
                    const std::function<void(const GenerationRecord&)>& on_gen = nullptr);

}  // namespace fishsim
