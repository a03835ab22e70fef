#include "fishsim/cmaes.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

#include "fishsim/parallel.hpp"

namespace fishsim {

CmaState::CmaState(int dim, double sigma0, std::uint64_t seed,
                   const std::vector<double>& mean0)
    : dim_(dim),
      sigma_(sigma0),
      mean_(Eigen::VectorXd::Zero(dim)),
      cov_(Eigen::MatrixXd::Identity(dim, dim)),
      path_sigma_(Eigen::VectorXd::Zero(dim)),
      path_cov_(Eigen::VectorXd::Zero(dim)),
      eigen_basis_(Eigen::MatrixXd::Identity(dim, dim)),
      eigen_scales_(Eigen::VectorXd::Ones(dim)),
      eigen_fresh_(true),
      rng_(seed) {
    if (dim < 1) throw std::invalid_argument("CmaState: dim must be >= 1");
    if (!(sigma0 > 0.0)) throw std::invalid_argument("CmaState: sigma0 must be > 0");
    if (!mean0.empty()) {
        if (static_cast<int>(mean0.size()) != dim) {
            throw std::invalid_argument("CmaState: mean0 dimension mismatch");
        }
        for (int i = 0; i < dim; ++i) mean_[i] = mean0[i];
    }
}

void CmaState::refresh_eigensystem() {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov_);
    if (solver.info() != Eigen::Success) {
        throw NumericalFailure("CmaState: covariance eigendecomposition failed");
    }
    eigen_basis_ = solver.eigenvectors();
    eigen_scales_ = solver.eigenvalues().cwiseMax(1e-14).cwiseSqrt();
    eigen_fresh_ = true;
}

std::vector<std::vector<double>> CmaState::ask(int lambda) {
    if (lambda < 1) throw std::invalid_argument("ask: lambda must be >= 1");
    if (!eigen_fresh_) refresh_eigensystem();
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<std::vector<double>> genomes(lambda);
    Eigen::VectorXd z(dim_);
    for (int i = 0; i < lambda; ++i) {
        for (int d = 0; d < dim_; ++d) z[d] = gauss(rng_) * eigen_scales_[d];
        const Eigen::VectorXd x = mean_ + sigma_ * (eigen_basis_ * z);
        genomes[i].assign(x.data(), x.data() + dim_);
    }
    return genomes;
}

void CmaState::tell(const std::vector<std::vector<double>>& genomes,
                    const std::vector<double>& fitnesses) {
    const int lambda = static_cast<int>(genomes.size());
    if (genomes.size() != fitnesses.size() || lambda < 2) {
        throw std::invalid_argument("tell: genomes/fitnesses length mismatch");
    }
    const int n = dim_;
    const int mu = lambda / 2;

    std::vector<int> order(lambda);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return fitnesses[a] > fitnesses[b];  // maximization
    });

    std::vector<double> weights(mu);
    double wsum = 0.0;
    for (int i = 0; i < mu; ++i) {
        weights[i] = std::log(mu + 0.5) - std::log(i + 1.0);
        wsum += weights[i];
    }
    double w2 = 0.0;
    for (double& w : weights) {
        w /= wsum;
        w2 += w * w;
    }
    const double mu_eff = 1.0 / w2;

    const double c_sigma = (mu_eff + 2.0) / (n + mu_eff + 5.0);
    const double d_sigma =
        1.0 + 2.0 * std::max(0.0, std::sqrt((mu_eff - 1.0) / (n + 1.0)) - 1.0) + c_sigma;
    const double c_c = (4.0 + mu_eff / n) / (n + 4.0 + 2.0 * mu_eff / n);
    const double c_1 = 2.0 / ((n + 1.3) * (n + 1.3) + mu_eff);
    const double c_mu =
        std::min(1.0 - c_1, 2.0 * (mu_eff - 2.0 + 1.0 / mu_eff) /
                                ((n + 2.0) * (n + 2.0) + mu_eff));
    const double chi_n =
        std::sqrt(static_cast<double>(n)) *
        (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * static_cast<double>(n) * n));

    std::vector<Eigen::VectorXd> y(mu);
    Eigen::VectorXd y_w = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < mu; ++i) {
        const auto& g = genomes[order[i]];
        if (static_cast<int>(g.size()) != n) {
            throw std::invalid_argument("tell: genome dimension mismatch");
        }
        y[i] = (Eigen::Map<const Eigen::VectorXd>(g.data(), n) - mean_) / sigma_;
        y_w += weights[i] * y[i];
    }

    mean_ += sigma_ * y_w;

    if (!eigen_fresh_) refresh_eigensystem();
    const Eigen::VectorXd cov_inv_sqrt_yw =
        eigen_basis_ *
        (eigen_scales_.cwiseInverse().asDiagonal() * (eigen_basis_.transpose() * y_w));
    path_sigma_ = (1.0 - c_sigma) * path_sigma_ +
                  std::sqrt(c_sigma * (2.0 - c_sigma) * mu_eff) * cov_inv_sqrt_yw;

    const double ps_norm = path_sigma_.norm();
    const double denom =
        std::sqrt(1.0 - std::pow(1.0 - c_sigma, 2.0 * (generation_ + 1)));
    const bool h_sigma = ps_norm / denom / chi_n < 1.4 + 2.0 / (n + 1.0);

    path_cov_ = (1.0 - c_c) * path_cov_;
    if (h_sigma) path_cov_ += std::sqrt(c_c * (2.0 - c_c) * mu_eff) * y_w;
    const double delta_h = h_sigma ? 0.0 : c_c * (2.0 - c_c);

    Eigen::MatrixXd rank_mu = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < mu; ++i) rank_mu += weights[i] * (y[i] * y[i].transpose());

    cov_ = (1.0 - c_1 - c_mu) * cov_ +
           c_1 * (path_cov_ * path_cov_.transpose() + delta_h * cov_) + c_mu * rank_mu;
    cov_ = 0.5 * (cov_ + cov_.transpose().eval());

    sigma_ *= std::exp((c_sigma / d_sigma) * (ps_norm / chi_n - 1.0));
    if (!std::isfinite(sigma_) || sigma_ <= 0.0) {
        throw NumericalFailure("CmaState: step size diverged");
    }

    eigen_fresh_ = false;
    ++generation_;
}

namespace {

void write_values(std::ostream& os, const double* data, std::size_t n) {
    char buf[32];
    for (std::size_t i = 0; i < n; ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g", data[i]);
        os << buf << (i + 1 == n ? '\n' : ' ');
    }
}

void read_values(std::istream& is, double* data, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        if (!(is >> data[i])) throw std::runtime_error("CmaState: truncated checkpoint");
    }
}

}  // namespace

void CmaState::save(std::ostream& os) const {
    os << "cma-checkpoint 1\n" << dim_ << ' ' << generation_ << '\n';
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", sigma_);
    os << buf << '\n';
    write_values(os, mean_.data(), dim_);
    write_values(os, path_sigma_.data(), dim_);
    write_values(os, path_cov_.data(), dim_);
    write_values(os, cov_.data(), static_cast<std::size_t>(dim_) * dim_);
    os << rng_ << '\n';
}

CmaState CmaState::load(std::istream& is) {
    std::string tag;
    int version = 0;
    if (!(is >> tag >> version) || tag != "cma-checkpoint" || version != 1) {
        throw std::runtime_error("CmaState: bad checkpoint header");
    }
    int dim = 0, generation = 0;
    double sigma = 0.0;
    if (!(is >> dim >> generation >> sigma)) {
        throw std::runtime_error("CmaState: bad checkpoint body");
    }
    CmaState s(dim, sigma, 0);
    s.generation_ = generation;
    read_values(is, s.mean_.data(), dim);
    read_values(is, s.path_sigma_.data(), dim);
    read_values(is, s.path_cov_.data(), dim);
    read_values(is, s.cov_.data(), static_cast<std::size_t>(dim) * dim);
    if (!(is >> s.rng_)) throw std::runtime_error("CmaState: bad rng state");
    s.eigen_fresh_ = false;
    return s;
}

CmaResult run_cmaes(const CmaConfig& config, const ScalarEvalFn& eval_fn,
                    const std::function<void(const GenerationRecord&)>& on_gen) {
    CmaState state(config.dim, config.sigma0, config.seed);
    CmaResult result;
    result.best_fitness = -std::numeric_limits<double>::infinity();
    std::uint64_t evals = 0;

    for (int gen = 0; gen < config.generations; ++gen) {
        const auto genomes = state.ask(config.lambda);
        std::vector<double> fitnesses(genomes.size());
        std::vector<std::string> errors(genomes.size());
        parallel_for(genomes.size(), config.workers, [&](std::size_t i) {
            try {
                fitnesses[i] = eval_fn(genomes[i]);
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        });
        for (std::size_t i = 0; i < errors.size(); ++i) {
            if (!errors[i].empty()) {
                throw std::runtime_error("run_cmaes: evaluation failed at generation " +
                                         std::to_string(gen) + ", candidate " +
                                         std::to_string(i) + ": " + errors[i]);
            }
        }
        evals += genomes.size();

        for (std::size_t i = 0; i < genomes.size(); ++i) {
            if (fitnesses[i] > result.best_fitness) {
                result.best_fitness = fitnesses[i];
                result.best_genome = genomes[i];
            }
        }
        std::vector<double> sorted = fitnesses;
        std::sort(sorted.begin(), sorted.end());
        const std::size_t m = sorted.size();
        const double median = (m % 2 == 1)
                                  ? sorted[m / 2]
                                  : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);

        state.tell(genomes, fitnesses);

        GenerationRecord rec{gen + 1, evals, result.best_fitness, median, state.sigma()};
        result.history.push_back(rec);
        if (on_gen) on_gen(rec);
    }
    return result;
}

}  // namespace fishsim
