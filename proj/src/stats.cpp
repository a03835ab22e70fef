#include "fishsim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace fishsim {

namespace {

double u_statistic(const std::vector<double>& a, const std::vector<double>& b) {
    double u_a = 0.0;
    for (double x : a) {
        for (double y : b) {
            if (x > y) u_a += 1.0;
            else if (x == y) u_a += 0.5;
        }
    }
    return u_a;
}

bool has_ties(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    return std::adjacent_find(values.begin(), values.end()) != values.end();
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

/// Exact two-sided p = P(min(U_a, U_b) <= u_obs) by enumerating all
/// assignments of the pooled sorted values to group a.
double exact_p(std::size_t n_a, std::size_t n_b, double u_obs) {
    const std::size_t n = n_a + n_b;
    std::vector<std::size_t> comb(n_a);
    std::iota(comb.begin(), comb.end(), 0);
    std::size_t total = 0, at_most = 0;
    while (true) {
        // U_a for this assignment: each a at sorted position p beats the
        // b values below it.
        double u_a = 0.0;
        for (std::size_t i = 0; i < n_a; ++i)
            u_a += static_cast<double>(comb[i] - i);
        const double u = std::min(u_a, static_cast<double>(n_a * n_b) - u_a);
        ++total;
        if (u <= u_obs + 1e-12) ++at_most;

        // next combination in lexicographic order
        std::size_t i = n_a;
        while (i > 0 && comb[i - 1] == n - n_a + i - 1) --i;
        if (i == 0) break;
        ++comb[i - 1];
        for (std::size_t j = i; j < n_a; ++j) comb[j] = comb[j - 1] + 1;
    }
    return static_cast<double>(at_most) / static_cast<double>(total);
}

}  // namespace

MannWhitneyResult mann_whitney_u(const std::vector<double>& a,
                                 const std::vector<double>& b) {
    if (a.empty() || b.empty()) {
        throw std::invalid_argument("mann_whitney_u: empty sample");
    }
    const std::size_t n_a = a.size(), n_b = b.size(), n = n_a + n_b;
    const double u_a = u_statistic(a, b);
    const double u = std::min(u_a, static_cast<double>(n_a * n_b) - u_a);

    std::vector<double> pooled(a);
    pooled.insert(pooled.end(), b.begin(), b.end());
    MannWhitneyResult result;
    result.u = u;
    if (n <= 12 && !has_ties(pooled)) {
        result.exact = true;
        result.p_value = exact_p(n_a, n_b, u);
        return result;
    }

    // Normal approximation with tie and continuity corrections.
    std::sort(pooled.begin(), pooled.end());
    double tie_term = 0.0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && pooled[j] == pooled[i]) ++j;
        const double t = static_cast<double>(j - i);
        tie_term += t * t * t - t;
        i = j;
    }
    const double mean = static_cast<double>(n_a * n_b) / 2.0;
    const double var = (static_cast<double>(n_a * n_b) / 12.0) *
                       (static_cast<double>(n + 1) -
                        tie_term / (static_cast<double>(n) * (n - 1)));
    if (var <= 0.0) {
        result.p_value = 1.0;
        return result;
    }
    const double z = (u - mean + 0.5) / std::sqrt(var);
    result.p_value = std::clamp(2.0 * normal_cdf(z), 0.0, 1.0);
    return result;
}

Summary summarize(const TrialSet& trials) {
    if (trials.best_fitnesses.empty()) {
        throw std::invalid_argument("summarize: empty trial set");
    }
    std::vector<double> v = trials.best_fitnesses;
    std::sort(v.begin(), v.end());
    auto quantile = [&v](double q) {
        const double pos = q * (v.size() - 1);
        const std::size_t lo = static_cast<std::size_t>(pos);
        const std::size_t hi = std::min(lo + 1, v.size() - 1);
        const double frac = pos - static_cast<double>(lo);
        return v[lo] + frac * (v[hi] - v[lo]);
    };
    return Summary{quantile(0.5), quantile(0.25), quantile(0.75), v.front(), v.back()};
}

bool dominance_check(const TrialSet& a, const TrialSet& b) {
    if (a.best_fitnesses.empty() || b.best_fitnesses.empty()) {
        throw std::invalid_argument("dominance_check: empty trial set");
    }
    return *std::max_element(a.best_fitnesses.begin(), a.best_fitnesses.end()) >
           *std::max_element(b.best_fitnesses.begin(), b.best_fitnesses.end());
}

}  // namespace fishsim
