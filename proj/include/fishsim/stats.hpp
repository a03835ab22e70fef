#pragma once

#include <string>
#include <vector>

namespace fishsim {

struct TrialSet {
    std::string method;
    std::vector<double> best_fitnesses;
};

struct MannWhitneyResult {
    double u = 0.0;        // min(U_a, U_b), ties counted half
    double p_value = 1.0;  // two-sided
    bool exact = false;    // exact enumeration vs normal approximation
};

/// Two-sided Mann-Whitney U test. Exact by enumeration when
/// n_a + n_b <= 12 and there are no ties, otherwise normal approximation
/// with tie and continuity corrections.
MannWhitneyResult mann_whitney_u(const std::vector<double>& a,
                                 const std::vector<double>& b);

struct Summary {
    double median = 0.0;
    double q1 = 0.0;
    double q3 = 0.0;
    double min = 0.0;
    double max = 0.0;
};

/// Order statistics with linear-interpolation quantiles.
Summary summarize(const TrialSet& trials);

/// True iff max(a) > max(b).
bool dominance_check(const TrialSet& a, const TrialSet& b);

}  // namespace fishsim
