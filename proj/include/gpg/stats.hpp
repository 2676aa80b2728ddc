#pragma once

#include <vector>

namespace gpg {

// Average ranks for one problem row; rank 1 is the best value. With
// higher_is_better the largest value ranks first. Ties share the mean rank.
std::vector<double> rank_row(const std::vector<double>& values, bool higher_is_better);

struct FriedmanResult {
    double chi2 = 0.0;
    double p_approx = 1.0; // chi-square approximation, k-1 dof
    std::vector<double> mean_ranks;
    double critical_distance = 0.0; // Nemenyi, alpha = 0.05
};

// metric_table: one row per problem, one column per configuration. Needs at
// least 2 configurations and 2 problems.
FriedmanResult friedman_nemenyi(const std::vector<std::vector<double>>& metric_table,
                                bool higher_is_better);

// studentized-range-based q for the Nemenyi test at alpha = 0.05, k in [2,20]
double nemenyi_q_alpha05(int k);

// upper tail of the chi-square distribution
double chi_square_sf(double x, int dof);

// lower median (deterministic for even counts)
double median_lower(std::vector<double> values);

struct MeanCi {
    double mean = 0.0;
    double ci_half_width = 0.0; // 95%, normal approximation
};
MeanCi mean_with_ci95(const std::vector<double>& values);

} // namespace gpg
