#include "gpg/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace gpg {

std::vector<double> rank_row(const std::vector<double>& values, bool higher_is_better) {
    const size_t k = values.size();
    std::vector<size_t> order(k);
    std::iota(order.begin(), order.end(), size_t{0});
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        return higher_is_better ? values[a] > values[b] : values[a] < values[b];
    });
    std::vector<double> ranks(k, 0.0);
    size_t i = 0;
    while (i < k) {
        size_t j = i;
        while (j + 1 < k && values[order[j + 1]] == values[order[i]]) ++j;
        const double shared = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (size_t t = i; t <= j; ++t) ranks[order[t]] = shared;
        i = j + 1;
    }
    return ranks;
}

// Critical values of the studentized range statistic divided by sqrt(2),
// alpha = 0.05, for k = 2..20 compared methods.
double nemenyi_q_alpha05(int k) {
    static const double q[] = {1.960, 2.343, 2.569, 2.728, 2.850, 2.949, 3.031,
                               3.102, 3.164, 3.219, 3.268, 3.313, 3.354, 3.391,
                               3.426, 3.458, 3.489, 3.517, 3.544};
    if (k < 2 || k > 20) throw std::invalid_argument("nemenyi_q_alpha05: k must be in [2,20]");
    return q[k - 2];
}

namespace {

// regularized incomplete gamma (series for x < a+1, continued fraction above)
double gamma_p(double a, double x) {
    if (x <= 0.0) return 0.0;
    const double lg = std::lgamma(a);
    if (x < a + 1.0) {
        double term = 1.0 / a;
        double sum = term;
        double ap = a;
        for (int n = 0; n < 500; ++n) {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if (std::abs(term) < std::abs(sum) * 1e-15) break;
        }
        return sum * std::exp(-x + a * std::log(x) - lg);
    }
    // Lentz continued fraction for Q(a, x)
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int n = 1; n < 500; ++n) {
        const double an = -static_cast<double>(n) * (static_cast<double>(n) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-15) break;
    }
    const double q = std::exp(-x + a * std::log(x) - lg) * h;
    return 1.0 - q;
}

} // namespace

double chi_square_sf(double x, int dof) {
    if (x <= 0.0) return 1.0;
    return 1.0 - gamma_p(static_cast<double>(dof) / 2.0, x / 2.0);
}

FriedmanResult friedman_nemenyi(const std::vector<std::vector<double>>& metric_table,
                                bool higher_is_better) {
    const size_t n = metric_table.size();
    if (n < 2) throw std::invalid_argument("friedman_nemenyi: need at least 2 problems");
    const size_t k = metric_table.front().size();
    if (k < 2) throw std::invalid_argument("friedman_nemenyi: need at least 2 configurations");
    for (const auto& row : metric_table)
        if (row.size() != k) throw std::invalid_argument("friedman_nemenyi: ragged table");

    FriedmanResult res;
    res.mean_ranks.assign(k, 0.0);
    for (const auto& row : metric_table) {
        const auto ranks = rank_row(row, higher_is_better);
        for (size_t j = 0; j < k; ++j) res.mean_ranks[j] += ranks[j];
    }
    for (auto& r : res.mean_ranks) r /= static_cast<double>(n);

    const double kd = static_cast<double>(k);
    const double nd = static_cast<double>(n);
    double sum_sq = 0.0;
    for (double r : res.mean_ranks) sum_sq += r * r;
    res.chi2 = 12.0 * nd / (kd * (kd + 1.0)) * (sum_sq - kd * (kd + 1.0) * (kd + 1.0) / 4.0);
    if (res.chi2 < 0.0) res.chi2 = 0.0; // guard numeric dust at full ties
    res.p_approx = chi_square_sf(res.chi2, static_cast<int>(k) - 1);
    res.critical_distance =
        nemenyi_q_alpha05(static_cast<int>(k)) * std::sqrt(kd * (kd + 1.0) / (6.0 * nd));
    return res;
}

double median_lower(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("median_lower: empty input");
    std::sort(values.begin(), values.end());
    return values[(values.size() - 1) / 2];
}

MeanCi mean_with_ci95(const std::vector<double>& values) {
    MeanCi out;
    if (values.empty()) return out;
    const double n = static_cast<double>(values.size());
    for (double v : values) out.mean += v;
    out.mean /= n;
    if (values.size() < 2) return out;
    double var = 0.0;
    for (double v : values) var += (v - out.mean) * (v - out.mean);
    var /= (n - 1.0);
    out.ci_half_width = 1.96 * std::sqrt(var / n);
    return out;
}

} // namespace gpg
