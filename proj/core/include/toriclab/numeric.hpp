#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace toriclab {

// log(sum exp(x_i)) without overflow; empty input -> -inf.
inline double log_sum_exp(std::span<const double> xs) {
    if (xs.empty()) return -std::numeric_limits<double>::infinity();
    double m = *std::max_element(xs.begin(), xs.end());
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (double x : xs) s += std::exp(x - m);
    return m + std::log(s);
}

inline double log_sum_exp(double a, double b) {
    double m = std::max(a, b);
    if (!std::isfinite(m)) return m;
    return m + std::log(std::exp(a - m) + std::exp(b - m));
}

inline double ln_2cosh(double x) {
    double a = std::abs(x);
    return a + std::log1p(std::exp(-2.0 * a));
}

// log|2 sinh x| and its sign; x == 0 maps to (-inf, +1).
inline std::pair<double, double> ln_2sinh_signed(double x) {
    double a = std::abs(x);
    if (a < 1e-300) return {-std::numeric_limits<double>::infinity(), 1.0};
    return {a + std::log1p(-std::exp(-2.0 * a)), x > 0 ? 1.0 : -1.0};
}

struct MeanStderr {
    double mean = 0.0;
    double stderr_ = 0.0;
};

// Jackknife estimate for a statistic computed from per-block values.
template <typename F>
MeanStderr jackknife(const std::vector<std::vector<double>>& block_sums,
                     const std::vector<double>& block_counts, F&& statistic) {
    const std::size_t nb = block_counts.size();
    const std::size_t nq = block_sums.size();
    std::vector<double> tot(nq, 0.0);
    double totn = 0.0;
    for (std::size_t q = 0; q < nq; ++q)
        for (std::size_t b = 0; b < nb; ++b) tot[q] += block_sums[q][b];
    for (double c : block_counts) totn += c;
    std::vector<double> means(nq);
    for (std::size_t q = 0; q < nq; ++q) means[q] = tot[q] / totn;
    const double full = statistic(means);

    std::vector<double> loo(nb);
    std::vector<double> m(nq);
    for (std::size_t b = 0; b < nb; ++b) {
        for (std::size_t q = 0; q < nq; ++q)
            m[q] = (tot[q] - block_sums[q][b]) / (totn - block_counts[b]);
        loo[b] = statistic(m);
    }
    double jm = 0.0;
    for (double v : loo) jm += v;
    jm /= static_cast<double>(nb);
    double var = 0.0;
    for (double v : loo) var += (v - jm) * (v - jm);
    var *= static_cast<double>(nb - 1) / static_cast<double>(nb);
    return {full, std::sqrt(var)};
}

} // namespace toriclab
