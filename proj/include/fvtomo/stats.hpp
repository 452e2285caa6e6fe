#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fvtomo::stats {

inline double median(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("median: empty sample");
    std::vector<double> v(values.begin(), values.end());
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

struct RankSumResult {
    double u = 0.0;        // Mann-Whitney U of the first sample
    double p_value = 1.0;  // two-sided
    bool significant = false;
    bool exact = false;
};

/// Samples whose combined size is at most this use the exact permutation distribution.
inline constexpr std::size_t kExactRankSumLimit = 16;

namespace detail {

/// Midranks (1-based) of the pooled sample, doubled so they stay integral.
inline std::vector<long> doubled_midranks(std::span<const double> pooled) {
    const std::size_t n = pooled.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pooled[a] < pooled[b]; });
    std::vector<long> ranks(n);
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && pooled[order[j + 1]] == pooled[order[i]]) ++j;
        const long doubled = static_cast<long>(i + 1 + j + 1);  // 2 * mean of ranks i+1..j+1
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = doubled;
        i = j + 1;
    }
    return ranks;
}

/**
 * Two-sided exact p-value: share of all size-n1 subsets of the pooled ranks
 * whose rank sum is at least as far from its mean as the observed one.
 * Counts subsets per (size, doubled rank sum) by dynamic programming.
 */
inline double exact_p_value(const std::vector<long>& ranks, std::size_t n1, long observed_doubled) {
    const long total = std::accumulate(ranks.begin(), ranks.end(), 0L);
    std::vector<std::vector<double>> ways(n1 + 1, std::vector<double>(static_cast<std::size_t>(total) + 1, 0.0));
    ways[0][0] = 1.0;
    for (long r : ranks)
        for (std::size_t k = n1; k >= 1; --k)
            for (long s = total; s >= r; --s) ways[k][s] += ways[k - 1][s - r];

    const double n = static_cast<double>(ranks.size());
    const double mean_doubled = static_cast<double>(n1) * (n + 1.0);
    const double observed_dev = std::abs(static_cast<double>(observed_doubled) - mean_doubled);
    double extreme = 0.0, all = 0.0;
    for (long s = 0; s <= total; ++s) {
        const double w = ways[n1][s];
        if (w == 0.0) continue;
        all += w;
        if (std::abs(static_cast<double>(s) - mean_doubled) >= observed_dev - 1e-9) extreme += w;
    }
    return std::min(1.0, extreme / all);
}

}  // namespace detail

/**
 * Two-sided Wilcoxon rank-sum (Mann-Whitney U) test with midranks for ties.
 * Small samples use the exact permutation distribution; larger ones the
 * normal approximation with tie-corrected variance and continuity correction.
 */
inline RankSumResult ranksum_test(std::span<const double> a, std::span<const double> b, double alpha = 0.05) {
    if (a.empty() || b.empty()) throw std::invalid_argument("ranksum_test: empty sample");
    const std::size_t n1 = a.size(), n2 = b.size(), n = n1 + n2;

    std::vector<double> pooled(a.begin(), a.end());
    pooled.insert(pooled.end(), b.begin(), b.end());
    const auto ranks = detail::doubled_midranks(pooled);
    const long w_doubled = std::accumulate(ranks.begin(), ranks.begin() + static_cast<long>(n1), 0L);

    RankSumResult res;
    const double n1d = static_cast<double>(n1), n2d = static_cast<double>(n2), nd = static_cast<double>(n);
    res.u = static_cast<double>(w_doubled) / 2.0 - n1d * (n1d + 1.0) / 2.0;

    if (n <= kExactRankSumLimit) {
        res.exact = true;
        res.p_value = detail::exact_p_value(ranks, n1, w_doubled);
    } else {
        std::vector<double> sorted = pooled;
        std::sort(sorted.begin(), sorted.end());
        double tie_term = 0.0;
        for (std::size_t i = 0; i < n;) {
            std::size_t j = i;
            while (j < n && sorted[j] == sorted[i]) ++j;
            const double t = static_cast<double>(j - i);
            tie_term += t * t * t - t;
            i = j;
        }
        const double variance = n1d * n2d / 12.0 * ((nd + 1.0) - tie_term / (nd * (nd - 1.0)));
        if (variance <= 0.0) {
            res.p_value = 1.0;
        } else {
            const double dev = std::max(0.0, std::abs(res.u - n1d * n2d / 2.0) - 0.5);
            res.p_value = std::min(1.0, std::erfc(dev / std::sqrt(variance) / std::sqrt(2.0)));
        }
    }
    res.significant = res.p_value < alpha;
    return res;
}

/// Pairwise significant-win counts; diagonal entries are unused.
struct WinMatrix {
    std::vector<std::string> algorithms;
    std::vector<std::vector<int>> counts;

    int row_sum(std::size_t i) const {
        int s = 0;
        for (std::size_t j = 0; j < counts[i].size(); ++j)
            if (j != i) s += counts[i][j];
        return s;
    }
};

/// One metric's samples for every algorithm on one problem.
using ProblemSamples = std::map<std::string, std::vector<double>>;

/**
 * counts[i][j] is the number of problems where algorithm i's samples differ
 * significantly from j's and i has the lower median.
 */
inline WinMatrix win_matrix(const std::vector<std::string>& algorithms, const std::vector<ProblemSamples>& problems,
                            double alpha = 0.05) {
    WinMatrix m;
    m.algorithms = algorithms;
    m.counts.assign(algorithms.size(), std::vector<int>(algorithms.size(), 0));
    for (const auto& samples : problems) {
        std::vector<const std::vector<double>*> cols;
        for (const auto& alg : algorithms) {
            const auto it = samples.find(alg);
            if (it == samples.end() || it->second.empty())
                throw std::invalid_argument("win_matrix: missing sample for " + alg);
            cols.push_back(&it->second);
        }
        std::vector<double> medians;
        for (const auto* c : cols) medians.push_back(median(*c));
        for (std::size_t i = 0; i < algorithms.size(); ++i) {
            for (std::size_t j = i + 1; j < algorithms.size(); ++j) {
                if (!ranksum_test(*cols[i], *cols[j], alpha).significant) continue;
                if (medians[i] < medians[j])
                    ++m.counts[i][j];
                else if (medians[j] < medians[i])
                    ++m.counts[j][i];
            }
        }
    }
    return m;
}

}  // namespace fvtomo::stats
