#include "dca/stats.hpp"

#include "dca/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

namespace dca::stats {

namespace {

// Sum over tie groups of t^3 - t.
double tie_term(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    double sum = 0.0;
    for (std::size_t i = 0; i < values.size();) {
        std::size_t j = i;
        while (j < values.size() && values[j] == values[i]) ++j;
        const double t = static_cast<double>(j - i);
        sum += t * t * t - t;
        i = j;
    }
    return sum;
}

double normal_two_sided(double deviation, double variance) {
    if (variance <= 0.0) return 1.0;
    const double z = std::max(0.0, std::abs(deviation) - 0.5) / std::sqrt(variance);
    return std::min(1.0, std::erfc(z / std::sqrt(2.0)));
}

std::int64_t doubled(double rank) { return std::llround(2.0 * rank); }

} // namespace

std::vector<double> midranks(std::span<const double> values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(values.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j < order.size() && values[order[j]] == values[order[i]]) ++j;
        const double r = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t k = i; k < j; ++k) ranks[order[k]] = r;
        i = j;
    }
    return ranks;
}

TestResult mann_whitney_u(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw PreconditionError("mann_whitney_u: both samples must be non-empty");
    const std::size_t na = a.size(), nb = b.size(), n = na + nb;

    std::vector<double> pooled(a.begin(), a.end());
    pooled.insert(pooled.end(), b.begin(), b.end());
    const auto ranks = midranks(pooled);

    double rank_sum_a = 0.0;
    for (std::size_t i = 0; i < na; ++i) rank_sum_a += ranks[i];

    TestResult res;
    res.statistic = rank_sum_a - static_cast<double>(na * (na + 1)) / 2.0;
    const double mean_u = static_cast<double>(na * nb) / 2.0;

    if (n <= kMannWhitneyExactMax) {
        // ways[k][s]: subsets of size k whose doubled rank sum is s.
        std::vector<std::int64_t> r2(n);
        std::int64_t total = 0;
        for (std::size_t i = 0; i < n; ++i) total += r2[i] = doubled(ranks[i]);
        std::vector<std::vector<double>> ways(na + 1, std::vector<double>(static_cast<std::size_t>(total) + 1, 0.0));
        ways[0][0] = 1.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = std::min(i + 1, na); k >= 1; --k)
                for (std::int64_t s = total; s >= r2[i]; --s)
                    ways[k][static_cast<std::size_t>(s)] += ways[k - 1][static_cast<std::size_t>(s - r2[i])];

        const std::int64_t centre = static_cast<std::int64_t>(na * (n + 1));  // doubled mean rank sum
        const std::int64_t obs = std::abs(doubled(rank_sum_a) - centre);
        double hit = 0.0, all = 0.0;
        for (std::int64_t s = 0; s <= total; ++s) {
            const double w = ways[na][static_cast<std::size_t>(s)];
            all += w;
            if (std::abs(s - centre) >= obs) hit += w;
        }
        res.p_value = std::min(1.0, hit / all);
        res.exact = true;
        return res;
    }

    const double nn = static_cast<double>(n);
    const double var = static_cast<double>(na * nb) / 12.0 * ((nn + 1.0) - tie_term(pooled) / (nn * (nn - 1.0)));
    res.p_value = normal_two_sided(res.statistic - mean_u, var);
    res.exact = false;
    return res;
}

TestResult wilcoxon_signed_rank(std::span<const double> diffs) {
    if (diffs.empty()) throw PreconditionError("wilcoxon_signed_rank: no differences");
    std::vector<double> nonzero, mags;
    for (double d : diffs)
        if (d != 0.0) {
            nonzero.push_back(d);
            mags.push_back(std::abs(d));
        }
    TestResult res;
    if (nonzero.empty()) return res;  // W = 0, p = 1

    const std::size_t n = nonzero.size();
    const auto ranks = midranks(mags);
    double w_plus = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        if (nonzero[i] > 0) w_plus += ranks[i];
    res.statistic = w_plus;

    if (n <= kWilcoxonExactMax) {
        std::vector<std::int64_t> r2(n);
        std::int64_t total = 0;
        for (std::size_t i = 0; i < n; ++i) total += r2[i] = doubled(ranks[i]);
        // ways[s]: sign patterns whose doubled positive-rank sum is s.
        std::vector<double> ways(static_cast<std::size_t>(total) + 1, 0.0);
        ways[0] = 1.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::int64_t s = total; s >= r2[i]; --s)
                ways[static_cast<std::size_t>(s)] += ways[static_cast<std::size_t>(s - r2[i])];
        // Compare |2s - total| to stay in integers.
        const std::int64_t obs = std::abs(2 * doubled(w_plus) - total);
        double hit = 0.0;
        for (std::int64_t s = 0; s <= total; ++s)
            if (std::abs(2 * s - total) >= obs) hit += ways[static_cast<std::size_t>(s)];
        res.p_value = std::min(1.0, hit / std::ldexp(1.0, static_cast<int>(n)));
        res.exact = true;
        return res;
    }

    const double nn = static_cast<double>(n);
    const double mean = nn * (nn + 1.0) / 4.0;
    const double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0 - tie_term(mags) / 48.0;
    res.p_value = normal_two_sided(w_plus - mean, var);
    res.exact = false;
    return res;
}

TestResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw PreconditionError("wilcoxon_signed_rank: paired samples differ in size");
    std::vector<double> d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
    return wilcoxon_signed_rank(d);
}

} // namespace dca::stats
