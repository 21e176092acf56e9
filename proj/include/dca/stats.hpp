#pragma once

// Two-sided rank tests.
//
// Both tests use the exact permutation distribution of the statistic for
// small samples (ties handled through midranks, so the distribution is
// conditional on the observed tie pattern) and a tie-corrected normal
// approximation with continuity correction for larger ones.

#include <cstddef>
#include <span>
#include <vector>

namespace dca::stats {

inline constexpr std::size_t kMannWhitneyExactMax = 25;  // combined sample size
inline constexpr std::size_t kWilcoxonExactMax = 20;     // nonzero differences

struct TestResult {
    double statistic = 0.0;
    double p_value = 1.0;
    bool exact = true;
};

// Midranks (1-based) of `values`, in input order.
std::vector<double> midranks(std::span<const double> values);

// U is the statistic of the first sample: #{a_i > b_j} + 0.5 #{a_i == b_j}.
// Throws PreconditionError if either sample is empty.
TestResult mann_whitney_u(std::span<const double> a, std::span<const double> b);

// W is the sum of ranks of positive differences after zeros are dropped.
// All-zero input gives p = 1. Throws PreconditionError on empty input.
TestResult wilcoxon_signed_rank(std::span<const double> diffs);

// Paired form: differences a_i - b_i. Sizes must match.
TestResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b);

} // namespace dca::stats
