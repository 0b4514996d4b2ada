#pragma once

// Probability that a packet generation attempt of n slots produces a packet:
// at least k successes inside some window of m consecutive Bernoulli(p)
// trials. This is the discrete scan statistic (generalised birthday problem).
//
// For k >= 3 the Naus (1982) product approximation is used, built on the exact
// expressions for 2m and 3m trials. k = 1 and k = 2 are evaluated exactly.

#include "qnsched/core.hpp"

#include <cstdint>

namespace qnsched::scan {

struct ScanProblem {
    int k = 3;           // successes required
    std::int64_t m = 3;  // window length in trials
    double p = 0.5;      // per-trial success probability
    std::int64_t n = 6;  // total trials
};

/// b(i; s, p). Zero outside 0 <= i <= s.
double binom_pmf(std::int64_t i, std::int64_t s, double p);

/// F_b(r; s, p). Zero for r < 0 and one for r >= s.
double binom_cdf(std::int64_t r, std::int64_t s, double p);

/// Q'(k | m; 2m; p): no window of m trials among 2m holds k successes.
/// Requires 2 < k <= m and 0 < p < 1.
double naus_q2(int k, std::int64_t m, double p);

/// Q'(k | m; 3m; p), same domain as naus_q2.
double naus_q3(int k, std::int64_t m, double p);

/// P'(k | m, n, p), clamped to [0, 1].
///
/// k >= 3 needs n >= 2m; non-integer n/m enters the exponent as a real.
/// Throws DomainError for k < 1, m < k, n < 0 or p outside [0, 1].
double packet_success_prob(const ScanProblem& problem);

/// Exact probability for k = 2 with any window, O(n) time and O(m) memory.
double pair_in_window_prob(std::int64_t m, double p, std::int64_t n);

/// Smallest n with packet_success_prob(k, m, p, n) >= target.
///
/// For k >= 3 the search starts at n = 2m, doubles until the target is
/// bracketed and then bisects; it gives up above 2^40 trials.
Slot min_pga_length(int k, std::int64_t m, double p, double target);

}  // namespace qnsched::scan
