#pragma once

// Exhaustive reference computations. Nothing here calls into the qnsched
// library: these are the independent checks its closed forms are tested
// against, and the `oracle` CLI subcommand exposes them for exploration.

#include <cstdint>
#include <vector>

namespace qnsched::oracle {

/// Every binary sequence of length n, bucketed by (largest number of ones in
/// any window of m consecutive trials, total number of ones).
class WindowScanTable {
public:
    /// Enumerates all 2^n sequences; n is limited to 30.
    WindowScanTable(int m, int n);

    int window() const { return m_; }
    int trials() const { return n_; }

    /// Probability that no window holds k or more successes.
    double no_window_prob(int k, double p) const;

    /// Probability that some window holds k or more successes.
    double window_prob(int k, double p) const { return 1.0 - no_window_prob(k, p); }

    /// Number of sequences whose busiest window holds exactly w ones and
    /// that contain c ones overall.
    std::uint64_t count(int w, int c) const;

private:
    int m_;
    int n_;
    std::vector<std::uint64_t> counts_;  // (m + 1) x (n + 1), row = busiest window
};

/// Straight scan of the Hoeffding condition starting at N = n_inst + 1.
std::int64_t hoeffding_min_attempts_scan(int n_inst, double p, double epsilon);

/// P[Binomial(n, p) >= threshold] by direct summation of the pmf.
double binomial_upper_tail(std::int64_t n, double p, std::int64_t threshold);

}  // namespace qnsched::oracle
