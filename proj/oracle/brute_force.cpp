#include "brute_force.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace qnsched::oracle {

WindowScanTable::WindowScanTable(int m, int n) : m_(m), n_(n) {
    if (m < 1 || n < m || n > 30) throw std::invalid_argument("need 1 <= m <= n <= 30");
    const auto cols = static_cast<std::size_t>(n + 1);
    counts_.assign(static_cast<std::size_t>(m + 1) * cols, 0);
    const std::uint64_t mask = (std::uint64_t{1} << m) - 1;
    const std::uint64_t total = std::uint64_t{1} << n;
    for (std::uint64_t x = 0; x < total; ++x) {
        int busiest = 0;
        for (int s = 0; s + m <= n; ++s) {
            const int c = std::popcount((x >> s) & mask);
            if (c > busiest) busiest = c;
        }
        ++counts_[static_cast<std::size_t>(busiest) * cols + static_cast<std::size_t>(std::popcount(x))];
    }
}

std::uint64_t WindowScanTable::count(int w, int c) const {
    return counts_[static_cast<std::size_t>(w) * static_cast<std::size_t>(n_ + 1) + static_cast<std::size_t>(c)];
}

double WindowScanTable::no_window_prob(int k, double p) const {
    long double acc = 0.0L;
    for (int c = 0; c <= n_; ++c) {
        std::uint64_t ok = 0;
        for (int w = 0; w < k && w <= m_; ++w) ok += count(w, c);
        if (ok == 0) continue;
        acc += static_cast<long double>(ok) * std::pow(static_cast<long double>(p), c) *
               std::pow(1.0L - static_cast<long double>(p), n_ - c);
    }
    return static_cast<double>(acc);
}

std::int64_t hoeffding_min_attempts_scan(int n_inst, double p, double epsilon) {
    for (std::int64_t n = n_inst + 1;; ++n) {
        const double alpha = static_cast<double>(n_inst) / static_cast<double>(n);
        if (p > alpha && epsilon > std::exp(-2.0 * static_cast<double>(n) * (p - alpha) * (p - alpha)))
            return n;
    }
}

double binomial_upper_tail(std::int64_t n, double p, std::int64_t threshold) {
    // Multiplicative pmf recurrence from i = 0.
    long double term = std::pow(1.0L - static_cast<long double>(p), static_cast<long double>(n));
    long double below = 0.0L;
    for (std::int64_t i = 0; i < threshold && i <= n; ++i) {
        below += term;
        term *= static_cast<long double>(n - i) / static_cast<long double>(i + 1) *
                static_cast<long double>(p) / (1.0L - static_cast<long double>(p));
    }
    return static_cast<double>(1.0L - below);
}

}  // namespace qnsched::oracle
