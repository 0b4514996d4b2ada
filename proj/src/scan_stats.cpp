#include "qnsched/scan_stats.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace qnsched::scan {
namespace {

using real = long double;

constexpr Slot kNausSearchLimit = Slot{1} << 40;
constexpr Slot kPairSearchLimit = Slot{1} << 32;

real pmf(std::int64_t i, std::int64_t s, real p) {
    if (i < 0 || i > s) return 0.0L;
    if (p == 0.0L) return i == 0 ? 1.0L : 0.0L;
    if (p == 1.0L) return i == s ? 1.0L : 0.0L;
    const real log_choose = std::lgamma(static_cast<real>(s) + 1.0L) -
                            std::lgamma(static_cast<real>(i) + 1.0L) -
                            std::lgamma(static_cast<real>(s - i) + 1.0L);
    return std::exp(log_choose + static_cast<real>(i) * std::log(p) +
                    static_cast<real>(s - i) * std::log1p(-p));
}

real cdf(std::int64_t r, std::int64_t s, real p) {
    if (r < 0) return 0.0L;
    if (r >= s) return 1.0L;
    real acc = 0.0L;
    for (std::int64_t i = 0; i <= r; ++i) acc += pmf(i, s, p);
    return std::min(acc, 1.0L);
}

void check_naus_domain(int k, std::int64_t m, double p) {
    if (k <= 2) throw DomainError("Naus formulas need k > 2, got k = " + std::to_string(k));
    if (m < k) throw DomainError("Naus formulas need k <= m");
    if (!(p > 0.0 && p < 1.0)) throw DomainError("Naus formulas need 0 < p < 1");
}

real q2(int k, std::int64_t m, real p) {
    const real bk = pmf(k, m, p);
    const real f1 = cdf(k - 1, m, p);
    return f1 * f1 - static_cast<real>(k - 1) * bk * cdf(k - 2, m, p) +
           static_cast<real>(m) * p * bk * cdf(k - 3, m - 1, p);
}

real q3(int k, std::int64_t m, real p) {
    const real bk = pmf(k, m, p);
    const real mp = static_cast<real>(m) * p;
    const real f1 = cdf(k - 1, m, p);
    const real kk = static_cast<real>(k);

    const real a1 = 2.0L * bk * f1 * ((kk - 1.0L) * cdf(k - 2, m, p) - mp * cdf(k - 3, m - 1, p));
    const real a2 = 0.5L * bk * bk *
                    ((kk - 1.0L) * (kk - 2.0L) * cdf(k - 3, m, p) -
                     2.0L * (kk - 2.0L) * mp * cdf(k - 4, m - 1, p) +
                     static_cast<real>(m) * static_cast<real>(m - 1) * p * p * cdf(k - 5, m - 2, p));
    real a3 = 0.0L;
    for (int r = 1; r <= k - 1; ++r) {
        const real f = cdf(r - 1, m, p);
        a3 += pmf(2 * k - r, m, p) * f * f;
    }
    real a4 = 0.0L;
    for (int r = 2; r <= k - 1; ++r) {
        a4 += pmf(2 * k - r, m, p) * pmf(r, m, p) *
              (static_cast<real>(r - 1) * cdf(r - 2, m, p) - mp * cdf(r - 3, m - 1, p));
    }
    return f1 * f1 * f1 - a1 + a2 + a3 - a4;
}

real clamp01(real v) { return std::clamp(v, 0.0L, 1.0L); }

// Exact scan for two successes closer than m trials apart.
//
// State after each trial: either "clear" (a success on the next trial is
// allowed) or "hot" with h trials since the last success, h = 0..m-2. A
// success from a hot state completes a packet. The hot masses are p*clear
// shifted and damped by (1-p) per trial, so a ring of birth masses holds
// the whole state. Calls stop(t, prob) after every trial; returns the trial
// count at which it first answered true, or -1 after limit trials.
template <class Stop>
std::int64_t pair_scan(std::int64_t m, real p, std::int64_t limit, Stop&& stop) {
    const real q = 1.0L - p;
    const std::int64_t hot = m - 1;
    const real q_hot = std::pow(q, static_cast<real>(hot));
    std::vector<real> born(static_cast<std::size_t>(hot), 0.0L);
    real clear = 1.0L;
    real hot_mass = 0.0L;
    real absorbed = 0.0L;
    for (std::int64_t t = 0; t < limit; ++t) {
        const auto slot = static_cast<std::size_t>((t + 1) % hot);
        const real leaving = born[slot] * q_hot;
        const real newborn = p * clear;
        absorbed += p * hot_mass;
        clear = q * clear + leaving;
        hot_mass = q * hot_mass - leaving + newborn;
        born[slot] = newborn;
        if ((t + 1) % hot == 0) {
            // Rebuild the running sum so rounding cannot accumulate.
            real acc = 0.0L;
            real damp = 1.0L;
            for (std::int64_t h = 0; h < hot; ++h) {
                const auto idx = static_cast<std::size_t>(((t + 1 - h) % hot + hot) % hot);
                acc += born[idx] * damp;
                damp *= q;
            }
            hot_mass = acc;
        }
        if (stop(t + 1, clamp01(absorbed))) return t + 1;
    }
    return -1;
}

void check_problem(const ScanProblem& pr) {
    if (pr.k < 1) throw DomainError("scan problem needs k >= 1");
    if (pr.m < 1) throw DomainError("scan problem needs m >= 1");
    if (pr.m < pr.k) throw DomainError("a window of m trials cannot hold k > m successes");
    if (pr.n < 0) throw DomainError("scan problem needs n >= 0");
    if (!(pr.p >= 0.0 && pr.p <= 1.0)) throw DomainError("success probability must lie in [0, 1]");
}

}  // namespace

double binom_pmf(std::int64_t i, std::int64_t s, double p) {
    return static_cast<double>(pmf(i, s, p));
}

double binom_cdf(std::int64_t r, std::int64_t s, double p) {
    return static_cast<double>(cdf(r, s, p));
}

double naus_q2(int k, std::int64_t m, double p) {
    check_naus_domain(k, m, p);
    return static_cast<double>(clamp01(q2(k, m, p)));
}

double naus_q3(int k, std::int64_t m, double p) {
    check_naus_domain(k, m, p);
    return static_cast<double>(clamp01(q3(k, m, p)));
}

double pair_in_window_prob(std::int64_t m, double p, std::int64_t n) {
    if (m < 2 || n < 2 || p == 0.0) return 0.0;
    real result = 0.0L;
    pair_scan(m, p, n, [&](std::int64_t t, real prob) {
        result = prob;
        return t == n;
    });
    return static_cast<double>(result);
}

double packet_success_prob(const ScanProblem& pr) {
    check_problem(pr);
    if (pr.k >= 3 && pr.n < 2 * pr.m)
        throw DomainError("Naus approximation needs n >= 2m (n = " + std::to_string(pr.n) +
                          ", m = " + std::to_string(pr.m) + ")");
    if (pr.n < pr.k || pr.p == 0.0) return 0.0;
    if (pr.p == 1.0) return 1.0;

    const real p = pr.p;
    if (pr.k == 1) return static_cast<double>(-std::expm1(static_cast<real>(pr.n) * std::log1p(-p)));
    if (pr.k == 2) return pair_in_window_prob(pr.m, pr.p, pr.n);

    const real a = clamp01(q2(pr.k, pr.m, p));
    if (a <= 0.0L) return 1.0;
    const real b = clamp01(q3(pr.k, pr.m, p));
    const real exponent = static_cast<real>(pr.n) / static_cast<real>(pr.m) - 2.0L;
    if (exponent == 0.0L) return static_cast<double>(1.0L - a);
    if (b <= 0.0L) return 1.0;
    const real log_ratio = std::min(0.0L, std::log1p((b - a) / a));
    const real log_q = std::log(a) + exponent * log_ratio;
    return static_cast<double>(clamp01(-std::expm1(log_q)));
}

Slot min_pga_length(int k, std::int64_t m, double p, double target) {
    if (!(target > 0.0 && target < 1.0)) throw DomainError("target packet probability must lie in (0, 1)");
    check_problem({k, m, p, 0});
    if (p == 0.0) throw DomainError("no packet can be generated when p = 0");

    auto prob = [&](Slot n) { return packet_success_prob({k, m, p, n}); };

    if (k == 1) {
        const double guess = std::ceil(std::log1p(-target) / std::log1p(-p));
        Slot n = std::max<Slot>(1, std::isfinite(guess) ? static_cast<Slot>(guess) : 1);
        while (n > 1 && prob(n - 1) >= target) --n;
        while (prob(n) < target) ++n;
        return n;
    }

    if (k == 2) {
        const std::int64_t n = pair_scan(m, p, kPairSearchLimit,
                                         [&](std::int64_t, real v) { return v >= target; });
        if (n < 0) throw DomainError("packet probability target unreachable within the search limit");
        return n;
    }

    Slot lo = 2 * m;
    if (prob(lo) >= target) return lo;
    Slot hi = lo;
    while (prob(hi) < target) {
        lo = hi;
        if (hi > kNausSearchLimit / 2)
            throw DomainError("packet probability target unreachable within 2^40 trials");
        hi *= 2;
    }
    // Invariant: prob(lo) < target <= prob(hi).
    while (hi - lo > 1) {
        const Slot mid = lo + (hi - lo) / 2;
        if (prob(mid) >= target) hi = mid;
        else lo = mid;
    }
    return hi;
}

}  // namespace qnsched::scan
