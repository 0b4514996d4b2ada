#pragma once

// Per-run service metrics and the statistics used to compare runs.

#include "qnsched/core.hpp"

#include <optional>
#include <span>
#include <vector>

namespace qnsched::metrics {

struct RunMetrics {
    /// Fraction of ended sessions that reached minimal service; empty when
    /// no session ended.
    std::optional<double> p_ms;
    /// Mean time between submission and leaving the queue, over sessions
    /// that left it; empty when none did.
    std::optional<double> mean_queue_time_s;
    std::size_t n_sessions = 0;
    std::size_t n_ended = 0;
    std::size_t n_minimal = 0;
    std::size_t n_queue_exits = 0;
};

RunMetrics compute(std::span<const Session> sessions);

std::optional<double> p_ms(std::span<const Session> sessions);
std::optional<double> mean_queue_time(std::span<const Session> sessions);

/// Mean queue time of a session submitted Exp(lambda) after an interval
/// boundary and admitted at the next one, with no capacity contention:
/// T (1 - 1/(lambda T) + 1/(exp(lambda T) - 1)).
double analytic_expected_queue(double lambda_hz, double interval_s);

struct Summary {
    std::size_t n = 0;
    double mean = 0.0;
    /// Sample standard deviation (n - 1 denominator); 0 for n < 2.
    double stddev = 0.0;
};

Summary summarise(std::span<const double> values);

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
};

/// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value.
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

/// Kolmogorov survival function Q(x) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 x^2).
double kolmogorov_q(double x);

}  // namespace qnsched::metrics
