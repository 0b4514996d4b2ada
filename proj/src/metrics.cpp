#include "qnsched/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qnsched::metrics {

RunMetrics compute(std::span<const Session> sessions) {
    RunMetrics m;
    m.n_sessions = sessions.size();
    double queue_sum = 0.0;
    for (const auto& s : sessions) {
        if (s.ended()) {
            ++m.n_ended;
            if (s.minimal_service()) ++m.n_minimal;
        }
        if (s.queue_exit_s) {
            ++m.n_queue_exits;
            queue_sum += *s.queue_exit_s - s.submit_s;
        }
    }
    if (m.n_ended > 0) m.p_ms = static_cast<double>(m.n_minimal) / static_cast<double>(m.n_ended);
    if (m.n_queue_exits > 0) m.mean_queue_time_s = queue_sum / static_cast<double>(m.n_queue_exits);
    return m;
}

std::optional<double> p_ms(std::span<const Session> sessions) { return compute(sessions).p_ms; }

std::optional<double> mean_queue_time(std::span<const Session> sessions) {
    return compute(sessions).mean_queue_time_s;
}

double analytic_expected_queue(double lambda_hz, double interval_s) {
    if (!(lambda_hz > 0.0) || !(interval_s > 0.0)) throw DomainError("lambda and T must be positive");
    const double x = lambda_hz * interval_s;
    // The closed form cancels badly for small x; use its series there.
    if (x < 1e-4) return interval_s * (0.5 + x / 12.0);
    return interval_s * (1.0 - 1.0 / x + 1.0 / std::expm1(x));
}

Summary summarise(std::span<const double> values) {
    Summary s;
    s.n = values.size();
    if (s.n == 0) return s;
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(s.n);
    if (s.n < 2) return s;
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(s.n - 1));
    return s;
}

double kolmogorov_q(double x) {
    if (x < 1e-3) return 1.0;
    double sum = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 200; ++k) {
        const double term = sign * std::exp(-2.0 * k * k * x * x);
        sum += term;
        if (std::abs(term) < 1e-16 * std::abs(sum)) break;
        sign = -sign;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw DomainError("KS test needs two non-empty samples");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0;
    std::size_t j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == v) ++i;
        while (j < b.size() && b[j] == v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    const double ne = std::sqrt(na * nb / (na + nb));
    return {d, kolmogorov_q((ne + 0.12 + 0.11 / ne) * d)};
}

}  // namespace qnsched::metrics
