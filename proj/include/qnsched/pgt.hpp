#pragma once

// Turning demands into packet generation tasks: PGA length from the scan
// statistic, attempt rate from the requested rate or the Hoeffding bound,
// period in slots, and the two hub links the pair needs.

#include "qnsched/core.hpp"

#include <map>
#include <tuple>

namespace qnsched {

/// The demand cannot be served by any of its options on this network.
class InfeasibleDemand : public DomainError {
public:
    using DomainError::DomainError;
};

/// Smallest N such that N attempts succeeding with probability p_packet
/// yield n_inst successes except with probability below epsilon_service,
/// per Hoeffding's inequality.
std::int64_t hoeffding_min_attempts(int n_inst, double p_packet, double epsilon_service);

/// R / p_packet for a fixed rate, N_min / (t_expiry - now) for an adaptive one.
double compute_attempt_rate(const Demand& demand, const PacketOption& option, double p_packet,
                            double epsilon_service, double now_s);

/// Period in slots: 1 / (rate * slot) rounded half up, at least one slot.
Slot period_from_rate(double attempt_rate_hz, double slot_duration_s);

/// PGA length E for an option: the shortest attempt whose packet
/// probability reaches p_packet. Results are memoised per (s, w, p_gen, p_packet).
class PgaLengthCache {
public:
    Slot get(int links, Slot window_slots, double p_gen, double p_packet);

private:
    std::map<std::tuple<int, Slot, double, double>, Slot> cache_;
};

/// Builds PGTs from demands under a fixed controller and network
/// configuration. Stateless apart from the PGA length cache.
class PgtFactory {
public:
    PgtFactory(ControllerConfig controller, NetworkConfig network);

    /// Creates the PGT for one option at the interval starting at
    /// interval_start_s, which is both the rate reference time and sigma.
    /// Throws InfeasibleDemand if the option is physically impossible, the
    /// PGA does not fit into one scheduling interval, or U > 1.
    PacketGenerationTask create(const Demand& demand, const PacketOption& option,
                                double interval_start_s);

    /// Index of the option with the lowest utilisation; ties go to the
    /// earliest option. Throws InfeasibleDemand if no option is feasible.
    std::size_t choose_option(const Demand& demand, double now_s);

    /// choose_option followed by create.
    PacketGenerationTask create_best(const Demand& demand, double interval_start_s);

    Slot execution_slots(const PacketOption& option);

    const ControllerConfig& controller() const { return controller_; }
    const NetworkConfig& network() const { return network_; }

private:
    ControllerConfig controller_;
    NetworkConfig network_;
    PgaLengthCache lengths_;
};

/// Free-function form of PgtFactory::create.
PacketGenerationTask create_pgt(const Demand& demand, const PacketOption& option,
                                const ControllerConfig& cfg, const NetworkConfig& net,
                                double interval_start_s);

}  // namespace qnsched
