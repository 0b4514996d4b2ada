#include "qnsched/pgt.hpp"

#include "qnsched/scan_stats.hpp"

#include <cmath>
#include <string>

namespace qnsched {

std::int64_t hoeffding_min_attempts(int n_inst, double p_packet, double epsilon_service) {
    if (n_inst < 1) throw DomainError("n_inst must be at least 1");
    if (!(p_packet > 0.0 && p_packet < 1.0)) throw DomainError("p_packet must lie in (0, 1)");
    if (!(epsilon_service > 0.0 && epsilon_service < 1.0))
        throw DomainError("epsilon_service must lie in (0, 1)");

    auto n = static_cast<std::int64_t>(std::floor(n_inst / p_packet));
    n = std::max<std::int64_t>(n, n_inst + 1);
    for (;; ++n) {
        const double alpha = static_cast<double>(n_inst) / static_cast<double>(n);
        const double gap = p_packet - alpha;
        if (gap > 0.0 && epsilon_service > std::exp(-2.0 * static_cast<double>(n) * gap * gap)) return n;
    }
}

double compute_attempt_rate(const Demand& demand, const PacketOption& option, double p_packet,
                            double epsilon_service, double now_s) {
    if (!(now_s < demand.expiry_s)) throw DomainError("demand has already expired");
    if (!option.adaptive()) return option.rate_hz / p_packet;
    const auto n_min = hoeffding_min_attempts(demand.n_inst, p_packet, epsilon_service);
    return static_cast<double>(n_min) / (demand.expiry_s - now_s);
}

Slot period_from_rate(double attempt_rate_hz, double slot_duration_s) {
    if (!(attempt_rate_hz > 0.0)) throw DomainError("attempt rate must be positive");
    const double x = 1.0 / (attempt_rate_hz * slot_duration_s);
    return std::max<Slot>(1, static_cast<Slot>(std::floor(x + 0.5)));
}

Slot PgaLengthCache::get(int links, Slot window_slots, double p_gen, double p_packet) {
    const auto key = std::make_tuple(links, window_slots, p_gen, p_packet);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    const Slot e = scan::min_pga_length(links, window_slots, p_gen, p_packet);
    cache_.emplace(key, e);
    return e;
}

PgtFactory::PgtFactory(ControllerConfig controller, NetworkConfig network)
    : controller_(controller), network_(network) {
    controller_.validate();
    network_.validate();
}

Slot PgtFactory::execution_slots(const PacketOption& option) {
    const Slot w = option.window_slots(network_.slot_duration_s);
    if (w < option.links) throw InfeasibleDemand("packet window shorter than its number of links");
    if (network_.p_gen <= 0.0) throw InfeasibleDemand("network cannot generate entanglement (p_gen = 0)");
    try {
        return lengths_.get(option.links, w, network_.p_gen, controller_.p_packet);
    } catch (const InfeasibleDemand&) {
        throw;
    } catch (const DomainError& e) {
        throw InfeasibleDemand(std::string("PGA length: ") + e.what());
    }
}

PacketGenerationTask PgtFactory::create(const Demand& demand, const PacketOption& option,
                                        double interval_start_s) {
    const double slot = network_.slot_duration_s;
    const Slot e = execution_slots(option);
    const Slot interval_slots = network_.slots(controller_.scheduling_interval_s);
    if (e > interval_slots) throw InfeasibleDemand("a single PGA is longer than the scheduling interval");

    PacketGenerationTask t;
    t.id = demand.id;
    t.demand_id = demand.id;
    t.nodes = demand.nodes;
    t.adaptive = option.adaptive();
    t.realisation.execution_slots = e;
    t.realisation.window_slots = option.window_slots(slot);
    t.realisation.links = option.links;
    t.realisation.resources = resources_for(demand.nodes);
    t.realisation.attempt_rate_hz = compute_attempt_rate(demand, option, controller_.p_packet,
                                                         controller_.epsilon_service, interval_start_s);
    t.min_separation = network_.slots(demand.min_separation_s);
    t.expiry_slot = network_.slots(demand.expiry_s);
    t.offset = network_.slots(interval_start_s);
    t.period = period_from_rate(t.realisation.attempt_rate_hz, slot);

    if (t.adaptive) {
        // Rounding the period to the nearest slot may lose the last attempt
        // the Hoeffding bound needs before expiry; shorten until it fits.
        const auto n_min = hoeffding_min_attempts(demand.n_inst, controller_.p_packet,
                                                  controller_.epsilon_service);
        while (t.period > 1 && t.job_limit() < n_min) --t.period;
    }
    if (t.utilisation() > 1.0)
        throw InfeasibleDemand("utilisation " + std::to_string(t.utilisation()) + " exceeds 1");
    return t;
}

std::size_t PgtFactory::choose_option(const Demand& demand, double now_s) {
    std::size_t best = demand.options.size();
    double best_u = 0.0;
    std::string last_error = "demand has no options";
    for (std::size_t i = 0; i < demand.options.size(); ++i) {
        try {
            const double u = create(demand, demand.options[i], now_s).utilisation();
            if (best == demand.options.size() || u < best_u) {
                best = i;
                best_u = u;
            }
        } catch (const InfeasibleDemand& e) {
            last_error = e.what();
        }
    }
    if (best == demand.options.size()) throw InfeasibleDemand(last_error);
    return best;
}

PacketGenerationTask PgtFactory::create_best(const Demand& demand, double interval_start_s) {
    return create(demand, demand.options[choose_option(demand, interval_start_s)], interval_start_s);
}

PacketGenerationTask create_pgt(const Demand& demand, const PacketOption& option,
                                const ControllerConfig& cfg, const NetworkConfig& net,
                                double interval_start_s) {
    PgtFactory factory(cfg, net);
    return factory.create(demand, option, interval_start_s);
}

}  // namespace qnsched
