#include "qnsched/core.hpp"

#include <algorithm>
#include <cmath>

namespace qnsched {

Slot seconds_to_slots(double seconds, double slot_duration) {
    if (!(slot_duration > 0.0)) throw DomainError("slot duration must be positive");
    if (!(seconds >= 0.0)) throw DomainError("cannot convert a negative duration to slots");
    const double x = seconds / slot_duration;
    return static_cast<Slot>(std::floor(x + 0.5 + 1e-12 * std::max(1.0, x)));
}

double slots_to_seconds(Slot slots, double slot_duration) {
    return static_cast<double>(slots) * slot_duration;
}

NodePair::NodePair(NodeId a, NodeId b) : first(std::min(a, b)), second(std::max(a, b)) {
    if (a == b) throw DomainError("node pair must contain two distinct nodes");
    if (a < 0 || b < 0) throw DomainError("node ids must be non-negative");
}

std::string NodePair::label() const {
    return std::to_string(first) + "-" + std::to_string(second);
}

void Demand::validate() const {
    if (nodes.first == nodes.second) throw DomainError("demand nodes must be distinct");
    if (options.empty()) throw DomainError("demand must carry at least one packet option");
    for (const auto& o : options) {
        if (!(o.window_s > 0.0)) throw DomainError("packet window must be positive");
        if (o.links < 1) throw DomainError("packet must contain at least one link");
        if (!(o.min_fidelity >= 0.0 && o.min_fidelity <= 1.0))
            throw DomainError("minimum fidelity must lie in [0, 1]");
        if (!(o.rate_hz >= 0.0)) throw DomainError("requested rate must be non-negative");
    }
    if (!(min_separation_s >= 0.0)) throw DomainError("minimum separation must be non-negative");
    if (!(expiry_s > submit_s)) throw DomainError("demand must expire after it is submitted");
    if (n_inst < 1) throw DomainError("n_inst must be at least 1");
}

std::string to_string(AppKind app) { return app == AppKind::MDA ? "MDA" : "CKA"; }

AppKind app_from_string(const std::string& s) {
    if (s == "MDA") return AppKind::MDA;
    if (s == "CKA") return AppKind::CKA;
    throw DomainError("unknown application '" + s + "' (expected MDA or CKA)");
}

std::string to_string(SessionState s) {
    switch (s) {
        case SessionState::queued: return "queued";
        case SessionState::scheduled: return "scheduled";
        case SessionState::terminated: return "terminated";
        case SessionState::expired: return "expired";
        case SessionState::rejected: return "rejected";
    }
    return "unknown";
}

std::int64_t PacketGenerationTask::job_limit() const {
    if (expiry_slot <= offset) return 0;
    return (expiry_slot - offset) / period;
}

void ControllerConfig::validate() const {
    auto open01 = [](double v) { return v > 0.0 && v < 1.0; };
    if (!open01(p_packet)) throw DomainError("p_packet must lie in (0, 1)");
    if (!open01(epsilon_service)) throw DomainError("epsilon_service must lie in (0, 1)");
    if (pga_cap < 1) throw DomainError("pga_cap must be positive");
    if (!(utilisation_bound > 0.0 && utilisation_bound <= 1.0))
        throw DomainError("utilisation_bound must lie in (0, 1]");
    if (!open01(registration_utilisation_bound))
        throw DomainError("registration_utilisation_bound must lie in (0, 1)");
    if (!open01(alpha_c)) throw DomainError("alpha_c must lie in (0, 1)");
    if (!(scheduling_interval_s > 0.0)) throw DomainError("scheduling interval must be positive");
}

void NetworkConfig::validate() const {
    if (n_nodes < 2) throw DomainError("network needs at least two end nodes");
    if (!(slot_duration_s > 0.0)) throw DomainError("slot duration must be positive");
    if (!(p_gen >= 0.0 && p_gen < 1.0)) throw DomainError("p_gen must lie in [0, 1)");
    if (!(fidelity >= 0.0 && fidelity <= 1.0)) throw DomainError("fidelity must lie in [0, 1]");
    if (qubits_per_node < 1) throw DomainError("qubits_per_node must be positive");
}

std::vector<ResourceId> resources_for(const NodePair& nodes) {
    return {link_of(nodes.first), link_of(nodes.second)};
}

}  // namespace qnsched
