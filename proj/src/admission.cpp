#include "qnsched/admission.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qnsched {
namespace {

// Utilisations are sums of ratios; allow a few ulps of slack at the bound.
constexpr double kLoadSlack = 1e-12;

}  // namespace

void DemandQueue::push_back(Demand d) {
    if (ids_.contains(d.id)) throw DomainError("demand " + std::to_string(d.id) + " is already queued");
    if (!items_.empty() && d.submit_s < items_.back().submit_s)
        throw DomainError("demand queue is FIFO in submission time");
    ids_.insert(d.id);
    items_.push_back(std::move(d));
}

void DemandQueue::push_front(Demand d) {
    if (ids_.contains(d.id)) throw DomainError("demand " + std::to_string(d.id) + " is already queued");
    ids_.insert(d.id);
    items_.push_front(std::move(d));
}

Demand DemandQueue::pop_front() {
    Demand d = std::move(items_.front());
    items_.pop_front();
    ids_.erase(d.id);
    return d;
}

std::vector<Demand> DemandQueue::purge_expired(double now_s) {
    std::vector<Demand> out;
    std::deque<Demand> keep;
    for (auto& d : items_) {
        if (d.expiry_s <= now_s) {
            ids_.erase(d.id);
            out.push_back(std::move(d));
        } else {
            keep.push_back(std::move(d));
        }
    }
    items_ = std::move(keep);
    return out;
}

double UtilisationLedger::at(ResourceId r) const {
    auto it = loads_.find(r);
    return it == loads_.end() ? 0.0 : it->second;
}

void UtilisationLedger::add(const PacketGenerationTask& t) {
    for (ResourceId r : t.resources()) loads_[r] += t.utilisation();
}

void UtilisationLedger::remove(const PacketGenerationTask& t) {
    for (ResourceId r : t.resources()) {
        auto it = loads_.find(r);
        if (it == loads_.end()) continue;
        it->second -= t.utilisation();
        if (std::abs(it->second) < kLoadSlack) loads_.erase(it);
    }
}

bool UtilisationLedger::fits(const PacketGenerationTask& t, double bound) const {
    return std::all_of(t.resources().begin(), t.resources().end(),
                       [&](ResourceId r) { return at(r) + t.utilisation() <= bound + kLoadSlack; });
}

double UtilisationLedger::max_load() const {
    double m = 0.0;
    for (const auto& [r, u] : loads_) m = std::max(m, u);
    return m;
}

AdmissionController::AdmissionController(ControllerConfig controller, NetworkConfig network)
    : controller_(controller),
      network_(network),
      factory_(controller, network),
      interval_slots_(network.slots(controller.scheduling_interval_s)) {}

bool AdmissionController::option_is_sane(const PacketOption& o) const {
    return o.window_slots(network_.slot_duration_s) >= o.links && o.links <= network_.qubits_per_node &&
           network_.p_gen > 0.0;
}

Registration AdmissionController::register_demand(const Demand& demand, EventLog* log) {
    const Slot now = network_.slots(std::max(0.0, demand.submit_s));
    auto reject = [&](std::string reason, double u = 0.0) {
        if (log) log->record(now, EventType::register_reject, demand.id, demand.nodes, reason);
        return Registration{false, std::move(reason), u};
    };

    try {
        demand.validate();
    } catch (const DomainError&) {
        return reject("insane");
    }
    if (demand.nodes.second >= network_.n_nodes) return reject("insane");
    if (queue_.contains(demand.id)) return reject("duplicate");

    Demand sane = demand;
    sane.options.clear();
    for (const auto& o : demand.options)
        if (option_is_sane(o)) sane.options.push_back(o);
    if (sane.options.empty()) return reject("insane");

    double best_u = std::numeric_limits<double>::infinity();
    for (const auto& o : sane.options) {
        try {
            best_u = std::min(best_u, factory_.create(sane, o, demand.submit_s).utilisation());
        } catch (const InfeasibleDemand&) {
        }
    }
    if (!(best_u < controller_.registration_utilisation_bound)) return reject("utilisation", best_u);

    queue_.push_back(std::move(sane));
    if (log) log->record(now, EventType::register_accept, demand.id, demand.nodes);
    return {true, "", best_u};
}

std::int64_t AdmissionController::pga_contribution(const PacketGenerationTask& t) const {
    return (interval_slots_ + t.period - 1) / t.period;
}

std::int64_t AdmissionController::projected_pga_count() const {
    std::int64_t n = 0;
    for (const auto& t : active_) n += pga_contribution(t);
    return n;
}

void AdmissionController::install(const PacketGenerationTask& t) {
    active_.push_back(t);
    ledger_.add(t);
}

void AdmissionController::remove_active(PgtId id) {
    auto it = std::find_if(active_.begin(), active_.end(), [&](const auto& t) { return t.id == id; });
    if (it == active_.end()) return;
    ledger_.remove(*it);
    active_.erase(it);
}

void AdmissionController::handle_termination(PgtId id) { pending_terminations_.insert(id); }

std::vector<PgtId> AdmissionController::handle_expiry(double now_s) {
    const Slot now = network_.slots(now_s);
    std::vector<PgtId> gone;
    for (const auto& t : active_)
        if (t.expiry_slot <= now) gone.push_back(t.id);
    for (PgtId id : gone) remove_active(id);
    return gone;
}

AdmissionResult AdmissionController::admit(double now_s, EventLog* log) {
    AdmissionResult res;
    const Slot now = network_.slots(now_s);

    for (PgtId id : pending_terminations_) remove_active(id);
    pending_terminations_.clear();
    res.expired_pgts = handle_expiry(now_s);

    res.purged = queue_.purge_expired(now_s);
    if (log)
        for (const auto& d : res.purged) log->record(now, EventType::purge, d.id, d.nodes, "expired");

    std::int64_t pga_count = projected_pga_count();
    while (!queue_.empty()) {
        Demand head = queue_.pop_front();
        std::optional<PacketGenerationTask> pgt;
        try {
            pgt = factory_.create_best(head, now_s);
        } catch (const InfeasibleDemand&) {
        }
        if (!pgt || !(pgt->utilisation() < controller_.registration_utilisation_bound)) {
            if (log) log->record(now, EventType::purge, head.id, head.nodes, "utilisation");
            res.dropped.push_back(std::move(head));
            continue;
        }
        const std::int64_t extra = pga_contribution(*pgt);
        if (!ledger_.fits(*pgt, controller_.utilisation_bound) || pga_count + extra > controller_.pga_cap) {
            if (log) {
                const char* why = ledger_.fits(*pgt, controller_.utilisation_bound) ? "pga_cap" : "utilisation";
                log->record(now, EventType::return_to_head, head.id, head.nodes, why);
            }
            res.returned_to_head = head.id;
            queue_.push_front(std::move(head));
            break;
        }
        pga_count += extra;
        ledger_.add(*pgt);
        active_.push_back(*pgt);
        if (log) log->record(now, EventType::admit, head.id, head.nodes, "U=" + std::to_string(pgt->utilisation()));
        res.admitted.push_back(*pgt);
    }
    return res;
}

}  // namespace qnsched
