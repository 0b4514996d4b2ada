#pragma once

// Demand registration, the FIFO demand queue and scheduler admission
// control.
//
// Registration accepts a demand when it is sane (some option has w >= s on
// nodes that can hold s links) and some sane option would yield a PGT with
// utilisation below the registration bound. At every interval boundary the
// controller carries forward live PGTs, then admits demands from the queue
// head while every touched resource stays within the utilisation bound and
// the projected PGA count stays within the cap. The first demand that fails
// goes back to the head and admission stops.

#include "qnsched/core.hpp"
#include "qnsched/events.hpp"
#include "qnsched/pgt.hpp"

#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace qnsched {

class DemandQueue {
public:
    /// Appends a demand. Throws DomainError on a duplicate id or if the
    /// submission time is earlier than the current tail's.
    void push_back(Demand d);
    void push_front(Demand d);
    Demand pop_front();

    const Demand& front() const { return items_.front(); }
    bool empty() const { return items_.empty(); }
    std::size_t size() const { return items_.size(); }
    bool contains(DemandId id) const { return ids_.contains(id); }
    const std::deque<Demand>& items() const { return items_; }

    /// Removes every demand whose expiry is at or before now_s.
    std::vector<Demand> purge_expired(double now_s);

private:
    std::deque<Demand> items_;
    std::set<DemandId> ids_;
};

class UtilisationLedger {
public:
    double at(ResourceId r) const;
    void add(const PacketGenerationTask& t);
    void remove(const PacketGenerationTask& t);
    /// True if adding t keeps every resource it uses at or below bound.
    bool fits(const PacketGenerationTask& t, double bound) const;
    double max_load() const;
    const std::map<ResourceId, double>& loads() const { return loads_; }

private:
    std::map<ResourceId, double> loads_;
};

struct Registration {
    bool accepted = false;
    /// "insane", "utilisation" or "duplicate" when rejected.
    std::string reason;
    double projected_utilisation = 0.0;
};

struct AdmissionResult {
    std::vector<PacketGenerationTask> admitted;
    std::vector<Demand> purged;   // expired while queued
    std::vector<Demand> dropped;  // failed the registration bound on re-evaluation
    std::optional<DemandId> returned_to_head;
    std::vector<PgtId> expired_pgts;
};

class AdmissionController {
public:
    AdmissionController(ControllerConfig controller, NetworkConfig network);

    /// Demand registration. Accepted demands join the queue tail with their
    /// insane options removed.
    Registration register_demand(const Demand& demand, EventLog* log = nullptr);

    /// Scheduler admission for the interval starting at now_s. Call once per
    /// interval, before the schedule is computed.
    AdmissionResult admit(double now_s, EventLog* log = nullptr);

    /// Queues a termination; it takes effect at the next admit(). Unknown
    /// or repeated ids are ignored.
    void handle_termination(PgtId id);

    /// Removes active PGTs whose expiry is at or before now_s and releases
    /// their utilisation.
    std::vector<PgtId> handle_expiry(double now_s);

    const std::vector<PacketGenerationTask>& active() const { return active_; }
    const DemandQueue& queue() const { return queue_; }
    const UtilisationLedger& ledger() const { return ledger_; }
    PgtFactory& factory() { return factory_; }

    /// Sum over active PGTs of ceil(interval slots / period).
    std::int64_t projected_pga_count() const;
    std::int64_t pga_contribution(const PacketGenerationTask& t) const;

    /// Test hook: installs an already-built PGT as active.
    void install(const PacketGenerationTask& t);

private:
    void remove_active(PgtId id);
    bool option_is_sane(const PacketOption& o) const;

    ControllerConfig controller_;
    NetworkConfig network_;
    PgtFactory factory_;
    DemandQueue queue_;
    UtilisationLedger ledger_;
    std::vector<PacketGenerationTask> active_;
    std::set<PgtId> pending_terminations_;
    Slot interval_slots_;
};

}  // namespace qnsched
