#pragma once

// Shared domain types for the central controller and the star-network
// simulator. All schedule arithmetic is done in integer network slots; slot 0
// is the start of the simulation.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qnsched {

/// Absolute slot index or a duration measured in slots.
using Slot = std::int64_t;

using NodeId = int;
using ResourceId = int;
using DemandId = std::uint64_t;
using PgtId = std::uint64_t;

/// Raised when a value violates a documented domain invariant.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Converts seconds to slots, rounding half up.
///
/// A relative tolerance of 1e-9 slot is applied before rounding so that
/// values such as 0.25 ms / 100 us, which are 2.5 in exact arithmetic but
/// land a few ulps below it in binary floating point, still round up.
Slot seconds_to_slots(double seconds, double slot_duration);

double slots_to_seconds(Slot slots, double slot_duration);

/// Unordered pair of distinct end nodes, stored with first < second.
struct NodePair {
    NodeId first = 0;
    NodeId second = 1;

    NodePair() = default;
    NodePair(NodeId a, NodeId b);

    bool contains(NodeId n) const { return first == n || second == n; }
    std::string label() const;

    friend bool operator==(const NodePair&, const NodePair&) = default;
    friend auto operator<=>(const NodePair&, const NodePair&) = default;
};

/// One suitable entanglement packet (w, s, F_min) together with the rate at
/// which the nodes want it produced. A rate of zero asks the controller for
/// the minimal rate that still meets the session's service target.
struct PacketOption {
    double window_s = 0.01;
    int links = 1;
    double min_fidelity = 0.0;
    double rate_hz = 0.0;

    bool adaptive() const { return rate_hz == 0.0; }
    Slot window_slots(double slot_duration) const { return seconds_to_slots(window_s, slot_duration); }
};

/// A request for service submitted to the central controller.
struct Demand {
    DemandId id = 0;
    NodePair nodes;
    std::vector<PacketOption> options;
    double min_separation_s = 0.0;
    double expiry_s = 0.0;
    int n_inst = 1;
    double submit_s = 0.0;

    /// Throws DomainError if any structural invariant is broken.
    void validate() const;
};

enum class AppKind { MDA, CKA };

std::string to_string(AppKind app);
AppKind app_from_string(const std::string& s);

enum class SessionState { queued, scheduled, terminated, expired, rejected };

std::string to_string(SessionState s);

/// An application session as seen by the simulator.
struct Session {
    DemandId id = 0;
    NodePair nodes;
    AppKind app = AppKind::MDA;
    int n_inst = 1;
    double submit_s = 0.0;
    double expiry_s = 0.0;
    SessionState state = SessionState::queued;
    std::int64_t packets_generated = 0;
    std::int64_t instances_executed = 0;
    std::int64_t pgas_executed = 0;
    /// Time at which the demand left the queue (admitted, purged or dropped).
    std::optional<double> queue_exit_s;
    /// Slot at which the session first held n_inst packets, if ever.
    std::optional<Slot> minimal_service_slot;

    bool minimal_service() const { return packets_generated >= n_inst; }
    bool ended() const {
        return state == SessionState::terminated || state == SessionState::expired ||
               state == SessionState::rejected;
    }
};

/// A concrete way of serving a demand: one packet option on one path.
struct Realisation {
    Slot execution_slots = 1;
    double attempt_rate_hz = 0.0;
    std::vector<ResourceId> resources;
    Slot window_slots = 1;
    int links = 1;
};

struct PacketGenerationTask {
    PgtId id = 0;
    DemandId demand_id = 0;
    NodePair nodes;
    Realisation realisation;
    Slot min_separation = 0;
    Slot expiry_slot = 0;
    /// First slot of the scheduling interval in which the task was admitted.
    Slot offset = 0;
    Slot period = 1;
    /// True when the attempt rate was derived from the service target.
    bool adaptive = false;

    Slot execution() const { return realisation.execution_slots; }
    const std::vector<ResourceId>& resources() const { return realisation.resources; }
    double utilisation() const {
        return static_cast<double>(realisation.execution_slots) / static_cast<double>(period);
    }
    /// Number of jobs the task ever releases: floor((t_expiry - sigma) / T).
    std::int64_t job_limit() const;
};

/// One packet generation attempt (a job of a PGT).
struct PgaJob {
    PgtId pgt_id = 0;
    std::int64_t index = 1;
    Slot release = 0;
    Slot deadline = 0;
    std::optional<Slot> start;
    std::optional<Slot> completion;
};

struct ScheduleEntry {
    PgtId pgt_id = 0;
    DemandId demand_id = 0;
    std::int64_t job_index = 1;
    Slot start = 0;
    Slot end = 0;
    Slot deadline = 0;
    std::vector<ResourceId> resources;

    bool late() const { return end > deadline; }
};

struct NetworkSchedule {
    std::int64_t interval_index = 0;
    Slot start_slot = 0;
    Slot end_slot = 0;
    std::vector<ScheduleEntry> entries;
};

struct ControllerConfig {
    double p_packet = 0.2;
    double epsilon_service = 1e-5;
    int pga_cap = 1500;
    double utilisation_bound = 0.85;
    double registration_utilisation_bound = 0.8;
    double alpha_c = 0.5;
    double scheduling_interval_s = 300.0;

    void validate() const;
    friend bool operator==(const ControllerConfig&, const ControllerConfig&) = default;
};

struct NetworkConfig {
    int n_nodes = 6;
    double slot_duration_s = 100e-6;
    double p_gen = 7.5e-5;
    double fidelity = 0.925;
    int qubits_per_node = 5;

    void validate() const;
    Slot slots(double seconds) const { return seconds_to_slots(seconds, slot_duration_s); }
    double seconds(Slot s) const { return slots_to_seconds(s, slot_duration_s); }
    friend bool operator==(const NetworkConfig&, const NetworkConfig&) = default;
};

/// In the star network every end node owns exactly one link to the hub and
/// that link is the only resource the scheduler tracks for the node.
inline ResourceId link_of(NodeId node) { return node; }
std::vector<ResourceId> resources_for(const NodePair& nodes);

}  // namespace qnsched
