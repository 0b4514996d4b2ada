#pragma once

// Discrete-event simulation of the star network. Slots are the clock; the
// controller runs at every scheduling-interval boundary and its schedule is
// executed immediately (distribution latency is zero). Between boundaries the
// end-node pairs generate entanglement slot by slot inside their PGAs, and
// new sessions are submitted after exponential waiting times.

#include "qnsched/admission.hpp"
#include "qnsched/core.hpp"
#include "qnsched/edf.hpp"
#include "qnsched/events.hpp"

#include <cstdint>
#include <deque>
#include <iosfwd>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <vector>

namespace qnsched::sim {

using Rng = std::mt19937_64;

/// Uniform double in [0, 1) from the top 53 bits of one draw.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

enum class Regime { peer_to_peer, client_server };
enum class Mode { full, dummy };

std::string to_string(Regime r);
Regime regime_from_string(const std::string& s);
std::string to_string(Mode m);
Mode mode_from_string(const std::string& s);

/// What every session of one application asks for. The packet rate is not
/// part of the template; it is the swept parameter.
struct AppTemplate {
    AppKind app = AppKind::MDA;
    double window_s = 0.01;
    int links = 1;
    double min_fidelity = 0.9;
    double min_separation_s = 0.0;
    int n_inst = 100;
    double max_duration_s = 2100.0;

    friend bool operator==(const AppTemplate&, const AppTemplate&) = default;
};

AppTemplate default_template(AppKind app);

struct SessionModel {
    AppTemplate app;
    Regime regime = Regime::peer_to_peer;
    double lambda_hz = 0.001;
    /// Requested packet rate; 0 asks for the adaptive minimum.
    double rate_hz = 0.1;
};

/// Unordered node pairs that run sessions under a regime. Client-server uses
/// node 0 as the only server.
std::vector<NodePair> session_pairs(Regime regime, int n_nodes);

struct SimConfig {
    NetworkConfig network;
    ControllerConfig controller;
    SessionModel sessions;
    double duration_s = 3600.0;
    Mode mode = Mode::dummy;
    bool log_events = false;
    bool time_schedules = false;
};

/// One PGA being executed: the last window of outcomes is kept as the slots
/// of its recent successes.
struct PgaExecution {
    ScheduleEntry entry;
    Slot window = 1;
    int links = 1;
    std::deque<Slot> successes;
    bool packet_done = false;
    std::optional<Slot> packet_slot;
};

struct PacketEvent {
    std::size_t execution = 0;
    Slot slot = 0;
};

/// Advances the given executions by the slot `t`. Each execution that has
/// not produced its packet draws one Bernoulli(p_gen) outcome; a packet is
/// produced when the last `window` slots hold at least `links` successes.
std::vector<PacketEvent> step_slot(std::span<PgaExecution> executions, Slot t, double p_gen, Rng& rng);

struct IntervalReport {
    /// Packets per session, in the order PGAs produced them.
    std::map<DemandId, std::vector<Slot>> packets;
    std::map<DemandId, std::int64_t> pgas;
};

/// Executes every PGA of a schedule slot by slot.
IntervalReport run_interval(const NetworkSchedule& schedule, const std::map<PgtId, PacketGenerationTask>& tasks,
                            double p_gen, Rng& rng, EventLog* log = nullptr);

/// Number of PGAs a task releases in [start, end): one per period, counted
/// from nominal releases and capped by the task's job limit.
std::int64_t pga_count_in_interval(const PacketGenerationTask& task, Slot start, Slot end);

/// Fast path: packets per session drawn from Binomial(PGAs, p_packet). All
/// packets are stamped with the interval end slot.
IntervalReport dummy_run_interval(const std::map<DemandId, std::int64_t>& pga_counts, double p_packet,
                                  Slot interval_end, Rng& rng);

class Simulation {
public:
    Simulation(SimConfig config, std::uint64_t seed);

    /// Runs every interval up to the configured duration.
    void run();
    /// Runs one scheduling interval; returns false once the horizon is reached.
    bool step_interval();

    const std::vector<Session>& sessions() const { return sessions_; }
    const EventLog& events() const { return log_; }
    const SimConfig& config() const { return config_; }
    std::int64_t interval_index() const { return interval_; }
    std::int64_t intervals_total() const { return intervals_total_; }
    const std::vector<double>& schedule_times_s() const { return schedule_times_; }
    std::int64_t deadline_misses() const { return sched_state_.deadline_misses(); }

    /// Receives every computed schedule (full mode only).
    void set_schedule_sink(std::ostream* out) { schedule_sink_ = out; }
    /// Sum of queue lengths seen at each admission, for diagnostics.
    std::int64_t queue_length_sum() const { return queue_length_sum_; }

private:
    struct PairState {
        NodePair nodes;
        std::optional<std::size_t> live;
        double next_submit_s = 0.0;
    };

    void end_session(std::size_t idx, SessionState state, double end_s);
    void submit_due(double from_s, double to_s);

    SimConfig config_;
    Rng rng_;
    AdmissionController controller_;
    SchedulerState sched_state_;
    EventLog log_;
    std::vector<Session> sessions_;
    std::map<DemandId, std::size_t> by_id_;
    std::vector<PairState> pairs_;
    std::exponential_distribution<double> renew_;
    std::int64_t interval_ = 0;
    std::int64_t intervals_total_ = 0;
    DemandId next_id_ = 1;
    std::ostream* schedule_sink_ = nullptr;
    std::vector<double> schedule_times_;
    std::int64_t queue_length_sum_ = 0;
};

}  // namespace qnsched::sim
