#pragma once

// Non-preemptive, soft-deadline earliest-deadline-first scheduling of packet
// generation attempts over one scheduling interval.
//
// Job j of task i is released at
//     r_ij = max(sigma_i + (j - 1) T_i, c_i,j-1 + t_minsep,i)
// and has deadline d_ij = sigma_i + j T_i, for j up to
// floor((t_expiry,i - sigma_i) / T_i). Because r_ij depends on the completion
// of the previous job, the jobs of one task are strictly sequential and each
// release is resolved when its predecessor is placed.

#include "qnsched/core.hpp"

#include <iosfwd>
#include <map>
#include <span>
#include <vector>

namespace qnsched {

/// Per-task scheduling progress that survives across intervals.
struct PgtProgress {
    std::int64_t next_index = 1;
    std::optional<Slot> last_completion;
};

class SchedulerState {
public:
    PgtProgress& progress(PgtId id) { return progress_[id]; }
    const PgtProgress* find(PgtId id) const;
    void forget(PgtId id) { progress_.erase(id); }

    Slot decision_time() const { return decision_time_; }
    void set_decision_time(Slot t) { decision_time_ = t; }

    std::int64_t deadline_misses() const { return deadline_misses_; }
    void add_deadline_misses(std::int64_t n) { deadline_misses_ += n; }

private:
    std::map<PgtId, PgtProgress> progress_;
    Slot decision_time_ = 0;
    std::int64_t deadline_misses_ = 0;
};

/// Jobs of a task whose nominal release sigma + (j - 1) T lies before
/// interval_end, starting at the task's next unscheduled index. Only the
/// first job's release accounts for the previous completion; later ones carry
/// their nominal release until compute_schedule resolves them.
std::vector<PgaJob> generate_jobs(const PacketGenerationTask& task, Slot interval_end,
                                  const PgtProgress& progress);

/// Runs the EDF decision loop over [start_slot, end_slot). A job is eligible
/// at decision time t when it is released (r <= t), its predecessor has been
/// placed, all of its resources are idle at t and it completes by end_slot.
/// Among eligible jobs the one with the smallest (deadline, pgt id, index)
/// is placed at t. Jobs left over stay pending in `state`.
NetworkSchedule compute_schedule(std::span<const PacketGenerationTask> tasks, std::int64_t interval_index,
                                 Slot start_slot, Slot end_slot, SchedulerState& state);

/// A network component that receives part of the schedule.
struct Component {
    enum class Kind { hub, end_node };
    Kind kind = Kind::hub;
    NodeId node = 0;

    static Component hub() { return {Kind::hub, 0}; }
    static Component end_node(NodeId n) { return {Kind::end_node, n}; }
};

/// The entries a component must execute. The hub takes part in every PGA on
/// the star network; an end node only in those that use its link.
NetworkSchedule slice_schedule(const NetworkSchedule& schedule, const Component& component);

/// Writes schedule rows as CSV:
/// interval_index,pgt_id,job_index,start_slot,end_slot,resources
/// with resources joined by ';'. The header is written when `header` is set.
void write_schedule_csv(std::ostream& out, const NetworkSchedule& schedule, bool header);

}  // namespace qnsched
