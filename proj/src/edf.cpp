#include "qnsched/edf.hpp"

#include <algorithm>
#include <limits>
#include <ostream>
#include <tuple>

namespace qnsched {

const PgtProgress* SchedulerState::find(PgtId id) const {
    auto it = progress_.find(id);
    return it == progress_.end() ? nullptr : &it->second;
}

std::vector<PgaJob> generate_jobs(const PacketGenerationTask& task, Slot interval_end,
                                  const PgtProgress& progress) {
    std::vector<PgaJob> jobs;
    const std::int64_t limit = task.job_limit();
    for (std::int64_t j = progress.next_index; j <= limit; ++j) {
        const Slot nominal = task.offset + (j - 1) * task.period;
        if (nominal >= interval_end) break;
        PgaJob job;
        job.pgt_id = task.id;
        job.index = j;
        job.release = nominal;
        job.deadline = task.offset + j * task.period;
        jobs.push_back(job);
    }
    if (!jobs.empty() && progress.last_completion)
        jobs.front().release = std::max(jobs.front().release, *progress.last_completion + task.min_separation);
    return jobs;
}

namespace {

struct Candidate {
    const PacketGenerationTask* task = nullptr;
    std::vector<PgaJob> jobs;
    std::size_t head = 0;

    bool done() const { return head >= jobs.size(); }
    PgaJob& current() { return jobs[head]; }
};

}  // namespace

NetworkSchedule compute_schedule(std::span<const PacketGenerationTask> tasks, std::int64_t interval_index,
                                 Slot start_slot, Slot end_slot, SchedulerState& state) {
    NetworkSchedule schedule;
    schedule.interval_index = interval_index;
    schedule.start_slot = start_slot;
    schedule.end_slot = end_slot;

    std::vector<Candidate> cands;
    cands.reserve(tasks.size());
    std::map<ResourceId, Slot> busy_until;
    for (const auto& task : tasks) {
        Candidate c{&task, generate_jobs(task, end_slot, state.progress(task.id)), 0};
        if (!c.jobs.empty()) cands.push_back(std::move(c));
        for (ResourceId r : task.resources()) busy_until.emplace(r, start_slot);
    }

    auto resources_idle = [&](const PacketGenerationTask& task, Slot t) {
        return std::all_of(task.resources().begin(), task.resources().end(),
                           [&](ResourceId r) { return busy_until[r] <= t; });
    };

    std::int64_t misses = 0;
    Slot t = start_slot;
    while (t < end_slot) {
        for (;;) {
            Candidate* best = nullptr;
            for (auto& c : cands) {
                if (c.done()) continue;
                const PgaJob& job = c.current();
                if (job.release > t) continue;
                if (t + c.task->execution() > end_slot) continue;
                if (!resources_idle(*c.task, t)) continue;
                if (best == nullptr ||
                    std::tie(job.deadline, job.pgt_id, job.index) <
                        std::tie(best->current().deadline, best->current().pgt_id, best->current().index))
                    best = &c;
            }
            if (best == nullptr) break;

            const PacketGenerationTask& task = *best->task;
            PgaJob& job = best->current();
            job.start = t;
            job.completion = t + task.execution();
            for (ResourceId r : task.resources()) busy_until[r] = *job.completion;

            ScheduleEntry e;
            e.pgt_id = task.id;
            e.demand_id = task.demand_id;
            e.job_index = job.index;
            e.start = t;
            e.end = *job.completion;
            e.deadline = job.deadline;
            e.resources = task.resources();
            if (e.late()) ++misses;
            schedule.entries.push_back(std::move(e));

            PgtProgress& progress = state.progress(task.id);
            progress.next_index = job.index + 1;
            progress.last_completion = job.completion;
            ++best->head;
            if (!best->done())
                best->current().release =
                    std::max(best->current().release, *job.completion + task.min_separation);
        }

        Slot next = end_slot;
        for (auto& c : cands)
            if (!c.done() && c.current().release > t) next = std::min(next, c.current().release);
        for (const auto& [r, until] : busy_until)
            if (until > t) next = std::min(next, until);
        t = next;
    }

    state.set_decision_time(end_slot);
    state.add_deadline_misses(misses);
    return schedule;
}

NetworkSchedule slice_schedule(const NetworkSchedule& schedule, const Component& component) {
    NetworkSchedule out;
    out.interval_index = schedule.interval_index;
    out.start_slot = schedule.start_slot;
    out.end_slot = schedule.end_slot;
    for (const auto& e : schedule.entries) {
        const bool touches =
            component.kind == Component::Kind::hub
                ? !e.resources.empty()
                : std::find(e.resources.begin(), e.resources.end(), link_of(component.node)) != e.resources.end();
        if (touches) out.entries.push_back(e);
    }
    return out;
}

void write_schedule_csv(std::ostream& out, const NetworkSchedule& schedule, bool header) {
    if (header) out << "interval_index,pgt_id,job_index,start_slot,end_slot,resources\n";
    for (const auto& e : schedule.entries) {
        out << schedule.interval_index << ',' << e.pgt_id << ',' << e.job_index << ',' << e.start << ','
            << e.end << ',';
        for (std::size_t i = 0; i < e.resources.size(); ++i) out << (i ? ";" : "") << e.resources[i];
        out << '\n';
    }
}

}  // namespace qnsched
