#include "qnsched/simulator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <ostream>

namespace qnsched::sim {

std::string to_string(Regime r) { return r == Regime::peer_to_peer ? "peer_to_peer" : "client_server"; }

Regime regime_from_string(const std::string& s) {
    if (s == "peer_to_peer") return Regime::peer_to_peer;
    if (s == "client_server") return Regime::client_server;
    throw DomainError("unknown regime '" + s + "' (expected peer_to_peer or client_server)");
}

std::string to_string(Mode m) { return m == Mode::full ? "full" : "dummy"; }

Mode mode_from_string(const std::string& s) {
    if (s == "full") return Mode::full;
    if (s == "dummy") return Mode::dummy;
    throw DomainError("unknown mode '" + s + "' (expected full or dummy)");
}

AppTemplate default_template(AppKind app) {
    AppTemplate t;
    t.app = app;
    if (app == AppKind::MDA) {
        t.window_s = 0.010;
        t.links = 1;
        t.min_separation_s = 0.0;
        t.max_duration_s = 2100.0;
    } else {
        t.window_s = 0.100;
        t.links = 2;
        t.min_separation_s = 0.100;
        t.max_duration_s = 4.0 * 24.0 * 3600.0;
    }
    t.min_fidelity = 0.9;
    t.n_inst = 100;
    return t;
}

std::vector<NodePair> session_pairs(Regime regime, int n_nodes) {
    std::vector<NodePair> out;
    if (regime == Regime::client_server) {
        for (int i = 1; i < n_nodes; ++i) out.emplace_back(0, i);
    } else {
        for (int i = 0; i < n_nodes; ++i)
            for (int j = i + 1; j < n_nodes; ++j) out.emplace_back(i, j);
    }
    return out;
}

std::vector<PacketEvent> step_slot(std::span<PgaExecution> executions, Slot t, double p_gen, Rng& rng) {
    std::vector<PacketEvent> events;
    for (std::size_t i = 0; i < executions.size(); ++i) {
        PgaExecution& ex = executions[i];
        if (ex.packet_done) continue;
        if (!(uniform01(rng) < p_gen)) continue;
        ex.successes.push_back(t);
        while (!ex.successes.empty() && ex.successes.front() <= t - ex.window) ex.successes.pop_front();
        if (static_cast<int>(ex.successes.size()) >= ex.links) {
            ex.packet_done = true;
            ex.packet_slot = t;
            events.push_back({i, t});
        }
    }
    return events;
}

IntervalReport run_interval(const NetworkSchedule& schedule, const std::map<PgtId, PacketGenerationTask>& tasks,
                            double p_gen, Rng& rng, EventLog* log) {
    IntervalReport report;
    std::vector<const ScheduleEntry*> order;
    order.reserve(schedule.entries.size());
    for (const auto& e : schedule.entries) order.push_back(&e);
    std::stable_sort(order.begin(), order.end(), [](const auto* a, const auto* b) { return a->start < b->start; });

    std::vector<PgaExecution> active;
    std::size_t next = 0;
    Slot t = schedule.start_slot;

    auto finish = [&](const PgaExecution& ex) {
        const auto& task = tasks.at(ex.entry.pgt_id);
        ++report.pgas[ex.entry.demand_id];
        if (ex.packet_slot) report.packets[ex.entry.demand_id].push_back(*ex.packet_slot);
        if (log) log->record(ex.entry.end, EventType::pga_end, task.demand_id, task.nodes);
    };

    while (next < order.size() || !active.empty()) {
        const bool all_idle =
            std::all_of(active.begin(), active.end(), [](const PgaExecution& ex) { return ex.packet_done; });
        if (all_idle) {
            // Nothing can change until an execution ends or a new one starts.
            Slot jump = next < order.size() ? order[next]->start : t;
            for (const auto& ex : active) jump = std::min(jump, ex.entry.end);
            if (active.empty() && next < order.size()) jump = order[next]->start;
            t = std::max(t, jump);
        }

        for (auto it = active.begin(); it != active.end();) {
            if (it->entry.end <= t) {
                finish(*it);
                it = active.erase(it);
            } else {
                ++it;
            }
        }
        while (next < order.size() && order[next]->start <= t) {
            const ScheduleEntry& e = *order[next++];
            const auto& task = tasks.at(e.pgt_id);
            PgaExecution ex;
            ex.entry = e;
            ex.window = task.realisation.window_slots;
            ex.links = task.realisation.links;
            if (log) log->record(e.start, EventType::pga_start, task.demand_id, task.nodes);
            active.push_back(std::move(ex));
        }
        if (active.empty()) continue;

        for (const auto& pe : step_slot(active, t, p_gen, rng)) {
            if (log) {
                const auto& task = tasks.at(active[pe.execution].entry.pgt_id);
                log->record(pe.slot, EventType::packet, task.demand_id, task.nodes);
            }
        }
        ++t;
    }
    return report;
}

std::int64_t pga_count_in_interval(const PacketGenerationTask& task, Slot start, Slot end) {
    const std::int64_t limit = task.job_limit();
    if (limit <= 0 || end <= start) return 0;
    // Job j is nominally released at offset + (j - 1) * period.
    auto first_at_or_after = [&](Slot s) -> std::int64_t {
        if (s <= task.offset) return 1;
        return (s - task.offset + task.period - 1) / task.period + 1;
    };
    const std::int64_t lo = first_at_or_after(start);
    const std::int64_t hi = std::min(limit, first_at_or_after(end) - 1);
    return std::max<std::int64_t>(0, hi - lo + 1);
}

IntervalReport dummy_run_interval(const std::map<DemandId, std::int64_t>& pga_counts, double p_packet,
                                  Slot interval_end, Rng& rng) {
    IntervalReport report;
    for (const auto& [id, n] : pga_counts) {
        report.pgas[id] = n;
        if (n <= 0) continue;
        std::binomial_distribution<std::int64_t> draw(n, p_packet);
        const std::int64_t packets = draw(rng);
        if (packets > 0) report.packets[id].assign(static_cast<std::size_t>(packets), interval_end);
    }
    return report;
}

Simulation::Simulation(SimConfig config, std::uint64_t seed)
    : config_(std::move(config)),
      rng_(seed),
      controller_(config_.controller, config_.network),
      log_(config_.log_events),
      renew_(config_.sessions.lambda_hz) {
    config_.network.validate();
    config_.controller.validate();
    if (!(config_.sessions.lambda_hz > 0.0)) throw DomainError("renewal rate lambda must be positive");
    if (!(config_.sessions.rate_hz >= 0.0)) throw DomainError("requested rate must be non-negative");
    if (!(config_.duration_s > 0.0)) throw DomainError("simulated duration must be positive");
    intervals_total_ = static_cast<std::int64_t>(
        std::ceil(config_.duration_s / config_.controller.scheduling_interval_s - 1e-9));
    for (const auto& pair : session_pairs(config_.sessions.regime, config_.network.n_nodes))
        pairs_.push_back({pair, std::nullopt, renew_(rng_)});
}

void Simulation::end_session(std::size_t idx, SessionState state, double end_s) {
    Session& s = sessions_[idx];
    s.state = state;
    const Slot at = config_.network.slots(end_s);
    if (state == SessionState::terminated) {
        controller_.handle_termination(s.id);
        log_.record(at, EventType::terminate, s.id, s.nodes);
    } else if (state == SessionState::expired) {
        log_.record(at, EventType::expire, s.id, s.nodes);
    }
    for (auto& p : pairs_) {
        if (p.nodes == s.nodes && p.live && *p.live == idx) {
            p.live.reset();
            p.next_submit_s = end_s + renew_(rng_);
        }
    }
}

void Simulation::submit_due(double from_s, double to_s) {
    std::vector<std::size_t> due;
    for (std::size_t i = 0; i < pairs_.size(); ++i)
        if (!pairs_[i].live && pairs_[i].next_submit_s >= from_s && pairs_[i].next_submit_s < to_s) due.push_back(i);
    std::stable_sort(due.begin(), due.end(),
                     [&](std::size_t a, std::size_t b) { return pairs_[a].next_submit_s < pairs_[b].next_submit_s; });

    const auto& tmpl = config_.sessions.app;
    for (std::size_t pi : due) {
        PairState& pair = pairs_[pi];
        Session s;
        s.id = next_id_++;
        s.nodes = pair.nodes;
        s.app = tmpl.app;
        s.n_inst = tmpl.n_inst;
        s.submit_s = pair.next_submit_s;
        s.expiry_s = s.submit_s + tmpl.max_duration_s;
        s.state = SessionState::queued;

        Demand d;
        d.id = s.id;
        d.nodes = s.nodes;
        d.options = {PacketOption{tmpl.window_s, tmpl.links, tmpl.min_fidelity, config_.sessions.rate_hz}};
        d.min_separation_s = tmpl.min_separation_s;
        d.expiry_s = s.expiry_s;
        d.n_inst = s.n_inst;
        d.submit_s = s.submit_s;

        const std::size_t idx = sessions_.size();
        sessions_.push_back(s);
        by_id_[s.id] = idx;
        pair.live = idx;
        log_.record(config_.network.slots(s.submit_s), EventType::submit, s.id, s.nodes);

        const Registration reg = controller_.register_demand(d, &log_);
        if (!reg.accepted) {
            sessions_[idx].queue_exit_s = s.submit_s;
            sessions_[idx].state = SessionState::rejected;
        }
    }
}

bool Simulation::step_interval() {
    if (interval_ >= intervals_total_) return false;
    const double interval_s = config_.controller.scheduling_interval_s;
    const double begin_s = static_cast<double>(interval_) * interval_s;
    const double end_s = begin_s + interval_s;
    const Slot begin = config_.network.slots(begin_s);
    const Slot end = config_.network.slots(end_s);

    queue_length_sum_ += static_cast<std::int64_t>(controller_.queue().size());
    const AdmissionResult adm = controller_.admit(begin_s, &log_);
    for (const auto& t : adm.admitted) {
        Session& s = sessions_[by_id_.at(t.demand_id)];
        s.state = SessionState::scheduled;
        s.queue_exit_s = begin_s;
    }
    for (const auto& d : adm.dropped) {
        const std::size_t idx = by_id_.at(d.id);
        sessions_[idx].queue_exit_s = begin_s;
        end_session(idx, SessionState::rejected, begin_s);
    }
    for (PgtId id : adm.expired_pgts) sched_state_.forget(id);

    std::map<PgtId, PacketGenerationTask> tasks;
    for (const auto& t : controller_.active()) tasks.emplace(t.id, t);

    IntervalReport report;
    if (config_.mode == Mode::full) {
        const auto t0 = std::chrono::steady_clock::now();
        NetworkSchedule schedule = compute_schedule(controller_.active(), interval_, begin, end, sched_state_);
        if (config_.time_schedules)
            schedule_times_.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
        if (schedule_sink_) write_schedule_csv(*schedule_sink_, schedule, interval_ == 0);
        report = run_interval(schedule, tasks, config_.network.p_gen, rng_, log_.enabled() ? &log_ : nullptr);
    } else {
        std::map<DemandId, std::int64_t> counts;
        for (const auto& [id, t] : tasks) counts[t.demand_id] = pga_count_in_interval(t, begin, end);
        report = dummy_run_interval(counts, config_.controller.p_packet, end, rng_);
    }

    for (const auto& [id, n] : report.pgas) sessions_[by_id_.at(id)].pgas_executed += n;
    for (const auto& [id, slots] : report.packets) {
        Session& s = sessions_[by_id_.at(id)];
        if (s.state != SessionState::scheduled) continue;
        const Slot expiry = config_.network.slots(s.expiry_s);
        for (Slot at : slots) {
            if (at >= expiry && config_.mode == Mode::full) continue;
            ++s.packets_generated;
            ++s.instances_executed;
            if (!s.minimal_service_slot && s.packets_generated >= s.n_inst) s.minimal_service_slot = at;
        }
    }

    submit_due(begin_s, end_s);

    std::vector<std::size_t> live;
    for (const auto& p : pairs_)
        if (p.live) live.push_back(*p.live);
    for (std::size_t i : live) {
        Session& s = sessions_[i];
        if (s.state == SessionState::rejected) {
            end_session(i, SessionState::rejected, end_s);
        } else if (s.state == SessionState::scheduled && s.minimal_service()) {
            end_session(i, SessionState::terminated, end_s);
            sched_state_.forget(s.id);
        } else if (s.expiry_s <= end_s) {
            if (s.state == SessionState::queued) s.queue_exit_s = end_s;
            end_session(i, SessionState::expired, end_s);
            sched_state_.forget(s.id);
        }
    }

    ++interval_;
    return true;
}

void Simulation::run() {
    while (step_interval()) {
    }
}

}  // namespace qnsched::sim
