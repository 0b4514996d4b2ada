#include "qnsched/events.hpp"

#include <algorithm>
#include <ostream>

namespace qnsched {

std::string to_string(EventType t) {
    switch (t) {
        case EventType::submit: return "submit";
        case EventType::register_accept: return "register_accept";
        case EventType::register_reject: return "register_reject";
        case EventType::admit: return "admit";
        case EventType::return_to_head: return "return_to_head";
        case EventType::purge: return "purge";
        case EventType::pga_start: return "pga_start";
        case EventType::pga_end: return "pga_end";
        case EventType::packet: return "packet";
        case EventType::terminate: return "terminate";
        case EventType::expire: return "expire";
    }
    return "unknown";
}

void EventLog::record(Slot t, EventType type, DemandId session, const NodePair& pair, std::string detail) {
    if (!enabled_) return;
    events_.push_back({t, type, session, pair, std::move(detail)});
}

std::size_t EventLog::count(EventType type) const {
    return static_cast<std::size_t>(
        std::count_if(events_.begin(), events_.end(), [&](const Event& e) { return e.type == type; }));
}

void EventLog::write_csv(std::ostream& out, bool header) const {
    if (header) out << "time_slot,event_type,session_id,pair,detail\n";
    for (const auto& e : events_)
        out << e.time_slot << ',' << to_string(e.type) << ',' << e.session_id << ',' << e.pair.label() << ','
            << e.detail << '\n';
}

}  // namespace qnsched
