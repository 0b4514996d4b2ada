#pragma once

#include "qnsched/core.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace qnsched {

enum class EventType {
    submit,
    register_accept,
    register_reject,
    admit,
    return_to_head,
    purge,
    pga_start,
    pga_end,
    packet,
    terminate,
    expire,
};

std::string to_string(EventType t);

struct Event {
    Slot time_slot = 0;
    EventType type = EventType::submit;
    DemandId session_id = 0;
    NodePair pair;
    std::string detail;
};

/// Append-only record of controller and simulator events. Disabled logs
/// drop everything, which keeps long runs cheap.
class EventLog {
public:
    explicit EventLog(bool enabled = true) : enabled_(enabled) {}

    bool enabled() const { return enabled_; }
    void record(Slot t, EventType type, DemandId session, const NodePair& pair, std::string detail = {});
    const std::vector<Event>& events() const { return events_; }
    std::size_t count(EventType type) const;
    void clear() { events_.clear(); }

    /// CSV columns: time_slot,event_type,session_id,pair,detail
    void write_csv(std::ostream& out, bool header = true) const;

private:
    bool enabled_;
    std::vector<Event> events_;
};

}  // namespace qnsched
