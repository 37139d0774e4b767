#ifndef HS2PD_EVENTS_HPP
#define HS2PD_EVENTS_HPP

#include <cstdint>
#include <vector>

namespace hs2pd {

enum class EventKind : uint8_t {
    ReleaseTask,
    CancelTask,
    HumanWrongTask,
    EnergyDrop,
};

const char* event_kind_name(EventKind k);

// Scripted dynamic change. Held until the next update boundary at or after
// `at` before taking effect.
struct Event {
    double at = 0.0;
    EventKind kind = EventKind::ReleaseTask;
    int task_id = -1;  // ReleaseTask, CancelTask, HumanWrongTask
    int agent_id = -1; // HumanWrongTask, EnergyDrop
    double amount = 0.0; // EnergyDrop
};

using EventTimeline = std::vector<Event>;

} // namespace hs2pd

#endif
