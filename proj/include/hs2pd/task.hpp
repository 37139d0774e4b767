#ifndef HS2PD_TASK_HPP
#define HS2PD_TASK_HPP

#include "hs2pd/grid_map.hpp"

#include <string>

namespace hs2pd {

// Interval [open, close] in seconds during which a task's goods may be
// picked up at the origin.
struct TimeWindow {
    double open = 0.0;
    double close = 0.0;

    bool operator==(const TimeWindow&) const = default;
};

enum class TaskMode : uint8_t { Pickup, Delivery };

enum class TaskStatus : uint8_t {
    Unreleased,
    Open,
    Assigned,
    InTransit,
    Completed,
    Cancelled,
};

const char* task_mode_name(TaskMode m);
const char* task_status_name(TaskStatus s);

// Valid transitions: Unreleased->Open->Assigned->InTransit->Completed,
// plus Open/Assigned->Cancelled. Assigned->Open covers tasks returned to
// the pool at an update boundary.
bool task_status_can_transition(TaskStatus from, TaskStatus to);

struct Task {
    int id = 0;
    TaskMode mode = TaskMode::Pickup;
    TimeWindow window;
    double load = 0.0;
    double service_time = 0.0;
    Position origin;
    // Warehouse cell for pickup tasks, the paired drop-off for deliveries.
    Position destination;
    bool human_only = false;
    bool robot_only = false;
    double release_time = 0.0;
    TaskStatus status = TaskStatus::Unreleased;
};

} // namespace hs2pd

#endif
