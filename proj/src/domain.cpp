#include "hs2pd/agent.hpp"
#include "hs2pd/task.hpp"

#include <cmath>

namespace hs2pd {

const char* task_mode_name(TaskMode m) {
    return m == TaskMode::Pickup ? "pickup" : "delivery";
}

const char* task_status_name(TaskStatus s) {
    switch (s) {
        case TaskStatus::Unreleased: return "unreleased";
        case TaskStatus::Open: return "open";
        case TaskStatus::Assigned: return "assigned";
        case TaskStatus::InTransit: return "in_transit";
        case TaskStatus::Completed: return "completed";
        case TaskStatus::Cancelled: return "cancelled";
    }
    return "?";
}

bool task_status_can_transition(TaskStatus from, TaskStatus to) {
    if (from == to) return true;
    switch (from) {
        case TaskStatus::Unreleased:
            return to == TaskStatus::Open;
        case TaskStatus::Open:
            return to == TaskStatus::Assigned || to == TaskStatus::Cancelled;
        case TaskStatus::Assigned:
            return to == TaskStatus::InTransit || to == TaskStatus::Open ||
                   to == TaskStatus::Cancelled;
        case TaskStatus::InTransit:
            return to == TaskStatus::Completed;
        case TaskStatus::Completed:
        case TaskStatus::Cancelled:
            return false;
    }
    return false;
}

const char* agent_kind_name(AgentKind k) {
    return k == AgentKind::Robot ? "robot" : "human";
}

const char* agent_mode_name(AgentMode m) {
    switch (m) {
        case AgentMode::PickupMode: return "pickup";
        case AgentMode::DeliveryMode: return "delivery";
        case AgentMode::ChargingMode: return "charging";
    }
    return "?";
}

double heading_radians(Heading h) {
    switch (h) {
        case Heading::East: return 0.0;
        case Heading::North: return M_PI / 2.0;
        case Heading::West: return M_PI;
        case Heading::South: return -M_PI / 2.0;
    }
    return 0.0;
}

std::optional<Heading> heading_from_radians(double theta) {
    const double eps = 1e-9;
    if (std::fabs(theta) < eps) return Heading::East;
    if (std::fabs(theta - M_PI / 2.0) < eps) return Heading::North;
    if (std::fabs(theta - M_PI) < eps || std::fabs(theta + M_PI) < eps) return Heading::West;
    if (std::fabs(theta + M_PI / 2.0) < eps) return Heading::South;
    return std::nullopt;
}

} // namespace hs2pd
