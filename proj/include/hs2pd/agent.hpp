#ifndef HS2PD_AGENT_HPP
#define HS2PD_AGENT_HPP

#include "hs2pd/grid_map.hpp"

#include <optional>
#include <vector>

namespace hs2pd {

enum class AgentKind : uint8_t { Robot, Human };

enum class AgentMode : uint8_t { PickupMode, DeliveryMode, ChargingMode };

const char* agent_kind_name(AgentKind k);
const char* agent_mode_name(AgentMode m);

// Compass heading; radians convention {0, pi/2, pi, -pi/2} maps to
// {east, north, west, south} with the row axis pointing down.
enum class Heading : uint8_t { East, North, West, South };

double heading_radians(Heading h);
std::optional<Heading> heading_from_radians(double theta);

struct AgentState {
    int id = 0;
    AgentKind kind = AgentKind::Robot;
    Position position;
    Heading heading = Heading::East;
    AgentMode mode = AgentMode::PickupMode;
    double capacity = 0.0;
    double load = 0.0;
    double energy = 0.0;
    double energy_threshold = 0.0;
    double speed = 1.0; // meters per second
    std::vector<int> task_chain;
};

} // namespace hs2pd

#endif
