#ifndef HS2PD_SCENARIO_HPP
#define HS2PD_SCENARIO_HPP

#include "hs2pd/agent.hpp"
#include "hs2pd/events.hpp"
#include "hs2pd/grid_map.hpp"
#include "hs2pd/task.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace hs2pd {

struct SimParams {
    double update_period = 5.0;      // T, seconds between re-plans
    double horizon = 30.0;           // T_D, prediction horizon in seconds
    double phi = 1.0;                // minimum time step, grid_side / robot speed
    double gamma = 0.5;              // delivery-cost weight in F
    double alpha = 0.4;              // robot journey-cost weight in the edge costs
    double big_m = 0.0;              // penalty constant; 0 means "derive default"
    double energy_per_move = 0.0;    // energy drawn per cell moved
    double charge_duration = 30.0;   // seconds an agent is out of service to charge
    uint64_t seed = 0;

    int steps_per_update() const { return static_cast<int>(update_period / phi + 0.5); }
};

// Default M_s: provably dominates any feasible route cost.
double default_big_m(const GridMap& map, size_t task_count);

struct Scenario {
    std::string name;
    GridMap map;
    std::vector<AgentState> agents;
    std::vector<Task> tasks;
    EventTimeline events;
    SimParams params;
};

struct Violation {
    std::string code;
    std::string message;
};

// Reports every violated invariant: malformed windows/loads/flags, pickup
// destinations off the warehouse, unreachable endpoints, duplicate agent
// starting positions, inconsistent params. Empty result means valid.
std::vector<Violation> validate_scenario(const Scenario& s);

// Tasks eligible for allocation at an update boundary: released, not yet
// in transit or resolved, and with a window that has not closed.
std::vector<Task> active_tasks(const std::vector<Task>& tasks, double now);
std::vector<Task> active_tasks(const Scenario& s, double now);

} // namespace hs2pd

#endif
