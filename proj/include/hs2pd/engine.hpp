#ifndef HS2PD_ENGINE_HPP
#define HS2PD_ENGINE_HPP

#include "hs2pd/allocation.hpp"
#include "hs2pd/pathfinding.hpp"
#include "hs2pd/scenario.hpp"

#include <random>
#include <string>
#include <vector>

namespace hs2pd {

struct TraceRecord {
    int step = 0;
    int agent_id = 0;
    AgentKind kind = AgentKind::Robot;
    Position pos;
    AgentMode mode = AgentMode::PickupMode;
    double load = 0.0;
    std::string action; // move|wait|blocked|service|unload|idle
    int task_id = -1;
};

using Trace = std::vector<TraceRecord>;

struct TaskMetric {
    int id = 0;
    int assigned_step = -1;  // update-step index of first assignment
    int completed_step = -1; // update-step index covering completion
    int agent = -1;          // completing agent
};

struct Metrics {
    int completion_step = -1;
    int all_assigned_step = -1;
    double total_robot_distance = 0.0; // meters
    long total_wait_steps = 0;         // wait + blocked actions across agents
    int collisions = 0;
    int window_violations = 0;
    int tasks_completed = 0;
    int tasks_cancelled = 0;
    bool timed_out = false;
    std::vector<TaskMetric> per_task;
    std::vector<double> solver_ms_per_update;
};

// Chains decided at one update boundary; kept for inspection and tests.
struct BoundaryDecision {
    int update_step = 0;
    std::vector<AgentChain> chains;
    std::vector<std::string> warnings;
};

struct RunResult {
    Metrics metrics;
    Trace trace;
    std::vector<BoundaryDecision> boundaries;
    std::vector<std::string> warnings;
};

struct RunOptions {
    int max_update_steps = 100; // step cap; exceeding it is a timeout result
    bool record_trace = true;
};

// Executes the receding-horizon loop on a validated scenario: every update
// period applies held events, re-solves mode and task allocation, re-plans
// robot paths; every phi tick moves each agent one action. Identical
// (scenario, seed) inputs produce identical traces.
RunResult run(const Scenario& scenario, const RunOptions& options = {});

// Trace serialization: one CSV line per record,
// step,agent_id,kind,col,row,mode,load,action,task_id
std::string trace_to_csv(const Trace& trace);
Trace trace_from_csv(const std::string& text);

struct TraceViolation {
    int step = 0;
    std::string what;
};

// Independent re-check of a recorded trace against the scenario: vertex and
// swap collisions across every agent pair, load bounds, and pickup instants
// inside their windows.
std::vector<TraceViolation> validate_trace(const Trace& trace, const Scenario& scenario);

} // namespace hs2pd

#endif
