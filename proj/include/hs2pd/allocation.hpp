#ifndef HS2PD_ALLOCATION_HPP
#define HS2PD_ALLOCATION_HPP

#include "hs2pd/agent.hpp"
#include "hs2pd/task.hpp"
#include "hs2pd/task_graph.hpp"

#include <optional>
#include <vector>

namespace hs2pd {

// Allocation works in time relative to the solve instant: windows are
// shifted by the caller, the horizon starts at zero.
struct AllocTask {
    int id = 0;
    TaskMode mode = TaskMode::Pickup;
    double window_open = 0.0;
    double window_close = 0.0;
    double load = 0.0;
    double service_time = 0.0;
    bool human_only = false;
    bool robot_only = false;
};

struct AllocAgent {
    int id = 0;
    AgentKind kind = AgentKind::Robot;
    double speed = 1.0;
    double capacity_left = 0.0;
    // 0 for agents free now; estimated completion time for agents that
    // rejoin planning at a future position (mid-delivery).
    double start_offset = 0.0;
};

struct AllocParams {
    double alpha = 0.4;
    double gamma = 0.5;
    double big_m = 1e6;
    double horizon = 30.0; // T_D
};

// Journey cost of an edge whose target carries the given restriction
// flags: alpha*d + M*(1-allowed) for robots, (1-alpha)*d + M*(1-allowed)
// for humans. Pass both flags false for warehouse legs.
double edge_cost(AgentKind kind, bool human_only, bool robot_only, double distance_m,
                 double alpha, double big_m);
double edge_cost(AgentKind kind, const AllocTask& target, double distance_m, double alpha,
                 double big_m);

// Cost charged when a task stays unassigned: the dearer-kind cost from the
// nearest listed agent position, plus (for pickups) the dearer-kind cost of
// the leg to the warehouse.
double unassigned_penalty(const TaskGraph& g, const AllocTask& task, const AllocParams& params);

struct ArrivalSchedule {
    std::vector<double> arrival; // t^h per chain element, relative seconds
    std::vector<double> wait;    // idle time inserted on the leg into each element
};

// Forward-propagates arrival times along a chain of tasks. Arrivals clamp
// to window openings (the wait); infeasible when any arrival overshoots its
// window close or the horizon.
std::optional<ArrivalSchedule> check_time_feasibility(const TaskGraph& g,
                                                      const std::vector<AllocTask>& chain,
                                                      int start_vertex, double start_time,
                                                      double speed, double horizon);

struct SelectedEdge {
    int agent_id = 0;
    int from_vertex = 0;
    int to_vertex = 0;

    bool operator==(const SelectedEdge&) const = default;
};

struct TaskTime {
    int task_id = 0;
    double value = 0.0;
};

struct PickupSolution {
    std::vector<SelectedEdge> edges;
    std::vector<TaskTime> arrival_times; // t^h for each assigned task
    std::vector<TaskTime> wait_times;    // t^w on the leg into each assigned task
    std::vector<int> unassigned;
    double objective = 0.0; // C_P
};

struct DeliverySolution {
    std::vector<SelectedEdge> edges;
    std::vector<TaskTime> arrival_times;
    std::vector<int> unassigned;
    double objective = 0.0; // C_D
};

// Exact optimum of the pickup-mode allocation: depth-first branch and bound
// over per-agent chain extensions, time feasibility as the pruning rule.
// Ties fall to the lowest agent id, then task id, then chain order.
PickupSolution solve_pickup_allocation(const TaskGraph& g, const std::vector<AllocAgent>& agents,
                                       const std::vector<AllocTask>& tasks,
                                       const AllocParams& params);

// Exact optimum of the delivery-mode allocation: at most one task per agent
// and one agent per task, window and horizon feasibility per pair.
DeliverySolution solve_delivery_allocation(const TaskGraph& g,
                                           const std::vector<AllocAgent>& agents,
                                           const std::vector<AllocTask>& tasks,
                                           const AllocParams& params);

struct ModeAssignment {
    std::vector<std::pair<int, AgentMode>> modes; // sorted by agent id

    AgentMode mode_of(int agent_id) const;
};

struct AllocationResult {
    ModeAssignment modes;
    PickupSolution pickup;
    DeliverySolution delivery;
    double objective = 0.0; // F = C_P + gamma * C_D
};

struct ModeAgent {
    AllocAgent agent;
    double energy = 0.0;
    double energy_threshold = 0.0;
    // Set for agents whose mode is not up for grabs this horizon
    // (an agent mid-delivery stays in delivery mode).
    std::optional<AgentMode> forced_mode;
};

// Top level of the bi-level program: forces depleted agents into charging
// mode, enumerates pickup/delivery vectors for the rest, solves both
// lower-level problems per vector, and keeps the minimiser of
// C_P + gamma*C_D (ties to the lexicographically smallest vector).
AllocationResult solve_mode_allocation(const TaskGraph& g, const std::vector<ModeAgent>& agents,
                                       const std::vector<AllocTask>& tasks,
                                       const AllocParams& params);

struct AgentChain {
    int agent_id = 0;
    AgentMode mode = AgentMode::PickupMode;
    std::vector<int> task_ids;
    bool to_warehouse = false; // pickup chains patrol to the warehouse last
};

// Walks each agent's selected edges from its position vertex into an
// ordered task chain. Throws std::logic_error on cyclic or branching edge
// sets (solver inconsistency).
std::vector<AgentChain> extract_sequences(const TaskGraph& g, const AllocationResult& result);

// Independent re-check of a solution against its type invariants; returns
// human-readable violations (empty when clean). Used by tests and the
// oracle harness.
std::vector<std::string> check_pickup_solution(const TaskGraph& g,
                                               const std::vector<AllocAgent>& agents,
                                               const std::vector<AllocTask>& tasks,
                                               const AllocParams& params,
                                               const PickupSolution& sol);
std::vector<std::string> check_delivery_solution(const TaskGraph& g,
                                                 const std::vector<AllocAgent>& agents,
                                                 const std::vector<AllocTask>& tasks,
                                                 const AllocParams& params,
                                                 const DeliverySolution& sol);

} // namespace hs2pd

#endif
