#ifndef HS2PD_ORACLE_HPP
#define HS2PD_ORACLE_HPP

#include "hs2pd/allocation.hpp"
#include "hs2pd/pathfinding.hpp"

#include <optional>
#include <vector>

namespace hs2pd {

// Exhaustive reference solvers for small instances. They enumerate every
// candidate directly (no bounding) and exist solely to cross-check the
// production planners; keep them independent of the search code paths.

struct BruteChains {
    std::vector<std::vector<int>> chains_by_agent; // task ids, agents in id order
    double objective = 0.0;
};

// Every partition of the tasks into ordered per-agent chains (including
// none), filtered by capacity and check_time_feasibility.
BruteChains brute_force_pickup(const TaskGraph& g, const std::vector<AllocAgent>& agents,
                               const std::vector<AllocTask>& tasks, const AllocParams& params);

// Every assignment pattern of at most one task per agent and agent per task.
BruteChains brute_force_delivery(const TaskGraph& g, const std::vector<AllocAgent>& agents,
                                 const std::vector<AllocTask>& tasks, const AllocParams& params);

// Every pickup/delivery mode vector over the free agents, with the two
// exhaustive solvers above as the lower level.
double brute_force_mode_objective(const TaskGraph& g, const std::vector<ModeAgent>& agents,
                                  const std::vector<AllocTask>& tasks,
                                  const AllocParams& params);

// Plain FIFO search over (cell, step) states under the same reservation
// rules as plan_single; returns the earliest arrival step or nullopt.
std::optional<int> single_robot_earliest_arrival(const GridMap& map, Position start,
                                                 Position goal, int start_step,
                                                 const ReservationTable& reservations,
                                                 int max_steps);

// Joint two-robot search over (cellA, cellB, parkedA, parkedB) states.
// Robots park at their goals; the result is the minimal sum of steps each
// robot spends before parking, or nullopt if no conflict-free joint plan
// exists within max_steps.
std::optional<int> joint_two_robot_min_total_arrival(const GridMap& map, Position start_a,
                                                     Position goal_a, Position start_b,
                                                     Position goal_b, int max_steps);

} // namespace hs2pd

#endif
