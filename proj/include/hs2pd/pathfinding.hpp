#ifndef HS2PD_PATHFINDING_HPP
#define HS2PD_PATHFINDING_HPP

#include "hs2pd/agent.hpp"
#include "hs2pd/grid_map.hpp"
#include "hs2pd/task.hpp"
#include "hs2pd/task_graph.hpp"

#include <optional>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace hs2pd {

struct TimedCell {
    Position pos;
    int step = 0;

    bool operator==(const TimedCell&) const = default;
};

enum class LegPurpose : uint8_t {
    TaskOrigin,
    TaskDestination,
    WarehouseDrop,
    Park,
};

// Timed cell sequence for one robot and one goal. Consecutive entries are
// one step apart and either equal (wait) or 4-adjacent (move). Entries past
// arrival_step are service or window holds at the goal.
struct PathPlan {
    int robot_id = 0;
    int task_id = -1; // -1 for repositioning legs
    LegPurpose purpose = LegPurpose::TaskOrigin;
    std::vector<TimedCell> cells;
    int start_step = 0;
    int arrival_step = 0;

    Position goal() const { return cells.back().pos; }
    int end_step() const { return cells.back().step; }
};

// Occupancies already claimed by planned robots. Vertex entries are
// (cell, step); edge entries record traversals for swap checks; terminal
// entries pin a cell from some step onward (parked or held robots).
class ReservationTable {
public:
    void clear();

    void reserve_vertex(Position p, int step);
    void reserve_edge(Position from, Position to, int step);
    void reserve_from(Position p, int step);

    // Adds every timed cell and traversal of a plan; when hold_forever the
    // final cell is pinned from the plan's last step onward.
    void add_plan(const PathPlan& plan, bool hold_forever);

    bool vertex_free(Position p, int step) const;
    // True when p never becomes reserved at or after step.
    bool free_from(Position p, int step) const;
    // Swap rule: moving from->to at step is barred when to->from is reserved
    // for the same step.
    bool edge_allowed(Position from, Position to, int step) const;

    bool empty() const { return vertex_.empty() && terminal_.empty() && edges_.empty(); }
    // Latest step any entry constrains; searches need not look much past it.
    int latest_step() const { return latest_; }

private:
    static int64_t vkey(Position p, int step) {
        return (int64_t(p.col) << 40) | (int64_t(p.row) << 24) | int64_t(step);
    }
    static int64_t ekey(Position a, Position b, int step) {
        int64_t cells = ((int64_t(a.col) * 4096 + a.row) * 4096 + b.col) * 4096 + b.row;
        return cells * 1048576 + step;
    }

    std::unordered_set<int64_t> vertex_;
    std::unordered_map<int64_t, int> max_step_; // per cell, latest vertex reservation
    std::unordered_map<int64_t, int> terminal_; // per cell, occupied from this step on
    std::unordered_set<int64_t> edges_;
    int latest_ = 0;

    static int64_t ckey(Position p) { return int64_t(p.col) * 4096 + p.row; }
};

// Earliest-arrival conflict-free route on the time-expanded grid; ties fall
// to fewer moves, then to north-east-south-west expansion order. The goal
// must stay free for hold_steps after arrival (forever when hold_steps < 0).
// Returns nullopt when no plan exists within a 4*(width*height) step budget.
std::optional<PathPlan> plan_single(const PathGraph& g2, const AgentState& robot, Position goal,
                                    int start_step, const ReservationTable& reservations,
                                    int hold_steps = 0);

// One task of a robot's chain as the path layer sees it.
struct PlanTask {
    int id = 0;
    TaskMode mode = TaskMode::Pickup;
    Position origin;
    Position destination;
    double window_open = 0.0;  // absolute seconds
    double window_close = 0.0;
    double service_time = 0.0;
    bool skip_origin = false; // goods already aboard; head straight to destination
};

struct RobotPlanRequest {
    int robot_id = 0;
    Position start;
    AgentMode mode = AgentMode::PickupMode;
    std::vector<PlanTask> chain; // empty = idle robot, held in place
    // pickup-mode robots with goods aboard or tasks assigned must end at
    // the warehouse
    bool to_warehouse = false;
    // first step the robot may leave its cell (service finishing across
    // the boundary); it stands there until then
    int ready_step = 0;
};

struct PlanSet {
    std::vector<PathPlan> plans; // the conflict-free set, in planning order
    std::vector<int> held_robots; // planning timeout: robot waits out the horizon
};

// Sequential (prioritized) planning: decomposes each chain into legs, plans
// them in ascending task window-close order (ties by task id then robot id),
// and feeds each result into the reservation table before the next solve.
// A final repositioning leg steps finished robots off endpoint cells.
// static_obstacles (stationary non-robot agents) are avoided outright.
PlanSet plan_all(const PathGraph& g2, const std::vector<RobotPlanRequest>& robots, int now_step,
                 double phi, const std::vector<Position>& static_obstacles = {});

struct PathConflict {
    int robot_a = 0;
    int robot_b = 0;
    int step = 0;
    bool edge = false; // vertex collision when false, swap when true
    Position pos_a;
    Position pos_b;
};

// Post-hoc pairwise check of a plan set: equal cells at one step, and
// swapped cells across consecutive steps.
std::vector<PathConflict> validate_conflict_free(const std::vector<PathPlan>& plans);

// One motion-model step: p plus one cell along the heading
// ({0, pi/2, pi, -pi/2} = east, north, west, south). Throws
// std::invalid_argument when the target cell is off-map or an obstacle.
Position advance_pose(const GridMap& map, Position p, Heading heading);

// Heading that advances from `from` to the 4-adjacent `to`.
std::optional<Heading> heading_between(Position from, Position to);

} // namespace hs2pd

#endif
