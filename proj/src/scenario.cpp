#include "hs2pd/scenario.hpp"

#include "hs2pd/task_graph.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace hs2pd {

const char* event_kind_name(EventKind k) {
    switch (k) {
        case EventKind::ReleaseTask: return "release_task";
        case EventKind::CancelTask: return "cancel_task";
        case EventKind::HumanWrongTask: return "human_wrong_task";
        case EventKind::EnergyDrop: return "energy_drop";
    }
    return "?";
}

double default_big_m(const GridMap& map, size_t task_count) {
    double base = 10.0 * (map.width() + map.height()) * map.grid_side() *
                  std::max<size_t>(task_count, 1);
    // The penalty must strictly dominate the sum of all finite edge costs a
    // task graph on this map can carry; the simple formula can fall short on
    // maps with many vertices, so take whichever is larger.
    double diameter = static_cast<double>(map.passable_count()) * map.grid_side();
    double pair_sum = diameter * static_cast<double>((task_count * 3 + 2) * (task_count * 3 + 2));
    return std::max(base, pair_sum + 1.0);
}

namespace {

bool is_multiple(double value, double unit, double eps = 1e-6) {
    if (unit <= 0.0) return false;
    double q = value / unit;
    return std::fabs(q - std::round(q)) < eps;
}

void add(std::vector<Violation>& out, const std::string& code, const std::string& message) {
    out.push_back({code, message});
}

std::string pos_str(Position p) {
    return "(" + std::to_string(p.col) + "," + std::to_string(p.row) + ")";
}

} // namespace

std::vector<Violation> validate_scenario(const Scenario& s) {
    std::vector<Violation> v;
    const GridMap& map = s.map;

    if (map.warehouse_count() != 1)
        add(v, "map.warehouse", "map must contain exactly one warehouse cell, found " +
                                    std::to_string(map.warehouse_count()));

    // Endpoint connectivity: all endpoint cells, agent starts, and task
    // endpoints must sit in one passable component.
    std::vector<Position> anchors;
    for (Position p : map.passable_cells())
        if (map.is_endpoint(p)) anchors.push_back(p);
    for (const AgentState& a : s.agents) anchors.push_back(a.position);
    for (const Task& t : s.tasks) {
        anchors.push_back(t.origin);
        anchors.push_back(t.destination);
    }
    std::vector<Position> bad;
    for (Position p : anchors)
        if (!map.passable(p)) bad.push_back(p);
    for (Position p : bad)
        add(v, "map.impassable_endpoint", "required cell " + pos_str(p) + " is not passable");
    if (bad.empty() && !anchors.empty()) {
        auto field = bfs_distances(map, anchors.front());
        for (Position p : anchors)
            if (field[map.index_of(p)] < 0)
                add(v, "map.unreachable", "cell " + pos_str(p) + " unreachable from " +
                                              pos_str(anchors.front()));
    }

    // Params.
    const SimParams& pr = s.params;
    if (pr.phi <= 0.0) add(v, "params.phi", "phi must be positive");
    if (!(pr.alpha > 0.0 && pr.alpha < 1.0))
        add(v, "params.alpha", "alpha must lie strictly between 0 and 1");
    if (pr.gamma < 0.0) add(v, "params.gamma", "gamma must be nonnegative");
    if (pr.phi > 0.0 && !is_multiple(pr.update_period, pr.phi))
        add(v, "params.update_period", "T must be an integer multiple of phi");
    if (pr.update_period > 0.0 && !is_multiple(pr.horizon, pr.update_period))
        add(v, "params.horizon", "T_D must be an integer multiple of T");
    if (pr.energy_per_move < 0.0) add(v, "params.energy_per_move", "energy_per_move must be >= 0");
    if (pr.charge_duration < 0.0) add(v, "params.charge_duration", "charge_duration must be >= 0");

    double robot_speed = 0.0;
    for (const AgentState& a : s.agents)
        if (a.kind == AgentKind::Robot) {
            if (robot_speed == 0.0) {
                robot_speed = a.speed;
            } else if (std::fabs(robot_speed - a.speed) > 1e-9) {
                add(v, "agents.speed", "all robots must share one speed");
            }
        }
    if (robot_speed > 0.0 && std::fabs(pr.phi - map.grid_side() / robot_speed) > 1e-6)
        add(v, "params.phi", "phi must equal grid_side / robot speed");

    // Agents.
    std::set<int> agent_ids;
    std::set<Position> starts;
    double min_capacity = std::numeric_limits<double>::infinity();
    for (const AgentState& a : s.agents) {
        if (!agent_ids.insert(a.id).second)
            add(v, "agents.duplicate_id", "duplicate agent id " + std::to_string(a.id));
        if (map.passable(a.position) && !starts.insert(a.position).second)
            add(v, "agents.duplicate_position",
                "two agents share starting position " + pos_str(a.position));
        if (a.load < 0.0 || a.load > a.capacity)
            add(v, "agents.load", "agent " + std::to_string(a.id) +
                                      " load must lie in [0, capacity]");
        if (a.energy < 0.0)
            add(v, "agents.energy", "agent " + std::to_string(a.id) + " energy must be >= 0");
        if (a.speed <= 0.0)
            add(v, "agents.speed", "agent " + std::to_string(a.id) + " speed must be positive");
        min_capacity = std::min(min_capacity, a.capacity);
    }

    // Tasks.
    std::set<int> task_ids;
    Position wh{0, 0};
    bool have_wh = map.warehouse_count() == 1;
    if (have_wh) wh = map.warehouse();
    for (const Task& t : s.tasks) {
        std::string tag = "task " + std::to_string(t.id);
        if (!task_ids.insert(t.id).second)
            add(v, "tasks.duplicate_id", "duplicate task id " + std::to_string(t.id));
        if (t.window.open < 0.0 || t.window.open > t.window.close)
            add(v, "tasks.window", tag + " window must satisfy 0 <= open <= close");
        if (t.human_only && t.robot_only)
            add(v, "tasks.flags", tag + " cannot be both human-only and robot-only");
        if (t.load <= 0.0) add(v, "tasks.load", tag + " load must be positive");
        if (!s.agents.empty() && t.load > min_capacity + 1e-9)
            add(v, "tasks.load_bound",
                tag + " load " + std::to_string(t.load) +
                    " exceeds the smallest agent capacity " + std::to_string(min_capacity));
        if (t.service_time < 0.0) add(v, "tasks.service_time", tag + " service_time must be >= 0");
        if (t.release_time < 0.0) add(v, "tasks.release_time", tag + " release_time must be >= 0");
        if (t.mode == TaskMode::Pickup && have_wh && t.destination != wh)
            add(v, "tasks.pickup_destination",
                tag + " is a pickup task but its destination " + pos_str(t.destination) +
                    " is not the warehouse " + pos_str(wh));
    }

    // Events must reference known ids.
    for (const Event& e : s.events) {
        if (e.at < 0.0) add(v, "events.at", "event time must be >= 0");
        if ((e.kind == EventKind::ReleaseTask || e.kind == EventKind::CancelTask ||
             e.kind == EventKind::HumanWrongTask) &&
            !task_ids.count(e.task_id))
            add(v, "events.task", std::string(event_kind_name(e.kind)) +
                                      " references unknown task " + std::to_string(e.task_id));
        if (e.kind == EventKind::HumanWrongTask || e.kind == EventKind::EnergyDrop) {
            if (!agent_ids.count(e.agent_id))
                add(v, "events.agent", std::string(event_kind_name(e.kind)) +
                                           " references unknown agent " +
                                           std::to_string(e.agent_id));
            if (e.kind == EventKind::HumanWrongTask) {
                auto it = std::find_if(s.agents.begin(), s.agents.end(),
                                       [&](const AgentState& a) { return a.id == e.agent_id; });
                if (it != s.agents.end() && it->kind != AgentKind::Human)
                    add(v, "events.agent", "human_wrong_task targets non-human agent " +
                                               std::to_string(e.agent_id));
            }
        }
    }

    // big_m must dominate every finite edge cost sum the allocator can see.
    if (v.empty() && pr.big_m > 0.0) {
        try {
            TaskGraph g = build_task_graph(map, s.agents, s.tasks);
            double sum = 0.0;
            for (int i = 0; i < g.size(); ++i)
                for (int j = 0; j < g.size(); ++j)
                    if (i != j) sum += g.distance(i, j);
            if (pr.big_m <= sum)
                add(v, "params.big_m",
                    "big_m " + std::to_string(pr.big_m) +
                        " does not exceed the task graph edge cost sum " + std::to_string(sum));
        } catch (const std::exception&) {
            // unreachable pairs already reported above
        }
    }

    return v;
}

std::vector<Task> active_tasks(const std::vector<Task>& tasks, double now) {
    std::vector<Task> out;
    for (const Task& t : tasks) {
        if (t.release_time > now) continue;
        if (t.window.close < now) continue;
        bool live = t.status == TaskStatus::Open || t.status == TaskStatus::Assigned ||
                    (t.status == TaskStatus::Unreleased && t.release_time <= now);
        if (live) out.push_back(t);
    }
    return out;
}

std::vector<Task> active_tasks(const Scenario& s, double now) {
    return active_tasks(s.tasks, now);
}

} // namespace hs2pd
