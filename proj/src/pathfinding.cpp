#include "hs2pd/pathfinding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <tuple>

namespace hs2pd {

// ---------------------------------------------------------------------------
// ReservationTable
// ---------------------------------------------------------------------------

void ReservationTable::clear() {
    vertex_.clear();
    max_step_.clear();
    terminal_.clear();
    edges_.clear();
    latest_ = 0;
}

void ReservationTable::reserve_vertex(Position p, int step) {
    vertex_.insert(vkey(p, step));
    auto [it, inserted] = max_step_.try_emplace(ckey(p), step);
    if (!inserted) it->second = std::max(it->second, step);
    latest_ = std::max(latest_, step);
}

void ReservationTable::reserve_edge(Position from, Position to, int step) {
    edges_.insert(ekey(from, to, step));
    latest_ = std::max(latest_, step + 1);
}

void ReservationTable::reserve_from(Position p, int step) {
    auto [it, inserted] = terminal_.try_emplace(ckey(p), step);
    if (!inserted) it->second = std::min(it->second, step);
    latest_ = std::max(latest_, step);
}

void ReservationTable::add_plan(const PathPlan& plan, bool hold_forever) {
    for (size_t i = 0; i < plan.cells.size(); ++i) {
        reserve_vertex(plan.cells[i].pos, plan.cells[i].step);
        if (i + 1 < plan.cells.size() && plan.cells[i + 1].pos != plan.cells[i].pos)
            reserve_edge(plan.cells[i].pos, plan.cells[i + 1].pos, plan.cells[i].step);
    }
    if (hold_forever && !plan.cells.empty())
        reserve_from(plan.cells.back().pos, plan.cells.back().step);
}

bool ReservationTable::vertex_free(Position p, int step) const {
    if (vertex_.count(vkey(p, step))) return false;
    auto it = terminal_.find(ckey(p));
    return it == terminal_.end() || it->second > step;
}

bool ReservationTable::free_from(Position p, int step) const {
    if (terminal_.count(ckey(p))) return false;
    auto it = max_step_.find(ckey(p));
    return it == max_step_.end() || it->second < step;
}

bool ReservationTable::edge_allowed(Position from, Position to, int step) const {
    return !edges_.count(ekey(to, from, step));
}

// ---------------------------------------------------------------------------
// Single-robot time-expanded search
// ---------------------------------------------------------------------------

namespace {

// Goal must stay free for the leg's service occupancy: [arrival, departure]
// where departure = max(arrival, earliest_leave_floor) + extra_hold.
struct GoalHold {
    bool forever = false;
    int floor_step = 0; // departure never precedes this (window opening)
    int extra_steps = 0;
};

int departure_step(const GoalHold& hold, int arrival) {
    return std::max(arrival, hold.floor_step) + hold.extra_steps;
}

bool hold_satisfiable(const ReservationTable& res, Position goal, int arrival,
                      const GoalHold& hold) {
    if (hold.forever) return res.free_from(goal, arrival);
    int until = departure_step(hold, arrival);
    for (int s = arrival + 1; s <= until; ++s)
        if (!res.vertex_free(goal, s)) return false;
    return true;
}

std::optional<PathPlan> search_time_expanded(const GridMap& map, int robot_id, Position start,
                                             Position goal, int start_step,
                                             const ReservationTable& res, const GoalHold& hold,
                                             int step_budget) {
    if (!map.passable(start) || !map.passable(goal)) return std::nullopt;

    auto goal_field = bfs_distances(map, goal);
    if (goal_field[map.index_of(start)] < 0) return std::nullopt;
    if (hold.forever && !res.free_from(goal, start_step + step_budget)) return std::nullopt;

    const int cells = map.width() * map.height();
    // Past every reservation the map is static; searching one diameter
    // beyond the last constrained step cannot help.
    int slack = std::max(0, res.latest_step() - start_step);
    int effective_budget = std::min(step_budget, slack + map.passable_count() + 2);

    // Layered DP over (cell, relative step): steps advance by exactly one,
    // so layer r depends only on layer r-1.
    struct Entry {
        int moves = -1; // -1 = unreached
        int parent = -1;
        bool via_move = false;
    };
    std::vector<std::vector<Entry>> layers;
    layers.emplace_back(cells);
    layers[0][map.index_of(start)].moves = 0;

    auto make_plan = [&](int arrival_r) {
        PathPlan plan;
        plan.robot_id = robot_id;
        plan.start_step = start_step;
        plan.arrival_step = start_step + arrival_r;
        std::vector<Position> rev;
        int at = map.index_of(goal);
        for (int r = arrival_r; r >= 0; --r) {
            rev.push_back({at % map.width() + 1, at / map.width() + 1});
            at = layers[r][at].parent >= 0 ? layers[r][at].parent : at;
        }
        std::reverse(rev.begin(), rev.end());
        for (size_t i = 0; i < rev.size(); ++i)
            plan.cells.push_back({rev[i], start_step + static_cast<int>(i)});
        return plan;
    };

    if (start == goal && hold_satisfiable(res, goal, start_step, hold)) return make_plan(0);

    for (int r = 1; r <= effective_budget; ++r) {
        const auto& prev = layers.back();
        std::vector<Entry> cur(cells);
        bool any = false;
        const int abs_prev = start_step + r - 1;
        for (int idx = 0; idx < cells; ++idx) {
            if (prev[idx].moves < 0) continue;
            Position p{idx % map.width() + 1, idx / map.width() + 1};
            auto relax = [&](Position q, bool is_move) {
                if (!map.passable(q)) return;
                if (!res.vertex_free(q, abs_prev + 1)) return;
                if (is_move && !res.edge_allowed(p, q, abs_prev)) return;
                int qi = map.index_of(q);
                int m = prev[idx].moves + (is_move ? 1 : 0);
                if (cur[qi].moves < 0 || m < cur[qi].moves) {
                    cur[qi] = {m, idx, is_move};
                    any = true;
                }
            };
            relax(p, false);
            relax({p.col, p.row - 1}, true); // north
            relax({p.col + 1, p.row}, true); // east
            relax({p.col, p.row + 1}, true); // south
            relax({p.col - 1, p.row}, true); // west
        }
        layers.push_back(std::move(cur));
        if (!any) return std::nullopt; // boxed in entirely
        int gi = map.index_of(goal);
        if (layers[r][gi].moves >= 0 && hold_satisfiable(res, goal, start_step + r, hold))
            return make_plan(r);
    }
    return std::nullopt;
}

} // namespace

std::optional<PathPlan> plan_single(const PathGraph& g2, const AgentState& robot, Position goal,
                                    int start_step, const ReservationTable& reservations,
                                    int hold_steps) {
    const GridMap& map = *g2.map;
    GoalHold hold;
    hold.forever = hold_steps < 0;
    hold.extra_steps = std::max(hold_steps, 0);
    hold.floor_step = start_step;
    int budget = 4 * map.width() * map.height();
    return search_time_expanded(map, robot.id, robot.position, goal, start_step, reservations,
                                hold, budget);
}

// ---------------------------------------------------------------------------
// Prioritized planning over chains
// ---------------------------------------------------------------------------

namespace {

struct Leg {
    using Purpose = LegPurpose;
    Purpose purpose = Purpose::TaskOrigin;
    Position goal;
    int task_id = -1;
    double window_open = 0.0;
    double window_close = std::numeric_limits<double>::infinity();
    double service_time = 0.0;
    // priority key: task legs before parks, then window close, task, robot
    int tier = 0;
    double prio_close = std::numeric_limits<double>::infinity();
    int prio_task = std::numeric_limits<int>::max();
};

struct RobotQueue {
    int robot_id = 0;
    Position pos;
    int step = 0;
    std::vector<Leg> legs;
    size_t next = 0;
    bool held = false;
};

int ceil_steps(double seconds, double phi) {
    return static_cast<int>(std::ceil(seconds / phi - 1e-9));
}

Position choose_park_target(const GridMap& map, Position from, int min_dist,
                            const ReservationTable& res) {
    auto field = bfs_distances(map, from);
    std::vector<std::pair<int, Position>> candidates;
    for (Position p : map.passable_cells()) {
        int d = field[map.index_of(p)];
        if (d < min_dist) continue;
        if (map.at(p) != CellKind::Road) continue;
        candidates.push_back({d, p});
    }
    std::sort(candidates.begin(), candidates.end(),
              [](const auto& a, const auto& b) {
                  if (a.first != b.first) return a.first < b.first;
                  if (a.second.row != b.second.row) return a.second.row < b.second.row;
                  return a.second.col < b.second.col;
              });
    for (const auto& [d, p] : candidates)
        if (res.free_from(p, 0)) return p;
    return from; // nowhere to go; stay put
}

} // namespace

PlanSet plan_all(const PathGraph& g2, const std::vector<RobotPlanRequest>& robots, int now_step,
                 double phi, const std::vector<Position>& static_obstacles) {
    const GridMap& map = *g2.map;
    ReservationTable res;
    PlanSet out;
    for (Position p : static_obstacles) res.reserve_from(p, now_step);

    std::vector<RobotQueue> queues;
    for (const RobotPlanRequest& r : robots) {
        RobotQueue q;
        q.robot_id = r.robot_id;
        q.pos = r.start;
        q.step = std::max(now_step, r.ready_step);
        // occupied while finishing a service that straddles the boundary
        for (int s = now_step; s <= q.step; ++s) res.reserve_vertex(r.start, s);

        for (const PlanTask& t : r.chain) {
            if (!t.skip_origin) {
                Leg leg;
                leg.purpose = Leg::Purpose::TaskOrigin;
                leg.goal = t.origin;
                leg.task_id = t.id;
                leg.window_open = t.window_open;
                leg.window_close = t.window_close;
                leg.service_time = t.service_time;
                leg.prio_close = t.window_close;
                leg.prio_task = t.id;
                q.legs.push_back(leg);
            }
            if (t.mode == TaskMode::Delivery) {
                Leg leg;
                leg.purpose = Leg::Purpose::TaskDestination;
                leg.goal = t.destination;
                leg.task_id = t.id;
                leg.service_time = t.service_time;
                leg.prio_close = t.window_close;
                leg.prio_task = t.id;
                q.legs.push_back(leg);
            }
        }
        if (r.to_warehouse) {
            Leg leg;
            leg.purpose = Leg::Purpose::WarehouseDrop;
            leg.goal = map.warehouse();
            if (!r.chain.empty()) {
                leg.task_id = r.chain.back().id;
                leg.prio_close = r.chain.back().window_close;
                leg.prio_task = r.chain.back().id;
            }
            q.legs.push_back(leg);
        }
        // step off endpoint cells once done so the next robot can dock
        bool will_end_on_endpoint =
            q.legs.empty() ? map.is_endpoint(q.pos) : map.is_endpoint(q.legs.back().goal);
        if (will_end_on_endpoint) {
            Leg leg;
            leg.purpose = Leg::Purpose::Park;
            leg.tier = 1;
            q.legs.push_back(leg);
        }
        queues.push_back(std::move(q));
    }

    // idle robots that stay put are standing obstacles for everyone else
    for (RobotQueue& q : queues)
        if (q.legs.empty()) res.reserve_from(q.pos, q.step);

    auto leg_key = [](const RobotQueue& q) {
        const Leg& l = q.legs[q.next];
        return std::tuple<int, double, int, int>(l.tier, l.prio_close, l.prio_task, q.robot_id);
    };

    while (true) {
        RobotQueue* pick = nullptr;
        for (RobotQueue& q : queues) {
            if (q.held || q.next >= q.legs.size()) continue;
            if (!pick || leg_key(q) < leg_key(*pick)) pick = &q;
        }
        if (!pick) break;
        Leg leg = pick->legs[pick->next];
        ++pick->next;
        const bool last_leg = pick->next >= pick->legs.size();

        if (leg.purpose == Leg::Purpose::Park) {
            leg.goal = choose_park_target(
                map, pick->pos, map.at(pick->pos) == CellKind::Warehouse ? 2 : 1, res);
            if (leg.goal == pick->pos) { // boxed in; stand where we are
                res.reserve_from(pick->pos, pick->step);
                continue;
            }
        }

        GoalHold hold;
        if (leg.purpose == Leg::Purpose::Park) {
            hold.forever = true;
        } else if (leg.purpose == Leg::Purpose::TaskOrigin ||
                   leg.purpose == Leg::Purpose::TaskDestination) {
            hold.floor_step =
                leg.purpose == Leg::Purpose::TaskOrigin ? ceil_steps(leg.window_open, phi) : 0;
            hold.extra_steps = ceil_steps(leg.service_time, phi);
        }
        // non-park final legs pin their goal: the robot stays there
        if (last_leg && leg.purpose != Leg::Purpose::Park) hold.forever = true;

        int budget = 4 * map.width() * map.height();
        auto plan = search_time_expanded(map, pick->robot_id, pick->pos, leg.goal, pick->step,
                                         res, hold, budget);
        if (!plan) {
            pick->held = true;
            res.reserve_from(pick->pos, pick->step);
            out.held_robots.push_back(pick->robot_id);
            continue;
        }
        plan->task_id = leg.task_id;
        plan->purpose = leg.purpose;
        int departure = plan->arrival_step;
        if (leg.purpose == Leg::Purpose::TaskOrigin || leg.purpose == Leg::Purpose::TaskDestination) {
            GoalHold h2;
            h2.floor_step =
                leg.purpose == Leg::Purpose::TaskOrigin ? ceil_steps(leg.window_open, phi) : 0;
            h2.extra_steps = ceil_steps(leg.service_time, phi);
            departure = departure_step(h2, plan->arrival_step);
        }
        for (int s = plan->arrival_step + 1; s <= departure; ++s)
            plan->cells.push_back({leg.goal, s});
        res.add_plan(*plan, hold.forever);
        pick->pos = leg.goal;
        pick->step = departure;
        out.plans.push_back(std::move(*plan));
    }
    return out;
}

std::vector<PathConflict> validate_conflict_free(const std::vector<PathPlan>& plans) {
    std::vector<PathConflict> conflicts;
    auto pos_at = [](const PathPlan& p, int step) -> std::optional<Position> {
        if (p.cells.empty() || step < p.cells.front().step || step > p.cells.back().step)
            return std::nullopt;
        return p.cells[step - p.cells.front().step].pos;
    };
    for (size_t i = 0; i < plans.size(); ++i) {
        for (size_t j = i + 1; j < plans.size(); ++j) {
            if (plans[i].robot_id == plans[j].robot_id) continue;
            if (plans[i].cells.empty() || plans[j].cells.empty()) continue;
            int lo = std::max(plans[i].cells.front().step, plans[j].cells.front().step);
            int hi = std::min(plans[i].cells.back().step, plans[j].cells.back().step);
            for (int s = lo; s <= hi; ++s) {
                Position a = *pos_at(plans[i], s);
                Position b = *pos_at(plans[j], s);
                if (a == b)
                    conflicts.push_back(
                        {plans[i].robot_id, plans[j].robot_id, s, false, a, b});
                if (s + 1 <= hi) {
                    Position a2 = *pos_at(plans[i], s + 1);
                    Position b2 = *pos_at(plans[j], s + 1);
                    if (a == b2 && b == a2 && a != a2)
                        conflicts.push_back(
                            {plans[i].robot_id, plans[j].robot_id, s, true, a, b});
                }
            }
        }
    }
    return conflicts;
}

Position advance_pose(const GridMap& map, Position p, Heading heading) {
    Position q = p;
    switch (heading) {
        case Heading::East: q.col += 1; break;
        case Heading::North: q.row -= 1; break;
        case Heading::West: q.col -= 1; break;
        case Heading::South: q.row += 1; break;
    }
    if (!map.passable(q))
        throw std::invalid_argument("invalid move from (" + std::to_string(p.col) + "," +
                                    std::to_string(p.row) + ") heading " +
                                    std::to_string(heading_radians(heading)));
    return q;
}

std::optional<Heading> heading_between(Position from, Position to) {
    if (to.col == from.col + 1 && to.row == from.row) return Heading::East;
    if (to.col == from.col - 1 && to.row == from.row) return Heading::West;
    if (to.row == from.row - 1 && to.col == from.col) return Heading::North;
    if (to.row == from.row + 1 && to.col == from.col) return Heading::South;
    return std::nullopt;
}

} // namespace hs2pd
