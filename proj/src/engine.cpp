#include "hs2pd/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace hs2pd {

namespace {

constexpr double kEps = 1e-9;

int ceil_ticks(double seconds, double phi) {
    return static_cast<int>(std::ceil(seconds / phi - kEps));
}

struct TaskRt {
    Task t;
    int assigned_step = -1;
    int claimed_by = -1;
    bool stolen = false; // a human took it over outside the allocation
    double pickup_time = -1.0;
    double completed_time = -1.0;
    int completed_by = -1;
};

struct Errand {
    LegPurpose purpose = LegPurpose::TaskOrigin;
    int task_id = -1;
    Position goal;
};

struct TimelineEntry {
    Position pos;
    int errand = -1;
};

struct AgentRt {
    AgentState st;
    double initial_energy = 0.0;

    std::vector<Errand> errands;
    size_t errand_idx = 0;
    // robots follow the planned cell sequence; humans navigate per tick
    std::vector<TimelineEntry> timeline;
    size_t timeline_idx = 0;
    bool held = false;

    bool in_service = false;
    bool waiting_window = false;
    double service_end = 0.0;
    int service_task = -1;

    std::vector<int> carrying; // pickup task ids aboard
    int delivery_task = -1;    // delivery task aboard (in transit)

    bool charging = false;
    double charge_until = 0.0;

    int wrong_task = -1; // human misbehavior target

    std::optional<Position> park_target;

    bool is_robot() const { return st.kind == AgentKind::Robot; }
};

struct Sim {
    const Scenario& sc;
    const RunOptions& opts;
    GridMap map;
    PathGraph g2;
    Position warehouse;
    double phi;

    std::vector<TaskRt> tasks;   // sorted by id
    std::vector<AgentRt> agents; // robots by id, then humans by id
    std::vector<char> event_applied;

    double clock = 0.0;
    int tick = 0;

    RunResult out;
    std::mt19937_64 rng;

    explicit Sim(const Scenario& s, const RunOptions& o)
        : sc(s), opts(o), map(s.map), g2{&map}, warehouse(map.warehouse()), phi(s.params.phi),
          rng(s.params.seed) {
        for (const Task& t : s.tasks) tasks.push_back({t});
        std::sort(tasks.begin(), tasks.end(),
                  [](const TaskRt& a, const TaskRt& b) { return a.t.id < b.t.id; });
        for (const AgentState& a : s.agents) {
            AgentRt rt;
            rt.st = a;
            rt.initial_energy = a.energy;
            agents.push_back(rt);
        }
        std::sort(agents.begin(), agents.end(), [](const AgentRt& a, const AgentRt& b) {
            if (a.st.kind != b.st.kind) return a.st.kind == AgentKind::Robot;
            return a.st.id < b.st.id;
        });
        event_applied.assign(s.events.size(), 0);
    }

    TaskRt* task(int id) {
        for (TaskRt& t : tasks)
            if (t.t.id == id) return &t;
        return nullptr;
    }
    AgentRt* agent(int id) {
        for (AgentRt& a : agents)
            if (a.st.id == id) return &a;
        return nullptr;
    }

    void warn(const std::string& w) { out.warnings.push_back(w); }

    int boundary_index() const {
        return static_cast<int>(clock / sc.params.update_period + 0.5);
    }

    bool all_resolved() const {
        for (const TaskRt& t : tasks)
            if (t.t.status != TaskStatus::Completed && t.t.status != TaskStatus::Cancelled)
                return false;
        return true;
    }

    // ---------------------------------------------------------------- events
    void apply_events() {
        for (size_t i = 0; i < sc.events.size(); ++i) {
            const Event& e = sc.events[i];
            if (event_applied[i] || e.at > clock + kEps) continue;
            event_applied[i] = 1;
            switch (e.kind) {
                case EventKind::ReleaseTask: {
                    TaskRt* t = task(e.task_id);
                    if (t->t.status == TaskStatus::Unreleased) {
                        t->t.status = TaskStatus::Open;
                        t->t.release_time = std::min(t->t.release_time, e.at);
                    } else {
                        warn("release event: task " + std::to_string(e.task_id) +
                             " already released");
                    }
                    break;
                }
                case EventKind::CancelTask: {
                    TaskRt* t = task(e.task_id);
                    if (t->t.status == TaskStatus::Open || t->t.status == TaskStatus::Assigned) {
                        t->t.status = TaskStatus::Cancelled;
                        t->claimed_by = -1;
                    } else if (t->t.status == TaskStatus::InTransit) {
                        warn("cancel of in-transit task " + std::to_string(e.task_id) +
                             " ignored: goods already loaded");
                    } else {
                        warn("cancel of task " + std::to_string(e.task_id) + " in state " +
                             task_status_name(t->t.status) + " is a no-op");
                    }
                    break;
                }
                case EventKind::HumanWrongTask: {
                    TaskRt* t = task(e.task_id);
                    AgentRt* h = agent(e.agent_id);
                    if (t->t.status != TaskStatus::Open && t->t.status != TaskStatus::Assigned) {
                        warn("human " + std::to_string(e.agent_id) + " cannot take task " +
                             std::to_string(e.task_id) + " in state " +
                             task_status_name(t->t.status));
                        break;
                    }
                    if (h->charging || h->wrong_task >= 0 || h->delivery_task >= 0 ||
                        h->in_service) {
                        warn("human " + std::to_string(e.agent_id) +
                             " is busy; wrong-task event skipped");
                        break;
                    }
                    if (t->t.load > h->st.capacity - h->st.load + kEps) {
                        warn("human " + std::to_string(e.agent_id) + " cannot carry task " +
                             std::to_string(e.task_id) + "; event skipped");
                        break;
                    }
                    h->wrong_task = e.task_id;
                    t->t.status = TaskStatus::Assigned;
                    t->claimed_by = h->st.id;
                    t->stolen = true;
                    if (t->assigned_step < 0) t->assigned_step = boundary_index();
                    break;
                }
                case EventKind::EnergyDrop: {
                    AgentRt* a = agent(e.agent_id);
                    a->st.energy = std::max(0.0, a->st.energy - e.amount);
                    break;
                }
            }
        }
    }

    // ------------------------------------------------------------- boundary
    void update_boundary() {
        const int b = boundary_index();
        BoundaryDecision decision;
        decision.update_step = b;

        apply_events();

        for (TaskRt& t : tasks)
            if (t.t.status == TaskStatus::Unreleased && t.t.release_time <= clock + kEps)
                t.t.status = TaskStatus::Open;

        // a task whose window closed before pickup can never complete
        for (TaskRt& t : tasks) {
            bool pending = t.t.status == TaskStatus::Open ||
                           (t.t.status == TaskStatus::Assigned && !t.stolen);
            if (pending && t.t.window.close < clock - kEps) {
                t.t.status = TaskStatus::Cancelled;
                t.claimed_by = -1;
                warn("task " + std::to_string(t.t.id) + " expired unserved; cancelled at t=" +
                     std::to_string(clock));
            }
        }

        for (AgentRt& a : agents)
            if (a.charging && clock + kEps >= a.charge_until) {
                a.charging = false;
                a.st.energy = a.initial_energy;
            }

        // assigned-but-untouched tasks go back to the pool
        for (TaskRt& t : tasks)
            if (t.t.status == TaskStatus::Assigned && !t.stolen) {
                t.t.status = TaskStatus::Open;
                t.claimed_by = -1;
            }

        // participants; wrong-task humans and depleted agents sit this out
        std::vector<AgentState> graph_agents;
        std::vector<ModeAgent> mode_agents;
        for (AgentRt& a : agents) {
            if (a.wrong_task >= 0) continue;
            ModeAgent ma;
            ma.agent.id = a.st.id;
            ma.agent.kind = a.st.kind;
            ma.agent.speed = a.st.speed;
            ma.energy = a.st.energy;
            ma.energy_threshold = a.st.energy_threshold;
            bool depleted = a.charging || a.st.energy <= a.st.energy_threshold;
            if (depleted) {
                // no graph vertex; the solver pins it to charging mode
                mode_agents.push_back(ma);
                continue;
            }
            AgentState planning = a.st;
            if (a.delivery_task >= 0) {
                const TaskRt* t = task(a.delivery_task);
                double offset;
                if (a.in_service && a.st.position == t->t.destination) {
                    offset = std::max(0.0, a.service_end - clock);
                } else {
                    auto field = bfs_distances(map, a.st.position);
                    double travel =
                        field[map.index_of(t->t.destination)] * map.grid_side() / a.st.speed;
                    double service_left =
                        a.in_service ? std::max(0.0, a.service_end - clock) : 0.0;
                    offset = service_left + travel + t->t.service_time;
                }
                planning.position = t->t.destination;
                ma.agent.start_offset = offset;
                ma.forced_mode = AgentMode::DeliveryMode;
                // delivery goods leave at the destination; pickups stay aboard
                double load_kept = a.st.load;
                if (!a.in_service || a.service_task != a.delivery_task)
                    load_kept = std::max(0.0, a.st.load - t->t.load);
                ma.agent.capacity_left = std::max(0.0, a.st.capacity - load_kept);
            } else {
                ma.agent.start_offset =
                    a.in_service ? std::max(0.0, a.service_end - clock) : 0.0;
                ma.agent.capacity_left =
                    std::max(0.0, a.st.capacity - a.st.load - pending_service_load(a));
            }
            graph_agents.push_back(planning);
            mode_agents.push_back(ma);
        }

        std::vector<Task> pool;
        for (const TaskRt& t : tasks) {
            if (t.stolen) continue;
            if (t.t.release_time > clock + kEps) continue;
            if (t.t.window.close < clock - kEps) continue;
            if (t.t.status == TaskStatus::Open || t.t.status == TaskStatus::Assigned)
                pool.push_back(t.t);
        }
        std::vector<AllocTask> alloc_tasks;
        for (const Task& t : pool) {
            AllocTask at;
            at.id = t.id;
            at.mode = t.mode;
            at.window_open = std::max(0.0, t.window.open - clock);
            at.window_close = t.window.close - clock;
            at.load = t.load;
            at.service_time = t.service_time;
            at.human_only = t.human_only;
            at.robot_only = t.robot_only;
            alloc_tasks.push_back(at);
        }

        AllocParams ap;
        ap.alpha = sc.params.alpha;
        ap.gamma = sc.params.gamma;
        ap.big_m = sc.params.big_m;
        ap.horizon = sc.params.horizon;

        auto t0 = std::chrono::steady_clock::now();
        TaskGraph g = build_task_graph(map, graph_agents, pool);
        AllocationResult result = solve_mode_allocation(g, mode_agents, alloc_tasks, ap);
        std::vector<AgentChain> chains = extract_sequences(g, result);
        auto t1 = std::chrono::steady_clock::now();
        out.metrics.solver_ms_per_update.push_back(
            std::chrono::duration<double, std::milli>(t1 - t0).count());

        for (const AgentChain& c : chains) {
            AgentRt* a = agent(c.agent_id);
            a->st.mode = c.mode;
            a->st.task_chain = c.task_ids;
            if (c.mode == AgentMode::ChargingMode && !a->charging) {
                a->charging = true;
                a->charge_until = clock + sc.params.charge_duration;
            }
            for (int id : c.task_ids) {
                TaskRt* t = task(id);
                t->t.status = TaskStatus::Assigned;
                t->claimed_by = c.agent_id;
                if (t->assigned_step < 0) t->assigned_step = b;
            }
        }
        decision.chains = chains;
        out.boundaries.push_back(decision);

        if (out.metrics.all_assigned_step < 0) {
            bool all = true;
            for (const TaskRt& t : tasks)
                if (t.t.status == TaskStatus::Unreleased || t.t.status == TaskStatus::Open)
                    all = false;
            if (all) out.metrics.all_assigned_step = b;
        }

        rebuild_agendas();
    }

    // load that will come aboard when the running service finishes
    double pending_service_load(const AgentRt& a) const {
        if (!a.in_service || a.service_task < 0) return 0.0;
        for (const TaskRt& t : tasks)
            if (t.t.id == a.service_task) return t.t.load;
        return 0.0;
    }

    // --------------------------------------------------------------- agenda
    PlanTask to_plan_task(const Task& t) const {
        PlanTask pt;
        pt.id = t.id;
        pt.mode = t.mode;
        pt.origin = t.origin;
        pt.destination = t.destination;
        pt.window_open = t.window.open;
        pt.window_close = t.window.close;
        pt.service_time = t.service_time;
        return pt;
    }

    void rebuild_agendas() {
        const int now_step = tick;
        std::vector<RobotPlanRequest> requests;
        std::vector<Position> static_obstacles;

        for (AgentRt& a : agents) {
            a.errands.clear();
            a.errand_idx = 0;
            a.timeline.clear();
            a.timeline_idx = 0;
            a.held = false;
            a.park_target.reset();

            std::vector<PlanTask> chain;
            if (!a.charging) {
                if (a.wrong_task >= 0) {
                    const TaskRt* t = task(a.wrong_task);
                    PlanTask pt = to_plan_task(t->t);
                    pt.skip_origin = t->t.status == TaskStatus::InTransit;
                    chain.push_back(pt);
                } else {
                    if (a.delivery_task >= 0) {
                        PlanTask pt = to_plan_task(task(a.delivery_task)->t);
                        pt.skip_origin = true;
                        chain.push_back(pt);
                    }
                    for (int id : a.st.task_chain)
                        if (id != a.delivery_task) chain.push_back(to_plan_task(task(id)->t));
                }
            }

            bool will_carry_pickups = !a.carrying.empty() ||
                                      (a.in_service && a.service_task >= 0 &&
                                       task(a.service_task)->t.mode == TaskMode::Pickup);
            for (const PlanTask& t : chain)
                if (t.mode == TaskMode::Pickup) will_carry_pickups = true;
            bool to_wh = false;
            if (!a.charging && will_carry_pickups) {
                if (a.wrong_task >= 0 || a.st.mode == AgentMode::PickupMode) to_wh = true;
            }

            for (const PlanTask& t : chain) {
                if (!t.skip_origin)
                    a.errands.push_back({LegPurpose::TaskOrigin, t.id, t.origin});
                if (t.mode == TaskMode::Delivery)
                    a.errands.push_back({LegPurpose::TaskDestination, t.id, t.destination});
            }
            if (to_wh) a.errands.push_back({LegPurpose::WarehouseDrop, -1, warehouse});

            if (a.is_robot()) {
                RobotPlanRequest req;
                req.robot_id = a.st.id;
                req.start = a.st.position;
                req.mode = a.st.mode;
                req.chain = chain;
                req.to_warehouse = to_wh;
                req.ready_step =
                    a.in_service ? std::max(now_step, ceil_ticks(a.service_end, phi)) : now_step;
                requests.push_back(req);
            } else if (a.charging || (a.errands.empty() && !map.is_endpoint(a.st.position))) {
                // humans that will stand still all horizon are fixed obstacles
                static_obstacles.push_back(a.st.position);
            }
        }

        PlanSet plans = plan_all(g2, requests, now_step, phi, static_obstacles);

        for (AgentRt& a : agents) {
            if (!a.is_robot()) continue;
            if (std::count(plans.held_robots.begin(), plans.held_robots.end(), a.st.id)) {
                a.held = true;
                a.errands.clear();
                continue;
            }
            a.errands.clear();
            bool first = true;
            for (const PathPlan& p : plans.plans) {
                if (p.robot_id != a.st.id) continue;
                int tid = p.purpose == LegPurpose::WarehouseDrop ||
                                  p.purpose == LegPurpose::Park
                              ? -1
                              : p.task_id;
                a.errands.push_back({p.purpose, tid, p.cells.back().pos});
                int e = static_cast<int>(a.errands.size()) - 1;
                for (size_t i = first ? 0 : 1; i < p.cells.size(); ++i)
                    a.timeline.push_back({p.cells[i].pos, e});
                first = false;
            }
        }
    }

    // -------------------------------------------------------------- service
    const Errand* current_errand(const AgentRt& a) const {
        if (a.errand_idx >= a.errands.size()) return nullptr;
        return &a.errands[a.errand_idx];
    }

    // standing on the current errand goal at a tick boundary: start or
    // progress whatever the errand requires
    void tick_goal_state(AgentRt& a, std::string& action) {
        const Errand* e = current_errand(a);
        if (!e || a.st.position != e->goal) {
            a.waiting_window = false;
            return;
        }
        switch (e->purpose) {
            case LegPurpose::TaskOrigin: {
                TaskRt* t = task(e->task_id);
                bool mine = t->claimed_by == a.st.id || t->claimed_by == -1;
                if (t->t.status != TaskStatus::Assigned || !mine) {
                    advance_errand(a); // cancelled or taken by someone else
                    break;
                }
                if (clock + kEps < t->t.window.open) {
                    a.waiting_window = true;
                    action = "wait";
                    break;
                }
                a.waiting_window = false;
                if (clock > t->t.window.close + kEps) {
                    out.metrics.window_violations++;
                    t->t.status = TaskStatus::Cancelled;
                    t->claimed_by = -1;
                    warn("task " + std::to_string(t->t.id) + " window missed at its origin");
                    if (a.wrong_task == t->t.id) a.wrong_task = -1;
                    advance_errand(a);
                    break;
                }
                a.in_service = true;
                a.service_task = t->t.id;
                a.service_end = clock + t->t.service_time;
                t->t.status = TaskStatus::InTransit;
                t->claimed_by = a.st.id;
                t->pickup_time = clock;
                action = "service";
                break;
            }
            case LegPurpose::TaskDestination: {
                TaskRt* t = task(e->task_id);
                if (t->t.status != TaskStatus::InTransit || a.delivery_task != t->t.id) {
                    advance_errand(a);
                    break;
                }
                a.in_service = true;
                a.service_task = t->t.id;
                a.service_end = clock + t->t.service_time;
                action = "service";
                break;
            }
            case LegPurpose::WarehouseDrop: {
                for (int id : a.carrying) {
                    TaskRt* t = task(id);
                    t->t.status = TaskStatus::Completed;
                    t->completed_time = clock;
                    t->completed_by = a.st.id;
                    out.metrics.tasks_completed++;
                    if (a.wrong_task == id) a.wrong_task = -1;
                }
                if (!a.carrying.empty()) action = "unload";
                a.carrying.clear();
                a.st.load = 0.0;
                advance_errand(a);
                break;
            }
            case LegPurpose::Park:
                advance_errand(a);
                break;
        }
    }

    void advance_errand(AgentRt& a) {
        a.waiting_window = false;
        ++a.errand_idx;
    }

    // complete a running service once the clock reaches its end
    void settle_service(AgentRt& a) {
        if (!a.in_service || clock + kEps < a.service_end) return;
        TaskRt* t = task(a.service_task);
        const Errand* e = current_errand(a);
        bool at_origin = e && e->purpose == LegPurpose::TaskOrigin;
        if (at_origin) {
            a.st.load += t->t.load;
            if (t->t.mode == TaskMode::Pickup)
                a.carrying.push_back(t->t.id);
            else
                a.delivery_task = t->t.id;
        } else {
            a.st.load = std::max(0.0, a.st.load - t->t.load);
            t->t.status = TaskStatus::Completed;
            t->completed_time = a.service_end;
            t->completed_by = a.st.id;
            out.metrics.tasks_completed++;
            a.delivery_task = -1;
            if (a.wrong_task == t->t.id) a.wrong_task = -1;
        }
        a.in_service = false;
        a.service_task = -1;
        advance_errand(a);
    }

    // ------------------------------------------------------------ movement
    struct CommittedMove {
        Position from, to;
    };

    bool sensing_blocked(const AgentRt& a, const std::map<Position, int>& occupied_pre) const {
        int checked = 0;
        for (size_t i = a.timeline_idx + 1; i < a.timeline.size() && checked < 2; ++i) {
            Position p = a.timeline[i].pos;
            if (p == a.timeline[i - 1].pos) continue; // waits cover no distance
            auto it = occupied_pre.find(p);
            if (it != occupied_pre.end() && it->second != a.st.id) return true;
            ++checked;
        }
        return false;
    }

    bool try_commit(AgentRt& a, Position target, std::map<Position, int>& occupied_now,
                    std::vector<CommittedMove>& committed) {
        if (occupied_now.count(target)) return false;
        for (const CommittedMove& m : committed)
            if (m.from == target && m.to == a.st.position) return false; // swap
        occupied_now.erase(a.st.position);
        occupied_now[target] = a.st.id;
        committed.push_back({a.st.position, target});
        if (auto h = heading_between(a.st.position, target)) a.st.heading = *h;
        a.st.position = target;
        a.st.energy = std::max(0.0, a.st.energy - sc.params.energy_per_move);
        if (a.is_robot()) out.metrics.total_robot_distance += map.grid_side();
        return true;
    }

    // consume hold entries that belong to already-finished errands
    void skip_stale_holds(AgentRt& a) {
        while (a.timeline_idx + 1 < a.timeline.size() &&
               a.timeline[a.timeline_idx + 1].pos == a.st.position &&
               a.timeline[a.timeline_idx + 1].errand >= 0 &&
               static_cast<size_t>(a.timeline[a.timeline_idx + 1].errand) < a.errand_idx)
            ++a.timeline_idx;
    }

    void sync_errand(AgentRt& a) {
        int tag = a.timeline[a.timeline_idx].errand;
        if (tag >= 0 && static_cast<size_t>(tag) > a.errand_idx)
            a.errand_idx = static_cast<size_t>(tag);
    }

    std::string robot_move(AgentRt& a, const std::map<Position, int>& occupied_pre,
                           std::map<Position, int>& occupied_now,
                           std::vector<CommittedMove>& committed) {
        skip_stale_holds(a);
        if (a.timeline_idx + 1 >= a.timeline.size()) return "idle";
        const TimelineEntry& next = a.timeline[a.timeline_idx + 1];
        if (next.pos == a.st.position) {
            ++a.timeline_idx;
            sync_errand(a);
            out.metrics.total_wait_steps++;
            return "wait";
        }
        if (sensing_blocked(a, occupied_pre) ||
            !try_commit(a, next.pos, occupied_now, committed)) {
            out.metrics.total_wait_steps++;
            return "blocked";
        }
        ++a.timeline_idx;
        sync_errand(a);
        return "move";
    }

    Position pick_human_park(const AgentRt& a) const {
        int min_dist = map.at(a.st.position) == CellKind::Warehouse ? 2 : 1;
        auto field = bfs_distances(map, a.st.position);
        std::vector<std::pair<int, Position>> cands;
        for (Position p : map.passable_cells()) {
            int d = field[map.index_of(p)];
            if (d < min_dist || map.at(p) != CellKind::Road) continue;
            cands.push_back({d, p});
        }
        std::sort(cands.begin(), cands.end(), [](const auto& x, const auto& y) {
            if (x.first != y.first) return x.first < y.first;
            if (x.second.row != y.second.row) return x.second.row < y.second.row;
            return x.second.col < y.second.col;
        });
        for (const auto& [d, p] : cands) {
            bool occupied = false;
            for (const AgentRt& other : agents)
                if (other.st.id != a.st.id && other.st.position == p) occupied = true;
            if (!occupied) return p;
        }
        return a.st.position;
    }

    // one step of a breadth-first route around the other agents
    Position bfs_first_step(const AgentRt& a, Position target,
                            const std::map<Position, int>& occupied_now) const {
        const int start_idx = map.index_of(a.st.position);
        std::vector<int> parent(static_cast<size_t>(map.width()) * map.height(), -2);
        std::vector<int> queue;
        parent[start_idx] = -1;
        queue.push_back(start_idx);
        size_t head = 0;
        const int target_idx = map.index_of(target);
        while (head < queue.size()) {
            int pi = queue[head++];
            if (pi == target_idx) break;
            Position p{pi % map.width() + 1, pi / map.width() + 1};
            for (Position q : neighbors(map, p)) {
                int qi = map.index_of(q);
                if (parent[qi] != -2) continue;
                auto it = occupied_now.find(q);
                if (it != occupied_now.end() && it->second != a.st.id) continue;
                parent[qi] = pi;
                queue.push_back(qi);
            }
        }
        if (parent[target_idx] == -2) return a.st.position; // no route right now
        int cur = target_idx;
        while (parent[cur] != start_idx && parent[cur] != -1) cur = parent[cur];
        if (parent[cur] == -1) return a.st.position; // already there
        return {cur % map.width() + 1, cur / map.width() + 1};
    }

    std::string human_move(AgentRt& a, std::map<Position, int>& occupied_now,
                           std::vector<CommittedMove>& committed) {
        Position target;
        const Errand* e = current_errand(a);
        if (e) {
            target = e->goal;
        } else {
            if (!a.park_target && map.is_endpoint(a.st.position))
                a.park_target = pick_human_park(a);
            if (!a.park_target) return "idle";
            target = *a.park_target;
        }
        if (target == a.st.position) {
            a.park_target.reset();
            return "idle";
        }
        Position step = bfs_first_step(a, target, occupied_now);
        if (step == a.st.position || !try_commit(a, step, occupied_now, committed)) {
            out.metrics.total_wait_steps++;
            return "blocked";
        }
        if (a.park_target && a.st.position == *a.park_target) a.park_target.reset();
        return "move";
    }

    // ----------------------------------------------------------------- tick
    void step_agents() {
        std::map<Position, int> occupied_pre;
        for (const AgentRt& a : agents) occupied_pre[a.st.position] = a.st.id;
        std::map<Position, int> occupied_now = occupied_pre;
        std::vector<CommittedMove> committed;

        for (AgentRt& a : agents) {
            if (a.charging) {
                record(a, "idle", -1);
                continue;
            }

            settle_service(a);
            std::string action = "idle";
            if (!a.in_service) tick_goal_state(a, action);

            if (a.in_service) {
                // consume the planned hold that models this service tick
                if (a.timeline_idx + 1 < a.timeline.size() &&
                    a.timeline[a.timeline_idx + 1].pos == a.st.position)
                    ++a.timeline_idx;
                record(a, "service", a.service_task);
                continue;
            }
            if (a.waiting_window) {
                if (a.timeline_idx + 1 < a.timeline.size() &&
                    a.timeline[a.timeline_idx + 1].pos == a.st.position)
                    ++a.timeline_idx;
                out.metrics.total_wait_steps++;
                record(a, "wait", current_errand(a) ? current_errand(a)->task_id : -1);
                continue;
            }
            if (action == "unload") {
                record(a, "unload", -1);
                continue;
            }

            int context = current_errand(a) ? current_errand(a)->task_id : -1;
            std::string verb = a.is_robot()
                                   ? robot_move(a, occupied_pre, occupied_now, committed)
                                   : human_move(a, occupied_now, committed);
            if (verb == "move") {
                // warehouse unloads happen the instant the robot docks
                const Errand* e = current_errand(a);
                if (e && a.st.position == e->goal &&
                    (e->purpose == LegPurpose::WarehouseDrop || e->purpose == LegPurpose::Park)) {
                    double land_clock = clock + phi;
                    if (e->purpose == LegPurpose::WarehouseDrop) {
                        for (int id : a.carrying) {
                            TaskRt* t = task(id);
                            t->t.status = TaskStatus::Completed;
                            t->completed_time = land_clock;
                            t->completed_by = a.st.id;
                            out.metrics.tasks_completed++;
                            if (a.wrong_task == id) a.wrong_task = -1;
                        }
                        if (!a.carrying.empty()) verb = "unload";
                        a.carrying.clear();
                        a.st.load = 0.0;
                    }
                    advance_errand(a);
                }
            }
            record(a, verb, context);
        }

        std::set<Position> seen;
        for (const AgentRt& a : agents)
            if (!seen.insert(a.st.position).second) out.metrics.collisions++;
    }

    void record(const AgentRt& a, const std::string& action, int task_id) {
        if (!opts.record_trace) return;
        out.trace.push_back({tick + 1, a.st.id, a.st.kind, a.st.position, a.st.mode, a.st.load,
                             action, task_id});
    }

    void record_initial() {
        if (!opts.record_trace) return;
        for (const AgentRt& a : agents)
            out.trace.push_back(
                {0, a.st.id, a.st.kind, a.st.position, a.st.mode, a.st.load, "idle", -1});
    }

    RunResult go() {
        record_initial();
        const int ticks_per_update = sc.params.steps_per_update();
        const long max_ticks = static_cast<long>(opts.max_update_steps) * ticks_per_update;

        while (true) {
            if (all_resolved()) {
                out.metrics.completion_step =
                    static_cast<int>(std::ceil(clock / sc.params.update_period - kEps));
                break;
            }
            if (tick >= max_ticks) {
                out.metrics.timed_out = true;
                break;
            }
            if (tick % ticks_per_update == 0) update_boundary();
            step_agents();
            ++tick;
            clock = tick * phi;
        }

        for (const TaskRt& t : tasks) {
            TaskMetric m;
            m.id = t.t.id;
            m.assigned_step = t.assigned_step;
            m.agent = t.completed_by;
            if (t.completed_time >= 0.0)
                m.completed_step = static_cast<int>(
                    std::ceil(t.completed_time / sc.params.update_period - kEps));
            out.metrics.per_task.push_back(m);
            if (t.t.status == TaskStatus::Cancelled) out.metrics.tasks_cancelled++;
        }
        return std::move(out);
    }
};

} // namespace

RunResult run(const Scenario& scenario, const RunOptions& options) {
    auto violations = validate_scenario(scenario);
    if (!violations.empty()) {
        std::string msg = "scenario invalid:";
        for (const Violation& v : violations) msg += "\n  [" + v.code + "] " + v.message;
        throw std::invalid_argument(msg);
    }
    Sim sim(scenario, options);
    return sim.go();
}

// ---------------------------------------------------------------------------
// Trace serialization and validation
// ---------------------------------------------------------------------------

namespace {

std::string format_load(double load) {
    if (std::fabs(load - std::round(load)) < 1e-9)
        return std::to_string(static_cast<long long>(std::llround(load)));
    std::ostringstream os;
    os << load;
    return os.str();
}

} // namespace

std::string trace_to_csv(const Trace& trace) {
    std::ostringstream os;
    for (const TraceRecord& r : trace) {
        os << r.step << ',' << r.agent_id << ',' << agent_kind_name(r.kind) << ',' << r.pos.col
           << ',' << r.pos.row << ',' << agent_mode_name(r.mode) << ',' << format_load(r.load)
           << ',' << r.action << ',' << r.task_id << '\n';
    }
    return os.str();
}

Trace trace_from_csv(const std::string& text) {
    Trace trace;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ls, field, ',')) fields.push_back(field);
        if (fields.size() != 9)
            throw std::invalid_argument("trace line " + std::to_string(lineno) +
                                        ": expected 9 fields, got " +
                                        std::to_string(fields.size()));
        TraceRecord r;
        r.step = std::stoi(fields[0]);
        r.agent_id = std::stoi(fields[1]);
        r.kind = fields[2] == "robot" ? AgentKind::Robot : AgentKind::Human;
        r.pos = {std::stoi(fields[3]), std::stoi(fields[4])};
        if (fields[5] == "pickup")
            r.mode = AgentMode::PickupMode;
        else if (fields[5] == "delivery")
            r.mode = AgentMode::DeliveryMode;
        else
            r.mode = AgentMode::ChargingMode;
        r.load = std::stod(fields[6]);
        r.action = fields[7];
        r.task_id = std::stoi(fields[8]);
        trace.push_back(r);
    }
    return trace;
}

std::vector<TraceViolation> validate_trace(const Trace& trace, const Scenario& scenario) {
    std::vector<TraceViolation> out;
    std::map<int, std::map<int, TraceRecord>> by_step;
    for (const TraceRecord& r : trace) by_step[r.step][r.agent_id] = r;

    std::map<int, double> capacity;
    for (const AgentState& a : scenario.agents) capacity[a.id] = a.capacity;

    for (auto& [step, recs] : by_step) {
        std::map<Position, int> cells;
        for (auto& [id, r] : recs) {
            auto [it, fresh] = cells.try_emplace(r.pos, id);
            if (!fresh)
                out.push_back({step, "agents " + std::to_string(it->second) + " and " +
                                         std::to_string(id) + " share cell (" +
                                         std::to_string(r.pos.col) + "," +
                                         std::to_string(r.pos.row) + ")"});
            if (capacity.count(id) && r.load > capacity[id] + 1e-9)
                out.push_back({step, "agent " + std::to_string(id) + " load " +
                                         format_load(r.load) + " exceeds capacity"});
        }
        auto prev = by_step.find(step - 1);
        if (prev == by_step.end()) continue;
        for (auto& [id_a, ra] : recs) {
            for (auto& [id_b, rb] : recs) {
                if (id_a >= id_b) continue;
                auto pa = prev->second.find(id_a);
                auto pb = prev->second.find(id_b);
                if (pa == prev->second.end() || pb == prev->second.end()) continue;
                if (pa->second.pos == rb.pos && pb->second.pos == ra.pos &&
                    !(pa->second.pos == ra.pos))
                    out.push_back({step, "agents " + std::to_string(id_a) + " and " +
                                             std::to_string(id_b) + " swap cells"});
            }
        }
    }

    // a service row at step s means the service started at (s-1)*phi; the
    // first such row at a task's origin is the pickup instant
    std::map<int, const Task*> task_by_id;
    for (const Task& t : scenario.tasks) task_by_id[t.id] = &t;
    std::map<int, int> first_service;
    for (const TraceRecord& r : trace) {
        if (r.action != "service" || r.task_id < 0) continue;
        auto it = task_by_id.find(r.task_id);
        if (it == task_by_id.end() || r.pos != it->second->origin) continue;
        auto [fit, fresh] = first_service.try_emplace(r.task_id, r.step);
        if (!fresh) fit->second = std::min(fit->second, r.step);
    }
    for (auto& [id, step] : first_service) {
        const Task* t = task_by_id[id];
        double instant = (step - 1) * scenario.params.phi;
        if (instant < t->window.open - 1e-9 || instant > t->window.close + 1e-9)
            out.push_back({step, "task " + std::to_string(id) + " picked up at t=" +
                                     std::to_string(instant) + " outside window [" +
                                     std::to_string(t->window.open) + "," +
                                     std::to_string(t->window.close) + "]"});
    }
    return out;
}

} // namespace hs2pd
