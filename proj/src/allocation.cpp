#include "hs2pd/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hs2pd {

namespace {

constexpr double kTieEps = 1e-9;
constexpr double kInf = std::numeric_limits<double>::infinity();

int task_vertex(const TaskGraph& g, const AllocTask& t) {
    return t.mode == TaskMode::Pickup ? g.pickup_vertex(t.id) : g.delivery_origin_vertex(t.id);
}

std::vector<AllocAgent> sorted_by_id(std::vector<AllocAgent> agents) {
    std::sort(agents.begin(), agents.end(),
              [](const AllocAgent& a, const AllocAgent& b) { return a.id < b.id; });
    return agents;
}

std::vector<AllocTask> sorted_by_id(std::vector<AllocTask> tasks) {
    std::sort(tasks.begin(), tasks.end(),
              [](const AllocTask& a, const AllocTask& b) { return a.id < b.id; });
    return tasks;
}

// Dearer-kind cost of one leg; monotone in distance, so the nearest agent
// also minimises it.
double max_kind_cost(const AllocTask& t, double distance_m, const AllocParams& p) {
    return std::max(edge_cost(AgentKind::Robot, t, distance_m, p.alpha, p.big_m),
                    edge_cost(AgentKind::Human, t, distance_m, p.alpha, p.big_m));
}

double warehouse_leg_cost(double distance_m, const AllocParams& p) {
    return std::max(edge_cost(AgentKind::Robot, false, false, distance_m, p.alpha, p.big_m),
                    edge_cost(AgentKind::Human, false, false, distance_m, p.alpha, p.big_m));
}

} // namespace

double edge_cost(AgentKind kind, bool human_only, bool robot_only, double distance_m,
                 double alpha, double big_m) {
    if (!std::isfinite(distance_m)) return kInf; // unreachable: exclude from search
    if (kind == AgentKind::Robot)
        return alpha * distance_m + big_m * (human_only ? 1.0 : 0.0);
    return (1.0 - alpha) * distance_m + big_m * (robot_only ? 1.0 : 0.0);
}

double edge_cost(AgentKind kind, const AllocTask& target, double distance_m, double alpha,
                 double big_m) {
    return edge_cost(kind, target.human_only, target.robot_only, distance_m, alpha, big_m);
}

double unassigned_penalty(const TaskGraph& g, const AllocTask& task, const AllocParams& params) {
    int tv = task_vertex(g, task);
    double nearest = 0.0;
    bool any = false;
    for (int i = 0; i < g.size(); ++i)
        if (g.vertices()[i].kind == VertexKind::Agent) {
            double d = g.distance(i, tv);
            if (!any || d < nearest) nearest = d;
            any = true;
        }
    double penalty = max_kind_cost(task, any ? nearest : 0.0, params);
    if (task.mode == TaskMode::Pickup)
        penalty += warehouse_leg_cost(g.distance(tv, g.warehouse_vertex()), params);
    return penalty;
}

std::optional<ArrivalSchedule> check_time_feasibility(const TaskGraph& g,
                                                      const std::vector<AllocTask>& chain,
                                                      int start_vertex, double start_time,
                                                      double speed, double horizon) {
    if (speed <= 0.0) throw std::invalid_argument("check_time_feasibility: speed must be positive");
    ArrivalSchedule sched;
    sched.arrival.reserve(chain.size());
    sched.wait.reserve(chain.size());
    int at = start_vertex;
    double ready = start_time; // departure-ready instant at the current vertex
    for (const AllocTask& t : chain) {
        int tv = task_vertex(g, t);
        double travel = g.distance(at, tv) / speed;
        double physical = ready + travel;
        double arrival = std::max(t.window_open, physical);
        if (arrival > t.window_close + kTieEps) return std::nullopt;
        if (arrival > horizon + kTieEps) return std::nullopt;
        sched.arrival.push_back(arrival);
        sched.wait.push_back(arrival - physical);
        ready = arrival + t.service_time;
        at = tv;
    }
    return sched;
}

// ---------------------------------------------------------------------------
// Pickup allocation
// ---------------------------------------------------------------------------

namespace {

struct PickupSearch {
    const TaskGraph& g;
    const AllocParams& params;
    std::vector<AllocAgent> agents;
    std::vector<AllocTask> tasks;
    std::vector<int> task_vx;
    std::vector<double> penalty;
    std::vector<double> lower; // min(penalty, cheapest incoming edge) per task

    std::vector<std::vector<int>> chains; // task indices per agent
    std::vector<char> used;
    double acc = 0.0;
    double rem_bound = 0.0;

    double best_obj = kInf;
    std::vector<std::vector<int>> best_chains;
    bool have_best = false;

    PickupSearch(const TaskGraph& graph, std::vector<AllocAgent> ag, std::vector<AllocTask> ts,
                 const AllocParams& pr)
        : g(graph), params(pr), agents(std::move(ag)), tasks(std::move(ts)) {
        task_vx.reserve(tasks.size());
        penalty.reserve(tasks.size());
        for (const AllocTask& t : tasks) {
            task_vx.push_back(task_vertex(g, t));
            penalty.push_back(unassigned_penalty(g, t, params));
        }
        lower.assign(tasks.size(), 0.0);
        for (size_t j = 0; j < tasks.size(); ++j) {
            double min_in = kInf;
            for (const AllocAgent& a : agents) {
                double d0 = g.distance(g.agent_vertex(a.id), task_vx[j]);
                min_in = std::min(min_in,
                                  edge_cost(a.kind, tasks[j], d0, params.alpha, params.big_m));
                for (size_t i = 0; i < tasks.size(); ++i) {
                    if (i == j) continue;
                    double d = g.distance(task_vx[i], task_vx[j]);
                    min_in = std::min(
                        min_in, edge_cost(a.kind, tasks[j], d, params.alpha, params.big_m));
                }
            }
            lower[j] = std::min(penalty[j], min_in);
            rem_bound += lower[j];
        }
        chains.assign(agents.size(), {});
        used.assign(tasks.size(), 0);
    }

    void finalize() {
        double obj = acc;
        for (size_t j = 0; j < tasks.size(); ++j)
            if (!used[j]) obj += penalty[j];
        if (obj < best_obj - kTieEps ||
            (obj <= best_obj + kTieEps && (!have_best || key(chains) < key(best_chains)))) {
            best_obj = std::min(obj, have_best ? best_obj : obj);
            best_chains = chains;
            have_best = true;
        }
    }

    static std::vector<std::vector<int>> key(const std::vector<std::vector<int>>& c) { return c; }

    // Extends agent `a`'s chain or closes it and moves on.
    void dfs(size_t a, int last_vertex, double ready, double load_left) {
        if (acc + rem_bound > best_obj + kTieEps) return;
        if (a == agents.size()) {
            finalize();
            return;
        }
        const AllocAgent& ag = agents[a];
        for (size_t j = 0; j < tasks.size(); ++j) {
            if (used[j]) continue;
            const AllocTask& t = tasks[j];
            if (t.load > load_left + kTieEps) continue;
            double travel = g.distance(last_vertex, task_vx[j]) / ag.speed;
            double arrival = std::max(t.window_open, ready + travel);
            if (arrival > t.window_close + kTieEps || arrival > params.horizon + kTieEps)
                continue;
            double cost = edge_cost(ag.kind, t, g.distance(last_vertex, task_vx[j]),
                                    params.alpha, params.big_m);
            used[j] = 1;
            chains[a].push_back(static_cast<int>(j));
            acc += cost;
            rem_bound -= lower[j];
            dfs(a, task_vx[j], arrival + t.service_time, load_left - t.load);
            rem_bound += lower[j];
            acc -= cost;
            chains[a].pop_back();
            used[j] = 0;
        }
        // close this agent's chain
        size_t next = a + 1;
        if (next == agents.size()) {
            finalize();
        } else {
            dfs(next, g.agent_vertex(agents[next].id), agents[next].start_offset,
                agents[next].capacity_left);
        }
    }

    PickupSolution run() {
        if (agents.empty()) {
            finalize();
        } else {
            dfs(0, g.agent_vertex(agents[0].id), agents[0].start_offset,
                agents[0].capacity_left);
        }

        PickupSolution sol;
        sol.objective = 0.0;
        std::vector<char> assigned(tasks.size(), 0);
        for (size_t a = 0; a < best_chains.size(); ++a) {
            const AllocAgent& ag = agents[a];
            std::vector<AllocTask> chain_tasks;
            for (int j : best_chains[a]) chain_tasks.push_back(tasks[j]);
            auto sched = check_time_feasibility(g, chain_tasks, g.agent_vertex(ag.id),
                                                ag.start_offset, ag.speed, params.horizon);
            int from = g.agent_vertex(ag.id);
            for (size_t k = 0; k < best_chains[a].size(); ++k) {
                int j = best_chains[a][k];
                assigned[j] = 1;
                sol.edges.push_back({ag.id, from, task_vx[j]});
                sol.objective += edge_cost(ag.kind, tasks[j], g.distance(from, task_vx[j]),
                                           params.alpha, params.big_m);
                sol.arrival_times.push_back({tasks[j].id, sched->arrival[k]});
                sol.wait_times.push_back({tasks[j].id, sched->wait[k]});
                from = task_vx[j];
            }
        }
        for (size_t j = 0; j < tasks.size(); ++j)
            if (!assigned[j]) {
                sol.unassigned.push_back(tasks[j].id);
                sol.objective += penalty[j];
            }
        return sol;
    }
};

} // namespace

PickupSolution solve_pickup_allocation(const TaskGraph& g, const std::vector<AllocAgent>& agents,
                                       const std::vector<AllocTask>& tasks,
                                       const AllocParams& params) {
    for (const AllocTask& t : tasks)
        if (t.mode != TaskMode::Pickup)
            throw std::invalid_argument("solve_pickup_allocation: non-pickup task " +
                                        std::to_string(t.id));
    PickupSearch search(g, sorted_by_id(agents), sorted_by_id(tasks), params);
    return search.run();
}

// ---------------------------------------------------------------------------
// Delivery allocation
// ---------------------------------------------------------------------------

namespace {

struct DeliverySearch {
    const TaskGraph& g;
    const AllocParams& params;
    std::vector<AllocAgent> agents;
    std::vector<AllocTask> tasks;
    std::vector<int> task_vx;
    std::vector<double> penalty;
    std::vector<double> lower;
    std::vector<std::vector<double>> pair_cost;    // [task][agent], inf when infeasible
    std::vector<std::vector<double>> pair_arrival; // [task][agent]

    std::vector<int> choice; // agent index per task, -1 unassigned
    std::vector<char> agent_used;
    double acc = 0.0;
    double rem_bound = 0.0;

    double best_obj = kInf;
    std::vector<int> best_choice;
    bool have_best = false;

    DeliverySearch(const TaskGraph& graph, std::vector<AllocAgent> ag, std::vector<AllocTask> ts,
                   const AllocParams& pr)
        : g(graph), params(pr), agents(std::move(ag)), tasks(std::move(ts)) {
        for (const AllocTask& t : tasks) {
            task_vx.push_back(task_vertex(g, t));
            penalty.push_back(unassigned_penalty(g, t, params));
        }
        pair_cost.assign(tasks.size(), std::vector<double>(agents.size(), kInf));
        pair_arrival.assign(tasks.size(), std::vector<double>(agents.size(), 0.0));
        for (size_t j = 0; j < tasks.size(); ++j) {
            double min_pair = kInf;
            for (size_t a = 0; a < agents.size(); ++a) {
                const AllocAgent& ag2 = agents[a];
                double d = g.distance(g.agent_vertex(ag2.id), task_vx[j]);
                double arrival = std::max(tasks[j].window_open, ag2.start_offset + d / ag2.speed);
                if (arrival > tasks[j].window_close + kTieEps ||
                    arrival > params.horizon + kTieEps)
                    continue;
                pair_cost[j][a] = edge_cost(ag2.kind, tasks[j], d, params.alpha, params.big_m);
                pair_arrival[j][a] = arrival;
                min_pair = std::min(min_pair, pair_cost[j][a]);
            }
            lower.push_back(std::min(penalty[j], min_pair));
            rem_bound += lower.back();
        }
        choice.assign(tasks.size(), -1);
        agent_used.assign(agents.size(), 0);
    }

    std::vector<std::vector<int>> key(const std::vector<int>& ch) const {
        std::vector<std::vector<int>> k(agents.size());
        for (size_t j = 0; j < ch.size(); ++j)
            if (ch[j] >= 0) k[ch[j]].push_back(tasks[j].id);
        return k;
    }

    void dfs(size_t j) {
        if (acc + rem_bound > best_obj + kTieEps) return;
        if (j == tasks.size()) {
            if (acc < best_obj - kTieEps ||
                (acc <= best_obj + kTieEps && (!have_best || key(choice) < key(best_choice)))) {
                best_obj = std::min(acc, have_best ? best_obj : acc);
                best_choice = choice;
                have_best = true;
            }
            return;
        }
        rem_bound -= lower[j];
        for (size_t a = 0; a < agents.size(); ++a) {
            if (agent_used[a] || !std::isfinite(pair_cost[j][a])) continue;
            agent_used[a] = 1;
            choice[j] = static_cast<int>(a);
            acc += pair_cost[j][a];
            dfs(j + 1);
            acc -= pair_cost[j][a];
            choice[j] = -1;
            agent_used[a] = 0;
        }
        acc += penalty[j];
        dfs(j + 1);
        acc -= penalty[j];
        rem_bound += lower[j];
    }

    DeliverySolution run() {
        dfs(0);
        DeliverySolution sol;
        sol.objective = 0.0;
        for (size_t j = 0; j < tasks.size(); ++j) {
            int a = best_choice.empty() ? -1 : best_choice[j];
            if (a >= 0) {
                sol.edges.push_back({agents[a].id, g.agent_vertex(agents[a].id), task_vx[j]});
                sol.arrival_times.push_back({tasks[j].id, pair_arrival[j][a]});
                sol.objective += pair_cost[j][a];
            } else {
                sol.unassigned.push_back(tasks[j].id);
                sol.objective += penalty[j];
            }
        }
        return sol;
    }
};

} // namespace

DeliverySolution solve_delivery_allocation(const TaskGraph& g,
                                           const std::vector<AllocAgent>& agents,
                                           const std::vector<AllocTask>& tasks,
                                           const AllocParams& params) {
    for (const AllocTask& t : tasks)
        if (t.mode != TaskMode::Delivery)
            throw std::invalid_argument("solve_delivery_allocation: non-delivery task " +
                                        std::to_string(t.id));
    DeliverySearch search(g, sorted_by_id(agents), sorted_by_id(tasks), params);
    return search.run();
}

// ---------------------------------------------------------------------------
// Mode allocation
// ---------------------------------------------------------------------------

AgentMode ModeAssignment::mode_of(int agent_id) const {
    for (const auto& [id, m] : modes)
        if (id == agent_id) return m;
    throw std::out_of_range("no mode recorded for agent " + std::to_string(agent_id));
}

AllocationResult solve_mode_allocation(const TaskGraph& g, const std::vector<ModeAgent>& agents,
                                       const std::vector<AllocTask>& tasks,
                                       const AllocParams& params) {
    std::vector<ModeAgent> sorted = agents;
    std::sort(sorted.begin(), sorted.end(),
              [](const ModeAgent& a, const ModeAgent& b) { return a.agent.id < b.agent.id; });

    std::vector<AllocTask> pickups, deliveries;
    for (const AllocTask& t : tasks)
        (t.mode == TaskMode::Pickup ? pickups : deliveries).push_back(t);

    std::vector<size_t> free_idx;
    std::vector<std::pair<int, AgentMode>> fixed;
    for (size_t i = 0; i < sorted.size(); ++i) {
        const ModeAgent& ma = sorted[i];
        if (ma.energy <= ma.energy_threshold) {
            fixed.push_back({ma.agent.id, AgentMode::ChargingMode});
        } else if (ma.forced_mode) {
            fixed.push_back({ma.agent.id, *ma.forced_mode});
        } else {
            free_idx.push_back(i);
        }
    }

    const size_t n = free_idx.size();
    AllocationResult best;
    double best_f = kInf;
    bool have_best = false;

    for (uint64_t mask = 0; mask < (uint64_t{1} << n); ++mask) {
        ModeAssignment assignment;
        std::vector<AllocAgent> pickup_agents, delivery_agents;
        for (const auto& [id, m] : fixed) assignment.modes.push_back({id, m});
        for (size_t k = 0; k < n; ++k) {
            const ModeAgent& ma = sorted[free_idx[k]];
            bool delivery = (mask >> (n - 1 - k)) & 1; // agent with lowest id = high bit
            assignment.modes.push_back(
                {ma.agent.id, delivery ? AgentMode::DeliveryMode : AgentMode::PickupMode});
        }
        std::sort(assignment.modes.begin(), assignment.modes.end());
        for (const ModeAgent& ma : sorted) {
            AgentMode m = assignment.mode_of(ma.agent.id);
            if (m == AgentMode::PickupMode) pickup_agents.push_back(ma.agent);
            if (m == AgentMode::DeliveryMode) delivery_agents.push_back(ma.agent);
        }

        PickupSolution p = solve_pickup_allocation(g, pickup_agents, pickups, params);
        DeliverySolution d = solve_delivery_allocation(g, delivery_agents, deliveries, params);
        double f = p.objective + params.gamma * d.objective;
        // masks run in lexicographic vector order, so first-at-tie wins
        if (!have_best || f < best_f - kTieEps) {
            best_f = f;
            best.modes = assignment;
            best.pickup = std::move(p);
            best.delivery = std::move(d);
            best.objective = f;
            have_best = true;
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// Sequence extraction
// ---------------------------------------------------------------------------

std::vector<AgentChain> extract_sequences(const TaskGraph& g, const AllocationResult& result) {
    std::vector<AgentChain> out;
    for (const auto& [agent_id, mode] : result.modes.modes) {
        AgentChain chain;
        chain.agent_id = agent_id;
        chain.mode = mode;
        if (mode == AgentMode::ChargingMode) {
            out.push_back(chain);
            continue;
        }
        const auto& edges =
            mode == AgentMode::PickupMode ? result.pickup.edges : result.delivery.edges;
        std::vector<SelectedEdge> mine;
        for (const SelectedEdge& e : edges)
            if (e.agent_id == agent_id) mine.push_back(e);

        int at = g.agent_vertex(agent_id);
        std::vector<char> consumed(mine.size(), 0);
        std::vector<char> visited(g.size(), 0);
        visited[at] = 1;
        for (size_t step = 0; step < mine.size(); ++step) {
            int next = -1;
            for (size_t e = 0; e < mine.size(); ++e) {
                if (consumed[e] || mine[e].from_vertex != at) continue;
                if (next != -1)
                    throw std::logic_error("agent " + std::to_string(agent_id) +
                                           " has branching edges at vertex " +
                                           std::to_string(at));
                next = static_cast<int>(e);
            }
            if (next == -1)
                throw std::logic_error("agent " + std::to_string(agent_id) +
                                       " has disconnected edges (no edge leaves vertex " +
                                       std::to_string(at) + ")");
            consumed[next] = 1;
            at = mine[next].to_vertex;
            if (visited[at])
                throw std::logic_error("agent " + std::to_string(agent_id) +
                                       " has a cyclic edge set through vertex " +
                                       std::to_string(at));
            visited[at] = 1;
            chain.task_ids.push_back(g.vertices()[at].id);
        }
        chain.to_warehouse = mode == AgentMode::PickupMode && !chain.task_ids.empty();
        out.push_back(chain);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Independent solution re-checks
// ---------------------------------------------------------------------------

namespace {

const AllocTask* find_task(const std::vector<AllocTask>& tasks, int id) {
    for (const AllocTask& t : tasks)
        if (t.id == id) return &t;
    return nullptr;
}

double time_of(const std::vector<TaskTime>& times, int id) {
    for (const TaskTime& t : times)
        if (t.task_id == id) return t.value;
    return std::numeric_limits<double>::quiet_NaN();
}

} // namespace

std::vector<std::string> check_pickup_solution(const TaskGraph& g,
                                               const std::vector<AllocAgent>& agents,
                                               const std::vector<AllocTask>& tasks,
                                               const AllocParams& params,
                                               const PickupSolution& sol) {
    std::vector<std::string> bad;
    std::vector<char> incoming(g.size(), 0);
    for (const SelectedEdge& e : sol.edges) {
        const Vertex& to = g.vertices()[e.to_vertex];
        if (to.kind != VertexKind::PickupStart) {
            bad.push_back("edge enters a non-task vertex");
            continue;
        }
        if (incoming[e.to_vertex]++)
            bad.push_back("task " + std::to_string(to.id) + " has two incoming edges");
    }

    double recomputed = 0.0;
    for (const AllocAgent& a : sorted_by_id(agents)) {
        // rebuild this agent's chain
        std::vector<AllocTask> chain;
        int at = g.agent_vertex(a.id);
        bool progress = true;
        double load = 0.0;
        while (progress) {
            progress = false;
            for (const SelectedEdge& e : sol.edges) {
                if (e.agent_id != a.id || e.from_vertex != at) continue;
                const AllocTask* t = find_task(tasks, g.vertices()[e.to_vertex].id);
                if (!t) {
                    bad.push_back("edge targets unknown task");
                    return bad;
                }
                recomputed +=
                    edge_cost(a.kind, *t, g.distance(at, e.to_vertex), params.alpha, params.big_m);
                load += t->load;
                chain.push_back(*t);
                at = e.to_vertex;
                progress = true;
                break;
            }
        }
        if (load > a.capacity_left + kTieEps)
            bad.push_back("agent " + std::to_string(a.id) + " chain load " + std::to_string(load) +
                          " exceeds capacity " + std::to_string(a.capacity_left));
        auto sched = check_time_feasibility(g, chain, g.agent_vertex(a.id), a.start_offset,
                                            a.speed, params.horizon);
        if (!sched) {
            bad.push_back("agent " + std::to_string(a.id) + " chain is time-infeasible");
            continue;
        }
        for (size_t k = 0; k < chain.size(); ++k) {
            double th = time_of(sol.arrival_times, chain[k].id);
            double tw = time_of(sol.wait_times, chain[k].id);
            if (std::fabs(th - sched->arrival[k]) > kTieEps)
                bad.push_back("task " + std::to_string(chain[k].id) + " arrival mismatch");
            if (std::fabs(tw - sched->wait[k]) > kTieEps)
                bad.push_back("task " + std::to_string(chain[k].id) + " wait mismatch");
            if (th < chain[k].window_open - kTieEps || th > chain[k].window_close + kTieEps)
                bad.push_back("task " + std::to_string(chain[k].id) + " outside its window");
            if (th < -kTieEps || th > params.horizon + kTieEps)
                bad.push_back("task " + std::to_string(chain[k].id) + " outside the horizon");
        }
    }
    for (size_t j = 0; j < tasks.size(); ++j) {
        bool assigned = !std::isnan(time_of(sol.arrival_times, tasks[j].id));
        bool listed_un = std::find(sol.unassigned.begin(), sol.unassigned.end(), tasks[j].id) !=
                         sol.unassigned.end();
        if (assigned == listed_un)
            bad.push_back("task " + std::to_string(tasks[j].id) +
                          " must be exactly one of assigned/unassigned");
        if (!assigned) recomputed += unassigned_penalty(g, tasks[j], params);
    }
    if (std::fabs(recomputed - sol.objective) > 1e-6)
        bad.push_back("objective " + std::to_string(sol.objective) +
                      " does not match recomputed " + std::to_string(recomputed));
    return bad;
}

std::vector<std::string> check_delivery_solution(const TaskGraph& g,
                                                 const std::vector<AllocAgent>& agents,
                                                 const std::vector<AllocTask>& tasks,
                                                 const AllocParams& params,
                                                 const DeliverySolution& sol) {
    std::vector<std::string> bad;
    std::vector<int> agent_edges, task_edges;
    double recomputed = 0.0;
    for (const SelectedEdge& e : sol.edges) {
        const Vertex& from = g.vertices()[e.from_vertex];
        const Vertex& to = g.vertices()[e.to_vertex];
        if (from.kind != VertexKind::Agent || to.kind != VertexKind::DeliveryOrigin) {
            bad.push_back("delivery edge must run agent -> delivery origin");
            continue;
        }
        if (std::count(agent_edges.begin(), agent_edges.end(), e.agent_id))
            bad.push_back("agent " + std::to_string(e.agent_id) + " has two edges");
        agent_edges.push_back(e.agent_id);
        if (std::count(task_edges.begin(), task_edges.end(), to.id))
            bad.push_back("task " + std::to_string(to.id) + " has two agents");
        task_edges.push_back(to.id);

        const AllocTask* t = find_task(tasks, to.id);
        auto ag = std::find_if(agents.begin(), agents.end(),
                               [&](const AllocAgent& a) { return a.id == e.agent_id; });
        if (!t || ag == agents.end()) {
            bad.push_back("edge references unknown task or agent");
            continue;
        }
        double d = g.distance(e.from_vertex, e.to_vertex);
        recomputed += edge_cost(ag->kind, *t, d, params.alpha, params.big_m);
        double arrival = std::max(t->window_open, ag->start_offset + d / ag->speed);
        double th = time_of(sol.arrival_times, t->id);
        if (std::fabs(th - arrival) > kTieEps)
            bad.push_back("task " + std::to_string(t->id) + " arrival mismatch");
        if (th < t->window_open - kTieEps || th > t->window_close + kTieEps)
            bad.push_back("task " + std::to_string(t->id) + " outside its window");
        if (th > params.horizon + kTieEps)
            bad.push_back("task " + std::to_string(t->id) + " outside the horizon");
    }
    for (const AllocTask& t : tasks)
        if (!std::count(task_edges.begin(), task_edges.end(), t.id))
            recomputed += unassigned_penalty(g, t, params);
    if (std::fabs(recomputed - sol.objective) > 1e-6)
        bad.push_back("objective " + std::to_string(sol.objective) +
                      " does not match recomputed " + std::to_string(recomputed));
    return bad;
}

} // namespace hs2pd
