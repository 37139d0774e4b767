#include "hs2pd/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>

namespace hs2pd {

namespace {

constexpr double kTieEps = 1e-9;
constexpr double kInf = std::numeric_limits<double>::infinity();

int brute_task_vertex(const TaskGraph& g, const AllocTask& t) {
    return t.mode == TaskMode::Pickup ? g.pickup_vertex(t.id) : g.delivery_origin_vertex(t.id);
}

struct ChainEnumerator {
    const TaskGraph& g;
    const AllocParams& params;
    std::vector<AllocAgent> agents;
    std::vector<AllocTask> tasks;

    std::vector<std::vector<int>> chains;
    std::vector<char> used;

    double best = kInf;
    std::vector<std::vector<int>> best_chains;
    bool have = false;

    ChainEnumerator(const TaskGraph& graph, std::vector<AllocAgent> ag,
                    std::vector<AllocTask> ts, const AllocParams& pr)
        : g(graph), params(pr), agents(std::move(ag)), tasks(std::move(ts)) {
        std::sort(agents.begin(), agents.end(),
                  [](const AllocAgent& a, const AllocAgent& b) { return a.id < b.id; });
        std::sort(tasks.begin(), tasks.end(),
                  [](const AllocTask& a, const AllocTask& b) { return a.id < b.id; });
        chains.assign(agents.size(), {});
        used.assign(tasks.size(), 0);
    }

    // full-candidate evaluation: feasibility and cost recomputed from scratch
    void consider() {
        double total = 0.0;
        for (size_t a = 0; a < agents.size(); ++a) {
            const AllocAgent& ag = agents[a];
            std::vector<AllocTask> chain_tasks;
            double load = 0.0;
            for (int j : chains[a]) {
                chain_tasks.push_back(tasks[j]);
                load += tasks[j].load;
            }
            if (load > ag.capacity_left + kTieEps) return;
            auto sched = check_time_feasibility(g, chain_tasks, g.agent_vertex(ag.id),
                                                ag.start_offset, ag.speed, params.horizon);
            if (!sched) return;
            int at = g.agent_vertex(ag.id);
            for (const AllocTask& t : chain_tasks) {
                int tv = brute_task_vertex(g, t);
                total += edge_cost(ag.kind, t, g.distance(at, tv), params.alpha, params.big_m);
                at = tv;
            }
        }
        for (size_t j = 0; j < tasks.size(); ++j)
            if (!used[j]) total += unassigned_penalty(g, tasks[j], params);
        if (total < best - kTieEps ||
            (total <= best + kTieEps && (!have || chains < best_chains))) {
            best = std::min(total, have ? best : total);
            best_chains = chains;
            have = true;
        }
    }

    void enumerate(size_t agent_idx, size_t max_chain) {
        if (agent_idx == agents.size()) {
            consider();
            return;
        }
        extend(agent_idx, max_chain);
    }

    void extend(size_t agent_idx, size_t max_chain) {
        enumerate(agent_idx + 1, max_chain); // close this agent's chain
        if (chains[agent_idx].size() >= max_chain) return;
        for (size_t j = 0; j < tasks.size(); ++j) {
            if (used[j]) continue;
            used[j] = 1;
            chains[agent_idx].push_back(static_cast<int>(j));
            extend(agent_idx, max_chain);
            chains[agent_idx].pop_back();
            used[j] = 0;
        }
    }

    BruteChains result() {
        BruteChains out;
        out.objective = 0.0;
        // recompute the stored optimum's objective exactly as consider() did
        if (have) {
            chains = best_chains;
            used.assign(tasks.size(), 0);
            for (const auto& c : chains)
                for (int j : c) used[j] = 1;
            double total = 0.0;
            for (size_t a = 0; a < agents.size(); ++a) {
                const AllocAgent& ag = agents[a];
                int at = g.agent_vertex(ag.id);
                for (int j : chains[a]) {
                    int tv = brute_task_vertex(g, tasks[j]);
                    total += edge_cost(ag.kind, tasks[j], g.distance(at, tv), params.alpha,
                                       params.big_m);
                    at = tv;
                }
            }
            for (size_t j = 0; j < tasks.size(); ++j)
                if (!used[j]) total += unassigned_penalty(g, tasks[j], params);
            out.objective = total;
            for (const auto& c : best_chains) {
                std::vector<int> ids;
                for (int j : c) ids.push_back(tasks[j].id);
                out.chains_by_agent.push_back(ids);
            }
        } else {
            double total = 0.0;
            for (const AllocTask& t : tasks) total += unassigned_penalty(g, t, params);
            out.objective = total;
            out.chains_by_agent.assign(agents.size(), {});
        }
        return out;
    }
};

} // namespace

BruteChains brute_force_pickup(const TaskGraph& g, const std::vector<AllocAgent>& agents,
                               const std::vector<AllocTask>& tasks, const AllocParams& params) {
    ChainEnumerator e(g, agents, tasks, params);
    e.enumerate(0, tasks.size());
    return e.result();
}

BruteChains brute_force_delivery(const TaskGraph& g, const std::vector<AllocAgent>& agents,
                                 const std::vector<AllocTask>& tasks,
                                 const AllocParams& params) {
    ChainEnumerator e(g, agents, tasks, params);
    e.enumerate(0, 1); // one delivery task per agent
    return e.result();
}

double brute_force_mode_objective(const TaskGraph& g, const std::vector<ModeAgent>& agents,
                                  const std::vector<AllocTask>& tasks,
                                  const AllocParams& params) {
    std::vector<ModeAgent> sorted = agents;
    std::sort(sorted.begin(), sorted.end(),
              [](const ModeAgent& a, const ModeAgent& b) { return a.agent.id < b.agent.id; });

    std::vector<AllocTask> pickups, deliveries;
    for (const AllocTask& t : tasks)
        (t.mode == TaskMode::Pickup ? pickups : deliveries).push_back(t);

    std::vector<const ModeAgent*> free_agents;
    std::vector<std::pair<const ModeAgent*, AgentMode>> fixed;
    for (const ModeAgent& ma : sorted) {
        if (ma.energy <= ma.energy_threshold)
            fixed.push_back({&ma, AgentMode::ChargingMode});
        else if (ma.forced_mode)
            fixed.push_back({&ma, *ma.forced_mode});
        else
            free_agents.push_back(&ma);
    }

    const size_t n = free_agents.size();
    double best = kInf;
    for (uint64_t mask = 0; mask < (uint64_t{1} << n); ++mask) {
        std::vector<AllocAgent> pick, del;
        for (const auto& [ma, mode] : fixed) {
            if (mode == AgentMode::PickupMode) pick.push_back(ma->agent);
            if (mode == AgentMode::DeliveryMode) del.push_back(ma->agent);
        }
        for (size_t k = 0; k < n; ++k) {
            if ((mask >> (n - 1 - k)) & 1)
                del.push_back(free_agents[k]->agent);
            else
                pick.push_back(free_agents[k]->agent);
        }
        double f = brute_force_pickup(g, pick, pickups, params).objective +
                   params.gamma * brute_force_delivery(g, del, deliveries, params).objective;
        if (f < best - kTieEps) best = f;
    }
    return best;
}

std::optional<int> single_robot_earliest_arrival(const GridMap& map, Position start,
                                                 Position goal, int start_step,
                                                 const ReservationTable& reservations,
                                                 int max_steps) {
    if (!map.passable(start) || !map.passable(goal)) return std::nullopt;
    if (start == goal) return start_step;
    std::deque<std::pair<Position, int>> queue;
    std::map<std::pair<int, int>, char> seen; // (cell index, relative step)
    queue.push_back({start, 0});
    seen[{map.index_of(start), 0}] = 1;
    while (!queue.empty()) {
        auto [p, r] = queue.front();
        queue.pop_front();
        if (r >= max_steps) continue;
        int abs = start_step + r;
        auto push = [&](Position q) {
            if (!map.passable(q)) return;
            if (!reservations.vertex_free(q, abs + 1)) return;
            if (q != p && !reservations.edge_allowed(p, q, abs)) return;
            auto key = std::make_pair(map.index_of(q), r + 1);
            if (seen.count(key)) return;
            seen[key] = 1;
            queue.push_back({q, r + 1});
        };
        push(p);
        push({p.col, p.row - 1});
        push({p.col + 1, p.row});
        push({p.col, p.row + 1});
        push({p.col - 1, p.row});
        // goal test on enqueued states keeps this a plain BFS
        auto key = std::make_pair(map.index_of(goal), r + 1);
        if (seen.count(key)) return start_step + r + 1;
    }
    return std::nullopt;
}

std::optional<int> joint_two_robot_min_total_arrival(const GridMap& map, Position start_a,
                                                     Position goal_a, Position start_b,
                                                     Position goal_b, int max_steps) {
    struct State {
        int a, b;
        bool da, db;
        bool operator<(const State& o) const {
            return std::tie(a, b, da, db) < std::tie(o.a, o.b, o.da, o.db);
        }
    };
    auto idx = [&](Position p) { return map.index_of(p); };
    auto pos = [&](int i) { return Position{i % map.width() + 1, i / map.width() + 1}; };

    std::map<State, int> dist;
    // Dijkstra over joint states; cost counts one per not-yet-parked robot
    // per step, which totals the two arrival durations.
    using QE = std::pair<int, State>;
    std::vector<QE> heap;
    auto push = [&](const State& s, int d) {
        auto it = dist.find(s);
        if (it != dist.end() && it->second <= d) return;
        dist[s] = d;
        heap.push_back({d, s});
        std::push_heap(heap.begin(), heap.end(), std::greater<>());
    };

    State init{idx(start_a), idx(start_b), false, false};
    push(init, 0);
    int steps_taken = 0;
    while (!heap.empty() && steps_taken < 4000000) {
        std::pop_heap(heap.begin(), heap.end(), std::greater<>());
        auto [d, s] = heap.back();
        heap.pop_back();
        if (dist.count(s) && dist[s] < d) continue;
        ++steps_taken;

        // parking decisions are free
        if (!s.da && s.a == idx(goal_a)) push({s.a, s.b, true, s.db}, d);
        if (!s.db && s.b == idx(goal_b)) push({s.a, s.b, s.da, true}, d);
        if (s.da && s.db) return d;
        if (d > 2 * max_steps) continue;

        auto moves = [&](int from, bool parked) {
            std::vector<int> out;
            if (parked) {
                out.push_back(from);
                return out;
            }
            Position p = pos(from);
            out.push_back(from);
            for (Position q : std::initializer_list<Position>{{p.col, p.row - 1},
                                                              {p.col + 1, p.row},
                                                              {p.col, p.row + 1},
                                                              {p.col - 1, p.row}})
                if (map.passable(q)) out.push_back(idx(q));
            return out;
        };
        for (int na : moves(s.a, s.da)) {
            for (int nb : moves(s.b, s.db)) {
                if (na == nb) continue;                  // vertex conflict
                if (na == s.b && nb == s.a) continue;     // swap
                int cost = (s.da ? 0 : 1) + (s.db ? 0 : 1);
                push({na, nb, s.da, s.db}, d + cost);
            }
        }
    }
    return std::nullopt;
}

} // namespace hs2pd
