#include "hs2pd/task_graph.hpp"

#include <map>
#include <stdexcept>
#include <string>

namespace hs2pd {

int TaskGraph::find(VertexKind kind, int id) const {
    for (int i = 0; i < size_; ++i)
        if (vertices_[i].kind == kind && vertices_[i].id == id) return i;
    throw std::out_of_range("task graph has no vertex (" + std::to_string(int(kind)) + "," +
                            std::to_string(id) + ")");
}

int TaskGraph::agent_vertex(int agent_id) const { return find(VertexKind::Agent, agent_id); }
int TaskGraph::pickup_vertex(int task_id) const { return find(VertexKind::PickupStart, task_id); }
int TaskGraph::delivery_origin_vertex(int task_id) const {
    return find(VertexKind::DeliveryOrigin, task_id);
}
int TaskGraph::delivery_destination_vertex(int task_id) const {
    return find(VertexKind::DeliveryDestination, task_id);
}

TaskGraph build_task_graph(const GridMap& map,
                           const std::vector<AgentState>& agents,
                           const std::vector<Task>& tasks) {
    TaskGraph g;
    for (const AgentState& a : agents)
        g.vertices_.push_back({VertexKind::Agent, a.id, a.position});
    for (const Task& t : tasks)
        if (t.mode == TaskMode::Pickup)
            g.vertices_.push_back({VertexKind::PickupStart, t.id, t.origin});
    for (const Task& t : tasks)
        if (t.mode == TaskMode::Delivery)
            g.vertices_.push_back({VertexKind::DeliveryOrigin, t.id, t.origin});
    for (const Task& t : tasks)
        if (t.mode == TaskMode::Delivery)
            g.vertices_.push_back({VertexKind::DeliveryDestination, t.id, t.destination});
    g.warehouse_vertex_ = static_cast<int>(g.vertices_.size());
    g.vertices_.push_back({VertexKind::Warehouse, 0, map.warehouse()});

    const int n = static_cast<int>(g.vertices_.size());
    g.size_ = n;
    g.dist_.assign(static_cast<size_t>(n) * n, 0.0);
    g.steps_.assign(static_cast<size_t>(n) * n, 0);

    // One BFS per distinct source position covers all vertex pairs.
    std::map<Position, std::vector<int>> fields;
    for (const Vertex& v : g.vertices_) {
        if (!map.passable(v.position))
            throw std::runtime_error("task graph vertex at impassable cell (" +
                                     std::to_string(v.position.col) + "," +
                                     std::to_string(v.position.row) + ")");
        if (!fields.count(v.position)) fields[v.position] = bfs_distances(map, v.position);
    }

    for (int i = 0; i < n; ++i) {
        const auto& field = fields.at(g.vertices_[i].position);
        for (int j = 0; j < n; ++j) {
            int steps = field[map.index_of(g.vertices_[j].position)];
            if (steps < 0)
                throw std::runtime_error(
                    "scenario invalid: no path between task graph vertices (" +
                    std::to_string(g.vertices_[i].position.col) + "," +
                    std::to_string(g.vertices_[i].position.row) + ") and (" +
                    std::to_string(g.vertices_[j].position.col) + "," +
                    std::to_string(g.vertices_[j].position.row) + ")");
            g.steps_[i * n + j] = steps;
            g.dist_[i * n + j] = steps * map.grid_side();
        }
    }
    return g;
}

} // namespace hs2pd
