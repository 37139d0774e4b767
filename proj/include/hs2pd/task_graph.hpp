#ifndef HS2PD_TASK_GRAPH_HPP
#define HS2PD_TASK_GRAPH_HPP

#include "hs2pd/agent.hpp"
#include "hs2pd/grid_map.hpp"
#include "hs2pd/task.hpp"

#include <limits>
#include <vector>

namespace hs2pd {

enum class VertexKind : uint8_t {
    Agent,
    PickupStart,
    DeliveryOrigin,
    DeliveryDestination,
    Warehouse,
};

struct Vertex {
    VertexKind kind;
    int id; // agent id or task id; 0 for the warehouse
    Position position;
};

// Weighted complete digraph over agent positions, task endpoints, and the
// warehouse. Edge weights are free-space BFS step counts times grid_side,
// in meters. Immutable after construction.
class TaskGraph {
public:
    static constexpr double kUnreachable = std::numeric_limits<double>::infinity();

    const std::vector<Vertex>& vertices() const { return vertices_; }
    int size() const { return static_cast<int>(vertices_.size()); }

    // Distance in meters between vertex indices; 0 on the diagonal.
    double distance(int from, int to) const { return dist_[from * size_ + to]; }
    int steps(int from, int to) const { return steps_[from * size_ + to]; }

    int agent_vertex(int agent_id) const;
    int pickup_vertex(int task_id) const;
    int delivery_origin_vertex(int task_id) const;
    int delivery_destination_vertex(int task_id) const;
    int warehouse_vertex() const { return warehouse_vertex_; }

    friend TaskGraph build_task_graph(const GridMap& map,
                                      const std::vector<AgentState>& agents,
                                      const std::vector<Task>& tasks);

private:
    int find(VertexKind kind, int id) const;

    std::vector<Vertex> vertices_;
    std::vector<double> dist_;
    std::vector<int> steps_;
    int size_ = 0;
    int warehouse_vertex_ = -1;
};

// Assembles the first-layer graph: one vertex per agent, per pickup start,
// per delivery origin, per delivery destination, plus the warehouse.
// Throws std::runtime_error if any vertex pair is unreachable.
TaskGraph build_task_graph(const GridMap& map,
                           const std::vector<AgentState>& agents,
                           const std::vector<Task>& tasks);

// Second-layer view: the unweighted graph of passable cells. Adjacency is
// answered straight from the map; this just pins the vertex count N.
struct PathGraph {
    const GridMap* map = nullptr;

    int vertex_count() const { return map->passable_count(); }
    std::vector<Position> adjacent(Position p) const { return neighbors(*map, p); }
};

} // namespace hs2pd

#endif
