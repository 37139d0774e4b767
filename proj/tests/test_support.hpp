#ifndef HS2PD_TEST_SUPPORT_HPP
#define HS2PD_TEST_SUPPORT_HPP

#include "hs2pd/scenario.hpp"
#include "hs2pd/task_graph.hpp"

#include <random>
#include <string>
#include <vector>

namespace hs2pd::testing {

inline GridMap open_map(int w, int h, double grid_side = 1.0) {
    std::vector<std::string> rows(h, std::string(w, '.'));
    return GridMap::from_rows(rows, grid_side);
}

// All-pairs shortest paths by Floyd-Warshall over the 4-adjacency graph;
// deliberately a different route than the BFS the library uses.
inline std::vector<std::vector<int>> floyd_warshall(const GridMap& map) {
    const int n = map.width() * map.height();
    const int inf = 1 << 28;
    std::vector<std::vector<int>> d(n, std::vector<int>(n, inf));
    for (int r = 1; r <= map.height(); ++r)
        for (int c = 1; c <= map.width(); ++c) {
            Position p{c, r};
            if (!map.passable(p)) continue;
            int i = map.index_of(p);
            d[i][i] = 0;
            for (Position q : {Position{c + 1, r}, Position{c, r + 1}})
                if (map.passable(q)) {
                    int j = map.index_of(q);
                    d[i][j] = d[j][i] = 1;
                }
        }
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i) {
            if (d[i][k] >= inf) continue;
            for (int j = 0; j < n; ++j)
                if (d[i][k] + d[k][j] < d[i][j]) d[i][j] = d[i][k] + d[k][j];
        }
    return d;
}

// Random map whose passable cells stay 4-connected: start from open and
// drop obstacles only when they keep the passable set connected.
inline GridMap random_connected_map(std::mt19937_64& rng, int w, int h, double obstacle_share) {
    GridMap map = open_map(w, h);
    std::uniform_int_distribution<int> col(1, w), row(1, h);
    int target = static_cast<int>(obstacle_share * w * h);
    for (int tries = 0; tries < 8 * target; ++tries) {
        if (target <= 0) break;
        Position p{col(rng), row(rng)};
        if (!map.passable(p)) continue;
        map.set(p, CellKind::Obstacle);
        // connectivity check from any remaining passable cell
        auto cells = map.passable_cells();
        if (cells.empty()) {
            map.set(p, CellKind::Road);
            continue;
        }
        auto field = bfs_distances(map, cells.front());
        bool ok = true;
        for (Position q : cells)
            if (field[map.index_of(q)] < 0) ok = false;
        if (!ok) {
            map.set(p, CellKind::Road);
        } else {
            --target;
        }
    }
    return map;
}

inline std::vector<Position> distinct_cells(std::mt19937_64& rng, const GridMap& map, size_t n) {
    auto cells = map.passable_cells();
    std::vector<Position> out;
    std::uniform_int_distribution<size_t> pick(0, cells.size() - 1);
    while (out.size() < n && out.size() < cells.size()) {
        Position p = cells[pick(rng)];
        bool dup = false;
        for (Position q : out)
            if (p == q) dup = true;
        if (!dup) out.push_back(p);
    }
    return out;
}

} // namespace hs2pd::testing

#endif
