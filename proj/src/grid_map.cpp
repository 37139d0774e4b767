#include "hs2pd/grid_map.hpp"

#include <array>
#include <deque>

namespace hs2pd {

char cell_kind_char(CellKind k) {
    switch (k) {
        case CellKind::Road: return '.';
        case CellKind::Workstation: return 'W';
        case CellKind::Charging: return 'C';
        case CellKind::Warehouse: return 'H';
        case CellKind::Obstacle: return '#';
    }
    return '?';
}

std::optional<CellKind> cell_kind_from_char(char c) {
    switch (c) {
        case '.': return CellKind::Road;
        case 'W': return CellKind::Workstation;
        case 'C': return CellKind::Charging;
        case 'H': return CellKind::Warehouse;
        case '#': return CellKind::Obstacle;
        default: return std::nullopt;
    }
}

GridMap::GridMap(int width, int height, double grid_side)
    : width_(width), height_(height), grid_side_(grid_side),
      cells_(static_cast<size_t>(width) * height, CellKind::Road) {
    if (width < 1 || height < 1)
        throw std::invalid_argument("map dimensions must be positive");
    if (grid_side <= 0.0)
        throw std::invalid_argument("grid_side must be positive");
}

GridMap GridMap::from_rows(const std::vector<std::string>& rows, double grid_side) {
    if (rows.empty())
        throw std::invalid_argument("map has no rows");
    const int h = static_cast<int>(rows.size());
    const int w = static_cast<int>(rows.front().size());
    GridMap map(w, h, grid_side);
    for (int r = 0; r < h; ++r) {
        if (static_cast<int>(rows[r].size()) != w)
            throw std::invalid_argument("map row " + std::to_string(r + 1) +
                                        " has length " + std::to_string(rows[r].size()) +
                                        ", expected " + std::to_string(w));
        for (int c = 0; c < w; ++c) {
            auto kind = cell_kind_from_char(rows[r][c]);
            if (!kind)
                throw std::invalid_argument(std::string("unknown map cell '") +
                                            rows[r][c] + "' at row " + std::to_string(r + 1));
            map.cells_[static_cast<size_t>(r) * w + c] = *kind;
        }
    }
    return map;
}

void GridMap::set(Position p, CellKind k) {
    cells_[index_of(p)] = k;
}

Position GridMap::warehouse() const {
    Position found{0, 0};
    int count = 0;
    for (int r = 1; r <= height_; ++r)
        for (int c = 1; c <= width_; ++c)
            if (at({c, r}) == CellKind::Warehouse) {
                found = {c, r};
                ++count;
            }
    if (count != 1)
        throw std::runtime_error("map must contain exactly one warehouse cell, found " +
                                 std::to_string(count));
    return found;
}

int GridMap::warehouse_count() const {
    int count = 0;
    for (CellKind k : cells_)
        if (k == CellKind::Warehouse) ++count;
    return count;
}

int GridMap::passable_count() const {
    int count = 0;
    for (CellKind k : cells_)
        if (k != CellKind::Obstacle) ++count;
    return count;
}

std::vector<Position> GridMap::passable_cells() const {
    std::vector<Position> out;
    out.reserve(cells_.size());
    for (int r = 1; r <= height_; ++r)
        for (int c = 1; c <= width_; ++c)
            if (passable({c, r})) out.push_back({c, r});
    return out;
}

std::vector<std::string> GridMap::to_rows() const {
    std::vector<std::string> rows(height_, std::string(width_, '?'));
    for (int r = 1; r <= height_; ++r)
        for (int c = 1; c <= width_; ++c)
            rows[r - 1][c - 1] = cell_kind_char(at({c, r}));
    return rows;
}

namespace {
// North, east, south, west. Row grows downward, so north is row-1.
constexpr std::array<std::pair<int, int>, 4> kSteps = {{{0, -1}, {1, 0}, {0, 1}, {-1, 0}}};
} // namespace

std::vector<Position> neighbors(const GridMap& map, Position p) {
    if (!map.passable(p))
        throw std::invalid_argument("neighbors: position (" + std::to_string(p.col) + "," +
                                    std::to_string(p.row) + ") is out of bounds or an obstacle");
    std::vector<Position> out;
    out.reserve(4);
    for (auto [dc, dr] : kSteps) {
        Position q{p.col + dc, p.row + dr};
        if (map.passable(q)) out.push_back(q);
    }
    return out;
}

std::vector<int> bfs_distances(const GridMap& map, Position from) {
    std::vector<int> dist(static_cast<size_t>(map.width()) * map.height(), -1);
    if (!map.passable(from)) return dist;
    std::deque<Position> queue;
    dist[map.index_of(from)] = 0;
    queue.push_back(from);
    while (!queue.empty()) {
        Position p = queue.front();
        queue.pop_front();
        const int d = dist[map.index_of(p)];
        for (auto [dc, dr] : kSteps) {
            Position q{p.col + dc, p.row + dr};
            if (!map.passable(q)) continue;
            int& dq = dist[map.index_of(q)];
            if (dq < 0) {
                dq = d + 1;
                queue.push_back(q);
            }
        }
    }
    return dist;
}

std::optional<int> grid_distance(const GridMap& map, Position a, Position b) {
    if (!map.passable(a) || !map.passable(b))
        throw std::invalid_argument("grid_distance: endpoints must be passable");
    if (a == b) return 0;
    auto dist = bfs_distances(map, a);
    int d = dist[map.index_of(b)];
    if (d < 0) return std::nullopt;
    return d;
}

} // namespace hs2pd
