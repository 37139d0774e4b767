#ifndef HS2PD_GRID_MAP_HPP
#define HS2PD_GRID_MAP_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hs2pd {

// Grid coordinates are (col,row), 1-based, row growing downward.
struct Position {
    int col = 0;
    int row = 0;

    bool operator==(const Position&) const = default;
    auto operator<=>(const Position&) const = default;
};

inline int manhattan(Position a, Position b) {
    return std::abs(a.col - b.col) + std::abs(a.row - b.row);
}

struct PositionHash {
    size_t operator()(Position p) const {
        return std::hash<int>()(p.col * 4096 + p.row);
    }
};

enum class CellKind : uint8_t {
    Road,
    Workstation,
    Charging,
    Warehouse,
    Obstacle,
};

char cell_kind_char(CellKind k);
std::optional<CellKind> cell_kind_from_char(char c);

// Rasterized warehouse floor. Cells are squares of side grid_side meters.
// Immutable after construction; safe to share across threads.
class GridMap {
public:
    GridMap() = default;
    GridMap(int width, int height, double grid_side);

    // Builds from row strings, top row first: '.' road, '#' obstacle,
    // 'W' workstation, 'C' charging, 'H' warehouse.
    static GridMap from_rows(const std::vector<std::string>& rows, double grid_side);

    int width() const { return width_; }
    int height() const { return height_; }
    double grid_side() const { return grid_side_; }

    bool in_bounds(Position p) const {
        return p.col >= 1 && p.col <= width_ && p.row >= 1 && p.row <= height_;
    }
    CellKind at(Position p) const { return cells_[index_of(p)]; }
    void set(Position p, CellKind k);

    bool passable(Position p) const {
        return in_bounds(p) && at(p) != CellKind::Obstacle;
    }
    bool is_endpoint(Position p) const {
        CellKind k = at(p);
        return k == CellKind::Workstation || k == CellKind::Charging ||
               k == CellKind::Warehouse;
    }

    // The single warehouse cell; throws if the map has none or several.
    Position warehouse() const;
    int warehouse_count() const;
    int passable_count() const;
    std::vector<Position> passable_cells() const;

    std::vector<std::string> to_rows() const;

    int index_of(Position p) const {
        if (!in_bounds(p))
            throw std::out_of_range("position out of map bounds (" +
                                    std::to_string(p.col) + "," + std::to_string(p.row) + ")");
        return (p.row - 1) * width_ + (p.col - 1);
    }

private:
    int width_ = 0;
    int height_ = 0;
    double grid_side_ = 1.0;
    std::vector<CellKind> cells_;
};

// 4-adjacent passable neighbors in fixed north, east, south, west order.
// Throws std::invalid_argument if p is out of bounds or an obstacle.
std::vector<Position> neighbors(const GridMap& map, Position p);

// BFS step counts from `from` to every cell; -1 where unreachable.
// Indexed by GridMap::index_of.
std::vector<int> bfs_distances(const GridMap& map, Position from);

// Minimal number of 4-connected moves over non-obstacle cells,
// or nullopt when no path exists.
std::optional<int> grid_distance(const GridMap& map, Position a, Position b);

} // namespace hs2pd

#endif
