#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hs2pd/scenario_io.hpp"
#include "hs2pd/task_graph.hpp"
#include "test_support.hpp"

using namespace hs2pd;
using namespace hs2pd::testing;

TEST_CASE("neighbors follow north-east-south-west order") {
    GridMap map = open_map(3, 3);
    CHECK(neighbors(map, {2, 2}) ==
          std::vector<Position>{{2, 1}, {3, 2}, {2, 3}, {1, 2}});
    CHECK(neighbors(map, {1, 1}) == std::vector<Position>{{2, 1}, {1, 2}});

    GridMap blocked = open_map(3, 3);
    blocked.set({2, 1}, CellKind::Obstacle);
    CHECK(neighbors(blocked, {2, 2}) == std::vector<Position>{{3, 2}, {2, 3}, {1, 2}});

    CHECK_THROWS_AS(neighbors(blocked, {2, 1}), std::invalid_argument);
    CHECK_THROWS_AS(neighbors(map, {0, 1}), std::invalid_argument);
}

TEST_CASE("grid_distance basics") {
    GridMap map = open_map(5, 5);
    CHECK(grid_distance(map, {1, 1}, {4, 3}) == 5);
    CHECK(grid_distance(map, {3, 3}, {3, 3}) == 0);

    GridMap walled = open_map(3, 3);
    walled.set({2, 1}, CellKind::Obstacle);
    walled.set({2, 2}, CellKind::Obstacle);
    // wall column with one gap at (2,3)
    auto oracle = floyd_warshall(walled);
    auto d = grid_distance(walled, {1, 1}, {3, 1});
    REQUIRE(d.has_value());
    CHECK(*d == oracle[walled.index_of({1, 1})][walled.index_of({3, 1})]);
    CHECK(*d == 6);

    walled.set({2, 3}, CellKind::Obstacle); // seal the gap
    CHECK_FALSE(grid_distance(walled, {1, 1}, {3, 1}).has_value());
}

TEST_CASE("grid_distance matches Floyd-Warshall on random maps") {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 15; ++trial) {
        GridMap map = random_connected_map(rng, 6, 6, 0.3);
        auto oracle = floyd_warshall(map);
        auto cells = map.passable_cells();
        for (Position a : cells)
            for (Position b : cells) {
                auto d = grid_distance(map, a, b);
                REQUIRE(d.has_value());
                CHECK(*d == oracle[map.index_of(a)][map.index_of(b)]);
            }
    }
}

TEST_CASE("grid_distance symmetry, triangle inequality, Manhattan bound") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 10; ++trial) {
        GridMap map = random_connected_map(rng, 7, 5, 0.25);
        auto cells = distinct_cells(rng, map, 6);
        for (Position a : cells)
            for (Position b : cells) {
                auto dab = grid_distance(map, a, b);
                auto dba = grid_distance(map, b, a);
                REQUIRE(dab.has_value());
                CHECK(*dab == *dba);
                CHECK(*dab >= manhattan(a, b));
                for (Position c : cells) {
                    auto dac = grid_distance(map, a, c);
                    auto dcb = grid_distance(map, c, b);
                    CHECK(*dab <= *dac + *dcb);
                }
            }
    }
    // equality with Manhattan on obstacle-free maps
    GridMap open = open_map(8, 6);
    std::uniform_int_distribution<int> col(1, 8), row(1, 6);
    for (int i = 0; i < 50; ++i) {
        Position a{col(rng), row(rng)}, b{col(rng), row(rng)};
        CHECK(*grid_distance(open, a, b) == manhattan(a, b));
    }
}

TEST_CASE("build_task_graph vertex sets and weights") {
    GridMap map = open_map(5, 4);
    map.set({5, 2}, CellKind::Warehouse);

    AgentState robot;
    robot.id = 1;
    robot.kind = AgentKind::Robot;
    robot.position = {1, 1};

    Task pickup;
    pickup.id = 1;
    pickup.mode = TaskMode::Pickup;
    pickup.origin = {3, 3};
    pickup.destination = {5, 2};

    SUBCASE("one agent, one pickup task, warehouse") {
        TaskGraph g = build_task_graph(map, {robot}, {pickup});
        CHECK(g.size() == 3);
        int directed_edges = 0;
        for (int i = 0; i < g.size(); ++i)
            for (int j = 0; j < g.size(); ++j)
                if (i != j) ++directed_edges;
        CHECK(directed_edges == 6);
        CHECK(g.distance(g.agent_vertex(1), g.pickup_vertex(1)) ==
              doctest::Approx(manhattan({1, 1}, {3, 3}) * map.grid_side()));
    }

    SUBCASE("two agents, zero tasks") {
        AgentState other = robot;
        other.id = 2;
        other.position = {2, 2};
        TaskGraph g = build_task_graph(map, {robot, other}, {});
        CHECK(g.size() == 3); // 2 agents + warehouse
    }

    SUBCASE("edge weights scale with grid_side") {
        GridMap wide = open_map(5, 4, 2.0);
        wide.set({5, 2}, CellKind::Warehouse);
        TaskGraph g = build_task_graph(wide, {robot}, {pickup});
        int steps = g.steps(g.agent_vertex(1), g.pickup_vertex(1));
        CHECK(g.distance(g.agent_vertex(1), g.pickup_vertex(1)) ==
              doctest::Approx(steps * 2.0));
    }

    SUBCASE("unreachable vertex pair is a scenario error") {
        GridMap split = open_map(5, 4);
        split.set({5, 2}, CellKind::Warehouse);
        for (int r = 1; r <= 4; ++r) split.set({4, r}, CellKind::Obstacle);
        AgentState stranded = robot;
        stranded.position = {1, 1};
        CHECK_THROWS_AS(build_task_graph(split, {stranded}, {pickup}), std::runtime_error);
    }
}

TEST_CASE("bundled storage scenario produces the full 28-vertex task graph") {
    Scenario sc = load_scenario_file(std::string(SCENARIO_DIR) + "/paper_table3.json").scenario;
    TaskGraph g = build_task_graph(sc.map, sc.agents, sc.tasks);
    // 4 agents + 11 pickup starts + 6 delivery origins + 6 destinations + warehouse
    CHECK(g.size() == 28);
    int agents = 0, pickups = 0, origins = 0, dests = 0, wh = 0;
    for (const Vertex& v : g.vertices()) {
        switch (v.kind) {
            case VertexKind::Agent: ++agents; break;
            case VertexKind::PickupStart: ++pickups; break;
            case VertexKind::DeliveryOrigin: ++origins; break;
            case VertexKind::DeliveryDestination: ++dests; break;
            case VertexKind::Warehouse: ++wh; break;
        }
    }
    CHECK(agents == 4);
    CHECK(pickups == 11);
    CHECK(origins == 6);
    CHECK(dests == 6);
    CHECK(wh == 1);

    // bidirectional roads: the weight matrix is symmetric
    for (int i = 0; i < g.size(); ++i)
        for (int j = 0; j < g.size(); ++j)
            CHECK(g.distance(i, j) == doctest::Approx(g.distance(j, i)));
}
