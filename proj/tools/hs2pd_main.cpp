#include "hs2pd/engine.hpp"
#include "hs2pd/oracle.hpp"
#include "hs2pd/scenario_io.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace hs2pd;

namespace {

int log_level() {
    const char* env = std::getenv("HS2PD_LOG");
    if (!env) return 0;
    std::string v = env;
    if (v == "debug") return 2;
    if (v == "info") return 1;
    return 0;
}

void render_text_frames(const Scenario& sc, const Trace& trace) {
    int steps_per_update = sc.params.steps_per_update();
    int max_step = 0;
    for (const TraceRecord& r : trace) max_step = std::max(max_step, r.step);
    for (int step = 0; step <= max_step; step += steps_per_update) {
        auto rows = sc.map.to_rows();
        for (const TraceRecord& r : trace) {
            if (r.step != step) continue;
            char mark = static_cast<char>('0' + (r.agent_id % 10));
            if (r.kind == AgentKind::Human) mark = static_cast<char>('a' + (r.agent_id % 26));
            rows[r.pos.row - 1][r.pos.col - 1] = mark;
        }
        std::cout << "--- step " << step << " (t=" << step * sc.params.phi << "s)\n";
        for (const std::string& row : rows) std::cout << row << "\n";
    }
}

int cmd_run(const std::string& scenario_path, const std::string& out_dir,
            const std::vector<std::string>& overrides, int max_steps,
            const std::string& render) {
    Scenario sc;
    try {
        sc = load_scenario_file(scenario_path).scenario;
        for (const std::string& o : overrides) apply_override(sc, o);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    auto violations = validate_scenario(sc);
    if (!violations.empty()) {
        std::cerr << "scenario fails validation:\n";
        for (const Violation& v : violations)
            std::cerr << "  [" << v.code << "] " << v.message << "\n";
        return 1;
    }

    RunOptions opts;
    opts.max_update_steps = max_steps;
    RunResult result = run(sc, opts);

    fs::create_directories(out_dir);
    std::ofstream(fs::path(out_dir) / "trace.csv") << trace_to_csv(result.trace);
    std::ofstream(fs::path(out_dir) / "metrics.json") << metrics_to_json(result.metrics);

    if (log_level() >= 1)
        for (const std::string& w : result.warnings) std::cerr << "warn: " << w << "\n";
    if (log_level() >= 2) {
        for (const BoundaryDecision& b : result.boundaries) {
            std::cerr << "boundary " << b.update_step << ":";
            for (const AgentChain& c : b.chains) {
                std::cerr << " agent" << c.agent_id << "[";
                for (size_t i = 0; i < c.task_ids.size(); ++i)
                    std::cerr << (i ? "-" : "") << c.task_ids[i];
                std::cerr << "]";
            }
            std::cerr << "\n";
        }
    }
    if (render == "text") render_text_frames(sc, result.trace);

    std::cout << "completion_step=" << result.metrics.completion_step << "\n";
    std::cout << "all_assigned_step=" << result.metrics.all_assigned_step << "\n";
    std::cout << "tasks_completed=" << result.metrics.tasks_completed << "/" << sc.tasks.size()
              << "\n";
    std::cout << "collisions=" << result.metrics.collisions << "\n";
    if (result.metrics.timed_out) {
        std::cerr << "run hit the step cap with unfinished tasks\n";
        return 2;
    }
    return 0;
}

int cmd_validate(const std::string& trace_path, const std::string& scenario_path) {
    try {
        Scenario sc = load_scenario_file(scenario_path).scenario;
        std::ifstream in(trace_path);
        if (!in) {
            std::cerr << "error: cannot open trace " << trace_path << "\n";
            return 1;
        }
        std::stringstream buf;
        buf << in.rdbuf();
        Trace trace = trace_from_csv(buf.str());
        auto violations = validate_trace(trace, sc);
        if (violations.empty()) {
            std::cout << "trace clean: " << trace.size() << " records\n";
            return 0;
        }
        for (const TraceViolation& v : violations)
            std::cerr << "step " << v.step << ": " << v.what << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

int cmd_scenario_check(const std::string& path) {
    try {
        Scenario sc = load_scenario_file(path).scenario;
        auto violations = validate_scenario(sc);
        if (violations.empty()) {
            std::cout << "scenario ok: " << sc.agents.size() << " agents, " << sc.tasks.size()
                      << " tasks, " << sc.map.width() << "x" << sc.map.height() << " map\n";
            return 0;
        }
        for (const Violation& v : violations)
            std::cerr << "[" << v.code << "] " << v.message << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

AllocTask to_alloc(const Task& t) {
    AllocTask at;
    at.id = t.id;
    at.mode = t.mode;
    at.window_open = t.window.open;
    at.window_close = t.window.close;
    at.load = t.load;
    at.service_time = t.service_time;
    at.human_only = t.human_only;
    at.robot_only = t.robot_only;
    return at;
}

int cmd_oracle(const std::string& path, const std::string& which) {
    ScenarioFile sf;
    try {
        sf = load_scenario_file(path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    const Scenario& sc = sf.scenario;
    if (sc.agents.size() > 3 && which != "mode") {
        std::cerr << "refused: exhaustive comparison caps at 3 agents, got "
                  << sc.agents.size() << "\n";
        return 1;
    }
    if (which == "mode" && sc.agents.size() > 4) {
        std::cerr << "refused: mode enumeration caps at 4 agents, got " << sc.agents.size()
                  << "\n";
        return 1;
    }
    if (sc.tasks.size() > 4) {
        std::cerr << "refused: exhaustive comparison caps at 4 tasks, got " << sc.tasks.size()
                  << "\n";
        return 1;
    }
    if (sc.map.width() > 8 || sc.map.height() > 8) {
        std::cerr << "refused: oracle maps cap at 8x8, got " << sc.map.width() << "x"
                  << sc.map.height() << "\n";
        return 1;
    }

    AllocParams params;
    params.alpha = sc.params.alpha;
    params.gamma = sc.params.gamma;
    params.big_m = sc.params.big_m;
    params.horizon = sc.params.horizon;

    std::vector<AllocAgent> agents;
    for (const AgentState& a : sc.agents)
        agents.push_back({a.id, a.kind, a.speed, a.capacity, 0.0});

    auto report = [](const std::string& label, double solver, double brute) {
        bool match = std::fabs(solver - brute) <= 1e-9;
        std::cout << label << ": solver=" << solver << " brute_force=" << brute
                  << (match ? " MATCH" : " MISMATCH") << "\n";
        return match ? 0 : 1;
    };

    if (which == "pickup" || which == "delivery") {
        std::vector<AllocTask> tasks;
        for (const Task& t : sc.tasks)
            if ((which == "pickup") == (t.mode == TaskMode::Pickup)) tasks.push_back(to_alloc(t));
        TaskGraph g = build_task_graph(sc.map, sc.agents, sc.tasks);
        if (which == "pickup")
            return report("pickup",
                          solve_pickup_allocation(g, agents, tasks, params).objective,
                          brute_force_pickup(g, agents, tasks, params).objective);
        return report("delivery",
                      solve_delivery_allocation(g, agents, tasks, params).objective,
                      brute_force_delivery(g, agents, tasks, params).objective);
    }
    if (which == "mode") {
        std::vector<AllocTask> tasks;
        for (const Task& t : sc.tasks) tasks.push_back(to_alloc(t));
        std::vector<ModeAgent> mode_agents;
        for (const AgentState& a : sc.agents) {
            ModeAgent ma;
            ma.agent = {a.id, a.kind, a.speed, a.capacity, 0.0};
            ma.energy = a.energy;
            ma.energy_threshold = a.energy_threshold;
            mode_agents.push_back(ma);
        }
        TaskGraph g = build_task_graph(sc.map, sc.agents, sc.tasks);
        return report("mode", solve_mode_allocation(g, mode_agents, tasks, params).objective,
                      brute_force_mode_objective(g, mode_agents, tasks, params));
    }
    if (which == "path") {
        std::vector<const AgentState*> robots;
        for (const AgentState& a : sc.agents)
            if (a.kind == AgentKind::Robot) robots.push_back(&a);
        if (robots.size() != 2 || sf.goals.size() != 2) {
            std::cerr << "refused: path comparison needs exactly 2 robots and 2 goals\n";
            return 1;
        }
        auto goal_of = [&](int id) -> Position {
            for (const PathGoal& g : sf.goals)
                if (g.agent_id == id) return g.goal;
            throw std::runtime_error("no goal for agent " + std::to_string(id));
        };
        PathGraph g2{&sc.map};
        ReservationTable res;
        int total = 0;
        for (const AgentState* r : robots) {
            auto plan = plan_single(g2, *r, goal_of(r->id), 0, res, -1);
            if (!plan) {
                std::cerr << "production planner found no plan for robot " << r->id << "\n";
                return 1;
            }
            total += plan->arrival_step;
            res.add_plan(*plan, true);
        }
        auto joint = joint_two_robot_min_total_arrival(
            sc.map, robots[0]->position, goal_of(robots[0]->id), robots[1]->position,
            goal_of(robots[1]->id), 4 * sc.map.width() * sc.map.height());
        if (!joint) {
            std::cerr << "joint search found no conflict-free plan\n";
            return 1;
        }
        return report("path total arrival", total, *joint);
    }
    std::cerr << "unknown oracle target '" << which << "'\n";
    return 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"hs2pd: warehouse pickup-and-delivery planning and simulation"};
    app.require_subcommand(1);

    std::string scenario_path, out_dir = "out", render;
    std::vector<std::string> overrides;
    int max_steps = 100;
    auto* c_run = app.add_subcommand("run", "simulate a scenario");
    c_run->add_option("scenario", scenario_path, "scenario file")->required();
    c_run->add_option("--out", out_dir, "output directory for trace.csv and metrics.json");
    c_run->add_option("--set", overrides, "override, e.g. --set params.gamma=0.7");
    c_run->add_option("--max-steps", max_steps, "update-step cap");
    c_run->add_option("--render", render, "set to 'text' for per-update frame dumps");

    std::string trace_path, validate_scenario_path;
    auto* c_val = app.add_subcommand("validate", "re-check a recorded trace");
    c_val->add_option("trace", trace_path, "trace.csv from run")->required();
    c_val->add_option("scenario", validate_scenario_path, "scenario file")->required();

    std::string oracle_path, which;
    auto* c_oracle = app.add_subcommand("oracle", "compare a solver against brute force");
    c_oracle->add_option("instance", oracle_path, "small scenario instance")->required();
    c_oracle->add_option("--which", which, "pickup|delivery|mode|path")->required();

    auto* c_scenario = app.add_subcommand("scenario", "scenario utilities");
    std::string check_path;
    auto* c_check = c_scenario->add_subcommand("check", "validate a scenario file");
    c_check->add_option("file", check_path, "scenario file")->required();

    CLI11_PARSE(app, argc, argv);

    if (c_run->parsed()) return cmd_run(scenario_path, out_dir, overrides, max_steps, render);
    if (c_val->parsed()) return cmd_validate(trace_path, validate_scenario_path);
    if (c_oracle->parsed()) return cmd_oracle(oracle_path, which);
    if (c_scenario->parsed() && c_check->parsed()) return cmd_scenario_check(check_path);
    std::cerr << app.help();
    return 1;
}
