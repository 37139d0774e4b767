#include "hs2pd/scenario_io.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace hs2pd {

using nlohmann::json;

namespace {

void require_keys(const json& obj, const std::string& where,
                  const std::set<std::string>& allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key()))
            throw ScenarioParseError("unknown field '" + it.key() + "' in " + where);
}

double get_num(const json& obj, const std::string& where, const std::string& key,
               std::optional<double> fallback = std::nullopt) {
    if (!obj.contains(key)) {
        if (fallback) return *fallback;
        throw ScenarioParseError("missing field '" + key + "' in " + where);
    }
    if (!obj[key].is_number())
        throw ScenarioParseError("field '" + key + "' in " + where + " must be a number");
    return obj[key].get<double>();
}

bool get_flag(const json& obj, const std::string& where, const std::string& key,
              bool fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj[key];
    if (v.is_boolean()) return v.get<bool>();
    if (v.is_number_integer()) return v.get<int>() != 0; // Table-style 0/1 flags
    throw ScenarioParseError("field '" + key + "' in " + where + " must be a boolean or 0/1");
}

Position get_pos(const json& v, const std::string& where) {
    if (v.is_array() && v.size() == 2 && v[0].is_number_integer() && v[1].is_number_integer())
        return {v[0].get<int>(), v[1].get<int>()};
    throw ScenarioParseError("expected a [col,row] pair in " + where);
}

} // namespace

ScenarioFile load_scenario_text(const std::string& text, const std::string& name_hint) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ScenarioParseError(std::string("scenario is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ScenarioParseError("scenario document must be a JSON object");
    require_keys(doc, "scenario", {"name", "map", "params", "agents", "tasks", "events", "goals"});

    ScenarioFile out;
    Scenario& s = out.scenario;
    s.name = doc.value("name", name_hint);

    // map
    if (!doc.contains("map")) throw ScenarioParseError("missing 'map' section");
    const json& jm = doc["map"];
    require_keys(jm, "map", {"grid_side", "rows"});
    if (!jm.contains("rows") || !jm["rows"].is_array())
        throw ScenarioParseError("map.rows must be an array of strings");
    std::vector<std::string> rows;
    for (const json& r : jm["rows"]) {
        if (!r.is_string()) throw ScenarioParseError("map.rows entries must be strings");
        rows.push_back(r.get<std::string>());
    }
    double grid_side = get_num(jm, "map", "grid_side", 1.0);
    try {
        s.map = GridMap::from_rows(rows, grid_side);
    } catch (const std::exception& e) {
        throw ScenarioParseError(std::string("map: ") + e.what());
    }

    // params
    const json jp = doc.contains("params") ? doc["params"] : json::object();
    require_keys(jp, "params",
                 {"time_unit", "T", "T_D", "phi", "gamma", "alpha", "big_m", "energy_per_move",
                  "charge_duration", "seed"});
    double unit = 1.0;
    if (jp.contains("time_unit")) {
        std::string u = jp["time_unit"].get<std::string>();
        if (u == "s")
            unit = 1.0;
        else if (u == "min")
            unit = 60.0;
        else
            throw ScenarioParseError("params.time_unit must be 's' or 'min'");
    }
    s.params.update_period = get_num(jp, "params", "T", 5.0);
    s.params.horizon = get_num(jp, "params", "T_D", 30.0);
    s.params.phi = get_num(jp, "params", "phi", grid_side);
    s.params.gamma = get_num(jp, "params", "gamma", 0.5);
    s.params.alpha = get_num(jp, "params", "alpha", 0.4);
    s.params.big_m = get_num(jp, "params", "big_m", 0.0);
    s.params.energy_per_move = get_num(jp, "params", "energy_per_move", 0.0);
    s.params.charge_duration = get_num(jp, "params", "charge_duration", 30.0);
    s.params.seed = static_cast<uint64_t>(get_num(jp, "params", "seed", 0.0));

    // agents
    if (!doc.contains("agents") || !doc["agents"].is_array())
        throw ScenarioParseError("missing 'agents' array");
    double robot_speed = 0.0;
    for (const json& ja : doc["agents"]) {
        std::string where = "agents[" + std::to_string(s.agents.size()) + "]";
        require_keys(ja, where,
                     {"id", "kind", "col", "row", "capacity", "energy", "energy_threshold",
                      "speed"});
        AgentState a;
        a.id = static_cast<int>(get_num(ja, where, "id"));
        std::string kind = ja.value("kind", "robot");
        if (kind == "robot")
            a.kind = AgentKind::Robot;
        else if (kind == "human")
            a.kind = AgentKind::Human;
        else
            throw ScenarioParseError(where + ".kind must be 'robot' or 'human'");
        a.position = {static_cast<int>(get_num(ja, where, "col")),
                      static_cast<int>(get_num(ja, where, "row"))};
        a.capacity = get_num(ja, where, "capacity");
        a.energy = get_num(ja, where, "energy", 1e9);
        a.energy_threshold = get_num(ja, where, "energy_threshold", 0.0);
        if (ja.contains("speed")) a.speed = get_num(ja, where, "speed");
        else a.speed = 0.0; // resolved below
        s.agents.push_back(a);
        if (a.kind == AgentKind::Robot && a.speed > 0.0) robot_speed = a.speed;
    }
    if (robot_speed == 0.0) robot_speed = 1.0;
    for (AgentState& a : s.agents)
        if (a.speed == 0.0) a.speed = robot_speed; // humans default to robot speed

    // tasks
    const json jt = doc.contains("tasks") ? doc["tasks"] : json::array();
    for (const json& ji : jt) {
        std::string where = "tasks[" + std::to_string(s.tasks.size()) + "]";
        require_keys(ji, where,
                     {"id", "mode", "open", "close", "load", "service_time", "origin",
                      "destination", "human_only", "robot_only", "release_time"});
        Task t;
        t.id = static_cast<int>(get_num(ji, where, "id"));
        std::string mode = ji.value("mode", "pickup");
        if (mode == "pickup")
            t.mode = TaskMode::Pickup;
        else if (mode == "delivery")
            t.mode = TaskMode::Delivery;
        else
            throw ScenarioParseError(where + ".mode must be 'pickup' or 'delivery'");
        t.window.open = get_num(ji, where, "open") * unit;
        t.window.close = get_num(ji, where, "close") * unit;
        t.load = get_num(ji, where, "load");
        t.service_time = get_num(ji, where, "service_time", s.params.phi);
        if (!ji.contains("origin")) throw ScenarioParseError(where + " needs an origin");
        t.origin = get_pos(ji["origin"], where + ".origin");
        if (ji.contains("destination"))
            t.destination = get_pos(ji["destination"], where + ".destination");
        else if (t.mode == TaskMode::Pickup && s.map.warehouse_count() == 1)
            t.destination = s.map.warehouse();
        else
            throw ScenarioParseError(where + " needs a destination");
        t.human_only = get_flag(ji, where, "human_only", false);
        t.robot_only = get_flag(ji, where, "robot_only", false);
        t.release_time = get_num(ji, where, "release_time", 0.0) * unit;
        t.status = TaskStatus::Unreleased;
        s.tasks.push_back(t);
    }

    // events
    const json je = doc.contains("events") ? doc["events"] : json::array();
    for (const json& ji : je) {
        std::string where = "events[" + std::to_string(s.events.size()) + "]";
        require_keys(ji, where, {"at", "kind", "task", "agent", "amount"});
        Event e;
        e.at = get_num(ji, where, "at") * unit;
        std::string kind = ji.value("kind", "");
        if (kind == "release_task")
            e.kind = EventKind::ReleaseTask;
        else if (kind == "cancel_task")
            e.kind = EventKind::CancelTask;
        else if (kind == "human_wrong_task")
            e.kind = EventKind::HumanWrongTask;
        else if (kind == "energy_drop")
            e.kind = EventKind::EnergyDrop;
        else
            throw ScenarioParseError(where + ".kind is not a known event kind");
        if (ji.contains("task")) e.task_id = static_cast<int>(get_num(ji, where, "task"));
        if (ji.contains("agent")) e.agent_id = static_cast<int>(get_num(ji, where, "agent"));
        if (ji.contains("amount")) e.amount = get_num(ji, where, "amount");
        s.events.push_back(e);
    }

    // goals (oracle path instances)
    if (doc.contains("goals")) {
        for (const json& ji : doc["goals"]) {
            std::string where = "goals[" + std::to_string(out.goals.size()) + "]";
            require_keys(ji, where, {"agent", "col", "row"});
            PathGoal g;
            g.agent_id = static_cast<int>(get_num(ji, where, "agent"));
            g.goal = {static_cast<int>(get_num(ji, where, "col")),
                      static_cast<int>(get_num(ji, where, "row"))};
            out.goals.push_back(g);
        }
    }

    if (s.params.big_m <= 0.0) s.params.big_m = default_big_m(s.map, s.tasks.size());
    return out;
}

ScenarioFile load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioParseError("cannot open scenario file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    std::string name = path;
    if (auto slash = name.find_last_of('/'); slash != std::string::npos)
        name = name.substr(slash + 1);
    if (auto dot = name.find_last_of('.'); dot != std::string::npos) name = name.substr(0, dot);
    return load_scenario_text(buf.str(), name);
}

std::string save_scenario_text(const Scenario& s) {
    json doc;
    doc["name"] = s.name;
    doc["map"] = {{"grid_side", s.map.grid_side()}, {"rows", s.map.to_rows()}};
    doc["params"] = {{"T", s.params.update_period},
                     {"T_D", s.params.horizon},
                     {"phi", s.params.phi},
                     {"gamma", s.params.gamma},
                     {"alpha", s.params.alpha},
                     {"big_m", s.params.big_m},
                     {"energy_per_move", s.params.energy_per_move},
                     {"charge_duration", s.params.charge_duration},
                     {"seed", s.params.seed}};
    doc["agents"] = json::array();
    for (const AgentState& a : s.agents)
        doc["agents"].push_back({{"id", a.id},
                                 {"kind", agent_kind_name(a.kind)},
                                 {"col", a.position.col},
                                 {"row", a.position.row},
                                 {"capacity", a.capacity},
                                 {"energy", a.energy},
                                 {"energy_threshold", a.energy_threshold},
                                 {"speed", a.speed}});
    doc["tasks"] = json::array();
    for (const Task& t : s.tasks)
        doc["tasks"].push_back({{"id", t.id},
                                {"mode", task_mode_name(t.mode)},
                                {"open", t.window.open},
                                {"close", t.window.close},
                                {"load", t.load},
                                {"service_time", t.service_time},
                                {"origin", {t.origin.col, t.origin.row}},
                                {"destination", {t.destination.col, t.destination.row}},
                                {"human_only", t.human_only},
                                {"robot_only", t.robot_only},
                                {"release_time", t.release_time}});
    doc["events"] = json::array();
    for (const Event& e : s.events) {
        json ev = {{"at", e.at}, {"kind", event_kind_name(e.kind)}};
        if (e.task_id >= 0) ev["task"] = e.task_id;
        if (e.agent_id >= 0) ev["agent"] = e.agent_id;
        if (e.kind == EventKind::EnergyDrop) ev["amount"] = e.amount;
        doc["events"].push_back(ev);
    }
    return doc.dump(2) + "\n";
}

void apply_override(Scenario& s, const std::string& spec) {
    auto eq = spec.find('=');
    if (eq == std::string::npos)
        throw ScenarioParseError("override '" + spec + "' must look like section.field=value");
    std::string key = spec.substr(0, eq);
    std::string value = spec.substr(eq + 1);
    double num = 0.0;
    try {
        num = std::stod(value);
    } catch (const std::exception&) {
        throw ScenarioParseError("override value '" + value + "' is not a number");
    }
    if (key == "params.T")
        s.params.update_period = num;
    else if (key == "params.T_D")
        s.params.horizon = num;
    else if (key == "params.phi")
        s.params.phi = num;
    else if (key == "params.gamma")
        s.params.gamma = num;
    else if (key == "params.alpha")
        s.params.alpha = num;
    else if (key == "params.big_m")
        s.params.big_m = num;
    else if (key == "params.energy_per_move")
        s.params.energy_per_move = num;
    else if (key == "params.charge_duration")
        s.params.charge_duration = num;
    else if (key == "params.seed")
        s.params.seed = static_cast<uint64_t>(num);
    else
        throw ScenarioParseError("unknown override key '" + key + "'");
}

std::string metrics_to_json(const Metrics& m) {
    json doc;
    doc["completion_step"] = m.completion_step;
    doc["all_assigned_step"] = m.all_assigned_step;
    doc["total_robot_distance"] = m.total_robot_distance;
    doc["total_wait_steps"] = m.total_wait_steps;
    doc["collisions"] = m.collisions;
    doc["per_task"] = json::array();
    for (const TaskMetric& t : m.per_task)
        doc["per_task"].push_back({{"id", t.id},
                                   {"assigned_step", t.assigned_step},
                                   {"completed_step", t.completed_step},
                                   {"agent", t.agent}});
    doc["solver_ms_per_update"] = m.solver_ms_per_update;
    return doc.dump(2) + "\n";
}

} // namespace hs2pd
