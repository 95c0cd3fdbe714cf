#include "forage/io.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace forage {

json coord_json(Coord c) { return json::array({c.x, c.y}); }

Coord coord_from(const json& j) {
    if (!j.is_array() || j.size() != 2) throw std::invalid_argument("coordinate must be [x, y]");
    return {j[0].get<int>(), j[1].get<int>()};
}

json config_to_json(const RunConfig& c) {
    json food = json::array();
    for (Coord f : c.food) food.push_back(coord_json(f));
    json j{{"side", c.side},
           {"n", c.n},
           {"algorithm", algorithm_name(c.algorithm)},
           {"lambda", c.compression.lambda},
           {"p", c.compression.p},
           {"rho", c.spiral.rho},
           {"seed", c.seed},
           {"max_steps", c.max_steps},
           {"cadence", c.cadence},
           {"check_every", c.check_every},
           {"stop", stop_name(c.stop)},
           {"food", food}};
    if (!c.rates.empty()) j["rates"] = c.rates;
    return j;
}

RunConfig config_from_json(const json& j) {
    RunConfig c;
    c.side = j.value("side", c.side);
    c.n = j.value("n", c.n);
    c.algorithm = parse_algorithm(j.value("algorithm", std::string("compression")));
    c.compression.lambda = j.value("lambda", c.compression.lambda);
    c.compression.p = j.value("p", c.compression.p);
    c.spiral.rho = j.value("rho", c.spiral.rho);
    c.seed = j.value("seed", c.seed);
    c.max_steps = j.value("max_steps", c.max_steps);
    c.cadence = j.value("cadence", c.cadence);
    c.check_every = j.value("check_every", c.check_every);
    c.stop = parse_stop(j.value("stop", std::string("never")));
    if (j.contains("food"))
        for (auto& f : j.at("food")) c.food.push_back(coord_from(f));
    if (j.contains("rates")) c.rates = j.at("rates").get<std::vector<double>>();
    c.validate();
    return c;
}

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

RunConfig parse_key_value_config(std::istream& in) {
    json j = json::object();
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq)), val = trim(line.substr(eq + 1));
        try {
            if (key == "algorithm" || key == "stop") {
                j[key] = val;
            } else if (key == "food") {
                json arr = json::array();
                std::istringstream items(val);
                std::string item;
                while (std::getline(items, item, ';')) {
                    item = trim(item);
                    if (item.empty()) continue;
                    auto comma = item.find(',');
                    if (comma == std::string::npos) throw std::invalid_argument("food entries are x,y");
                    arr.push_back({std::stoi(item.substr(0, comma)), std::stoi(item.substr(comma + 1))});
                }
                j[key] = arr;
            } else if (key == "lambda" || key == "p" || key == "rho") {
                j[key] = std::stod(val);
            } else if (key == "seed") {
                j[key] = static_cast<std::uint64_t>(std::stoull(val));
            } else if (key == "side" || key == "n" || key == "max_steps" || key == "cadence" || key == "check_every") {
                j[key] = std::stoll(val);
            } else {
                throw std::invalid_argument("unknown key '" + key + "'");
            }
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return config_from_json(j);
}

json food_event_to_json(const FoodEvent& e) {
    json j{{"step", e.step}, {"action", action_name(e.action)}, {"at", coord_json(e.at)}};
    if (e.action == FoodEvent::Action::Move) j["to"] = coord_json(e.to);
    return j;
}

FoodEvent food_event_from_json(const json& j) {
    FoodEvent e;
    e.step = j.at("step").get<long long>();
    std::string a = j.at("action").get<std::string>();
    if (a == "place")
        e.action = FoodEvent::Action::Place;
    else if (a == "move")
        e.action = FoodEvent::Action::Move;
    else if (a == "remove")
        e.action = FoodEvent::Action::Remove;
    else
        throw std::invalid_argument("unknown food action: " + a);
    e.at = coord_from(j.at("at"));
    if (e.action == FoodEvent::Action::Move) e.to = coord_from(j.at("to"));
    return e;
}

FoodSchedule schedule_from_json(const json& j) {
    FoodSchedule s;
    if (!j.is_array()) throw std::invalid_argument("schedule must be a JSON array");
    for (auto& e : j) s.events.push_back(food_event_from_json(e));
    s.validate();
    return s;
}

json schedule_to_json(const FoodSchedule& s) {
    json j = json::array();
    for (auto& e : s.events) j.push_back(food_event_to_json(e));
    return j;
}

json frame_to_json(const MetricsFrame& f) {
    return json{{"step", f.step},
                {"phi", f.phi},
                {"phi_c", f.phi_c},
                {"phi_dt", f.phi_dt},
                {"phi_t", f.phi_t},
                {"perimeter", f.perimeter},
                {"alpha", f.alpha},
                {"n_residual", f.n_residual},
                {"inconsistency", f.inconsistency},
                {"stage", f.stage},
                {"cluster_count", f.cluster_count},
                {"n_spiral", f.n_spiral},
                {"density", f.density},
                {"n_by_state", f.n_by_state}};
}

json snapshot_json(const Simulation& sim) {
    json particles = json::array();
    for (int i = 0; i < sim.size(); ++i) {
        Coord c = sim.particle_pos(i);
        particles.push_back({c.x, c.y, sim.particle_state(i)});
    }
    json food = json::array();
    for (Coord f : sim.lattice_config().food()) food.push_back(coord_json(f));
    return json{{"type", "snapshot"},
                {"version", kFormatVersion},
                {"algorithm", algorithm_name(sim.algorithm())},
                {"step", sim.steps_done()},
                {"side", sim.lattice_config().side()},
                {"particles", particles},
                {"food", food},
                {"metrics", frame_to_json(sim.metrics())}};
}

json DeltaTracker::next(const Simulation& sim) {
    std::map<std::pair<int, int>, std::string> cells;
    for (int i = 0; i < sim.size(); ++i) {
        Coord c = sim.particle_pos(i);
        cells[{c.x, c.y}] = sim.particle_state(i);
    }
    std::vector<Coord> food = sim.lattice_config().food();
    std::sort(food.begin(), food.end());
    if (!primed_) {
        primed_ = true;
        cells_ = std::move(cells);
        food_ = std::move(food);
        return snapshot_json(sim);
    }
    json changed = json::array();
    for (auto& [k, v] : cells) {
        auto it = cells_.find(k);
        if (it == cells_.end() || it->second != v) changed.push_back({k.first, k.second, v});
    }
    for (auto& [k, v] : cells_)
        if (!cells.count(k)) changed.push_back({k.first, k.second, nullptr});
    json delta{{"type", "delta"},
               {"version", kFormatVersion},
               {"step", sim.steps_done()},
               {"changed", changed},
               {"metrics", frame_to_json(sim.metrics())}};
    if (food != food_) {
        json f = json::array();
        for (Coord c : food) f.push_back(coord_json(c));
        delta["food"] = f;
    }
    cells_ = std::move(cells);
    food_ = std::move(food);
    return delta;
}

json moves_to_json(const MoveList& moves) {
    json j = json::array();
    for (auto& [a, b] : moves) j.push_back({coord_json(a), coord_json(b)});
    return j;
}

MoveList moves_from_json(const json& j) {
    MoveList out;
    for (auto& m : j) out.emplace_back(coord_from(m.at(0)), coord_from(m.at(1)));
    return out;
}

std::string frame_message(const json& message) {
    std::string body = message.dump();
    return std::to_string(body.size()) + "\n" + body;
}

std::vector<json> take_messages(std::string& buffer) {
    std::vector<json> out;
    while (true) {
        auto nl = buffer.find('\n');
        if (nl == std::string::npos) break;
        std::size_t len = std::stoul(buffer.substr(0, nl));
        if (buffer.size() < nl + 1 + len) break;
        out.push_back(json::parse(buffer.substr(nl + 1, len)));
        buffer.erase(0, nl + 1 + len);
    }
    return out;
}

}  // namespace forage
