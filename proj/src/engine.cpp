#include "forage/engine.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "forage/io.hpp"

namespace forage {

const char* algorithm_name(Algorithm a) { return a == Algorithm::Compression ? "compression" : "spiral"; }

Algorithm parse_algorithm(const std::string& name) {
    if (name == "compression") return Algorithm::Compression;
    if (name == "spiral") return Algorithm::Spiral;
    throw std::invalid_argument("unknown algorithm: " + name);
}

const char* action_name(FoodEvent::Action a) {
    switch (a) {
        case FoodEvent::Action::Place: return "place";
        case FoodEvent::Action::Move: return "move";
        case FoodEvent::Action::Remove: return "remove";
    }
    return "?";
}

void FoodSchedule::validate() const {
    for (std::size_t i = 1; i < events.size(); ++i)
        if (events[i].step < events[i - 1].step) throw std::invalid_argument("schedule steps must be non-decreasing");
}

const char* stop_name(StopWhen s) {
    switch (s) {
        case StopWhen::Never: return "never";
        case StopWhen::Gathered: return "gathered";
        case StopWhen::Dispersed: return "dispersed";
        case StopWhen::SingleSpiral: return "single_spiral";
    }
    return "?";
}

StopWhen parse_stop(const std::string& name) {
    for (StopWhen s : {StopWhen::Never, StopWhen::Gathered, StopWhen::Dispersed, StopWhen::SingleSpiral})
        if (name == stop_name(s)) return s;
    throw std::invalid_argument("unknown stop predicate: " + name);
}

void RunConfig::validate() const {
    if (side < 6) throw std::invalid_argument("side must be at least 6");
    if (n < 1) throw std::invalid_argument("n must be positive");
    if (static_cast<long long>(n) + static_cast<long long>(food.size()) >= static_cast<long long>(side) * side)
        throw std::invalid_argument("n must be smaller than the number of sites");
    if (max_steps < 0 || cadence < 0 || check_every < 0) throw std::invalid_argument("negative step count");
    if (!rates.empty()) {
        if (static_cast<int>(rates.size()) != n) throw std::invalid_argument("rates must list one value per particle");
        for (double r : rates)
            if (!(r > 0)) throw std::invalid_argument("rates must be positive");
    }
    if (algorithm == Algorithm::Compression)
        compression.validate();
    else
        spiral.validate();
}

Simulation::Simulation(const RunConfig& config) : cfg_(config), rng_(config.seed) {
    cfg_.validate();
    if (cfg_.algorithm == Algorithm::Compression)
        cw_ = std::make_unique<CompressionWorld>(cfg_.side);
    else
        sw_ = std::make_unique<SpiralWorld>(cfg_.side);
    LatticeConfig& lc = cw_ ? cw_->config : sw_->config;
    for (Coord f : cfg_.food) lc.add_food(f);
    const Lattice& lat = lc.lattice();
    for (int i = 0; i < cfg_.n; ++i) {
        Coord c;
        do {
            c = lat.coord(uniform_int(rng_, lat.sites()));
        } while (lc.blocked(c));
        if (cw_)
            cw_->add(c, CState::D);
        else
            sw_->add(c, SpiralState::dispersion());
    }
    if (!cfg_.rates.empty()) {
        double acc = 0;
        for (double r : cfg_.rates) cumulative_.push_back(acc += r);
    }
}

const LatticeConfig& Simulation::lattice_config() const { return cw_ ? cw_->config : sw_->config; }

std::string Simulation::apply_food_event(const FoodEvent& e) {
    LatticeConfig& lc = cw_ ? cw_->config : sw_->config;
    const Lattice& lat = lc.lattice();
    Coord at = lat.wrap(e.at);
    switch (e.action) {
        case FoodEvent::Action::Place:
            if (lc.blocked(at)) return "site occupied";
            lc.add_food(at);
            break;
        case FoodEvent::Action::Remove:
            if (!lc.is_food(at)) return "no food at source";
            lc.remove_food(at);
            break;
        case FoodEvent::Action::Move: {
            Coord to = lat.wrap(e.to);
            if (!lc.is_food(at)) return "no food at source";
            if (to != at && lc.blocked(to)) return "site occupied";
            lc.remove_food(at);
            lc.add_food(to);
            break;
        }
    }
    return {};
}

std::string Simulation::set_param(const std::string& name, double value) {
    if (name == "lambda" || name == "p") {
        if (!cw_) return "parameter not used by this algorithm";
        CompressionParams p = cfg_.compression;
        (name == "lambda" ? p.lambda : p.p) = value;
        try {
            p.validate();
        } catch (const std::exception& ex) {
            return ex.what();
        }
        cfg_.compression = p;
        return {};
    }
    if (name == "rho") {
        if (!sw_) return "parameter not used by this algorithm";
        SpiralParams p{value};
        try {
            p.validate();
        } catch (const std::exception& ex) {
            return ex.what();
        }
        cfg_.spiral = p;
        return {};
    }
    return "unknown parameter: " + name;
}

int Simulation::pick_particle() {
    if (cumulative_.empty()) return uniform_int(rng_, cfg_.n);
    double u = uniform01(rng_) * cumulative_.back();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    return std::min(static_cast<int>(it - cumulative_.begin()), cfg_.n - 1);
}

StepRecord Simulation::step() {
    StepRecord r;
    r.step = step_;
    int id = pick_particle();
    r.particle = id;
    if (cw_) {
        r.before = state_name(cw_->state[id]);
        last_c_ = activate(*cw_, id, cfg_.compression, rng_);
        r.after = state_name(cw_->state[id]);
        if (last_c_.move && last_c_.move->executed) {
            r.moved = true;
            r.from = last_c_.move->proposal.from;
            r.to = last_c_.move->proposal.to;
        }
        r.structural = r.before != r.after || !last_c_.change.changed.empty() ||
                       (last_c_.move && last_c_.move->compression && last_c_.move->executed);
    } else {
        r.before = encode(sw_->state[id]);
        last_s_ = activate(*sw_, id, cfg_.spiral, rng_);
        r.after = encode(sw_->state[id]);
        r.moved = last_s_.moved;
        r.from = last_s_.from;
        r.to = last_s_.to;
        r.structural = r.before != r.after;
    }
    ++step_;
    return r;
}

std::string Simulation::particle_state(int i) const { return cw_ ? state_name(cw_->state[i]) : encode(sw_->state[i]); }

Coord Simulation::particle_pos(int i) const { return cw_ ? cw_->pos[i] : sw_->pos[i]; }

bool Simulation::stop_reached() const {
    switch (cfg_.stop) {
        case StopWhen::Never: return false;
        case StopWhen::Dispersed:
            if (cw_) return std::all_of(cw_->state.begin(), cw_->state.end(), [](CState s) { return s == CState::D; });
            return std::none_of(sw_->state.begin(), sw_->state.end(), [](const SpiralState& s) { return s.compression; });
        case StopWhen::Gathered:
            if (!cw_) return false;
            return std::all_of(cw_->state.begin(), cw_->state.end(), [](CState s) { return is_compression(s); }) &&
                   single_cluster_with_food(*cw_);
        case StopWhen::SingleSpiral:
            if (!sw_) return false;
            for (auto& s : find_spirals(*sw_))
                if (static_cast<int>(s.particles.size()) == cfg_.n) return true;
            return false;
    }
    return false;
}

MetricsFrame Simulation::metrics() const { return cw_ ? measure(*cw_, step_) : measure(*sw_, step_); }

std::uint64_t Simulation::digest() const {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&](std::uint64_t v) {
        for (int b = 0; b < 8; ++b) {
            h ^= (v >> (8 * b)) & 0xff;
            h *= 1099511628211ULL;
        }
    };
    mix(static_cast<std::uint64_t>(step_));
    std::vector<Coord> food = lattice_config().food();
    std::sort(food.begin(), food.end());
    for (Coord f : food) mix((static_cast<std::uint64_t>(f.x) << 32) | static_cast<std::uint32_t>(f.y));
    for (int i = 0; i < cfg_.n; ++i) {
        Coord c = particle_pos(i);
        mix((static_cast<std::uint64_t>(c.x) << 32) | static_cast<std::uint32_t>(c.y));
        for (char ch : particle_state(i)) mix(static_cast<unsigned char>(ch));
    }
    return h;
}

namespace {

std::string hex64(std::uint64_t v) {
    std::ostringstream os;
    os << std::hex;
    os.width(16);
    os.fill('0');
    os << v;
    return os.str();
}

}  // namespace

void EventLog::header(const RunConfig& cfg) {
    json j{{"format", "forage-events"}, {"version", kFormatVersion}, {"config", config_to_json(cfg)}};
    lines_.push_back(j.dump());
}

void EventLog::food(const FoodEvent& e) {
    json j = food_event_to_json(e);
    j["type"] = "food";
    lines_.push_back(j.dump());
}

void EventLog::param(long long step, const std::string& name, double value) {
    lines_.push_back(json{{"type", "param"}, {"step", step}, {"name", name}, {"value", value}}.dump());
}

void EventLog::control(long long step, const std::string& command) {
    lines_.push_back(json{{"type", "control"}, {"step", step}, {"command", command}}.dump());
}

void EventLog::check(long long step, std::uint64_t digest) {
    lines_.push_back(json{{"type", "check"}, {"step", step}, {"digest", hex64(digest)}}.dump());
}

void EventLog::finish(long long step, std::uint64_t digest) {
    lines_.push_back(json{{"type", "end"}, {"step", step}, {"digest", hex64(digest)}}.dump());
}

std::string EventLog::text() const {
    std::string out;
    for (auto& l : lines_) {
        out += l;
        out += '\n';
    }
    return out;
}

RunArtifact run(const RunConfig& config, const FoodSchedule& schedule, const StepObserver& observer) {
    schedule.validate();
    Simulation sim(config);
    RunArtifact art;
    art.log.header(config);
    art.initial_snapshot = snapshot_json(sim).dump();
    const long long cadence = config.effective_cadence();
    const long long every = config.effective_check_every();
    art.frames.push_back(sim.metrics());
    std::size_t next = 0;
    bool stop = config.stop != StopWhen::Never && sim.stop_reached();
    while (!stop && sim.steps_done() < config.max_steps) {
        long long t = sim.steps_done();
        while (next < schedule.events.size() && schedule.events[next].step <= t) {
            FoodEvent e = schedule.events[next++];
            e.step = t;
            std::string err = sim.apply_food_event(e);
            if (!err.empty()) throw std::runtime_error("schedule event at step " + std::to_string(t) + ": " + err);
            art.log.food(e);
        }
        StepRecord rec = sim.step();
        if (sim.steps_done() % every == 0) art.log.check(sim.steps_done(), sim.digest());
        if (sim.steps_done() % cadence == 0) art.frames.push_back(sim.metrics());
        if (observer && !observer(sim, rec)) break;
        if (config.stop != StopWhen::Never && rec.structural) stop = sim.stop_reached();
    }
    art.stopped = stop;
    art.steps = sim.steps_done();
    art.log.finish(sim.steps_done(), sim.digest());
    if (art.frames.back().step != sim.steps_done()) art.frames.push_back(sim.metrics());
    art.final_snapshot = snapshot_json(sim).dump();
    return art;
}

namespace {

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) out.push_back(line);
    return out;
}

// Invariant checks applied while replaying.
class ReplayChecker {
public:
    explicit ReplayChecker(const Simulation& sim) { reset_spiral(sim); }

    void food_changed(const Simulation& sim) { reset_spiral(sim); }

    std::string after_step(const Simulation& sim, const StepRecord& r) {
        if (sim.algorithm() == Algorithm::Compression) {
            const auto& a = sim.last_compression();
            if (a.move && a.move->compression && a.move->executed) {
                if (a.move->proposal.verdict != Verdict::Valid) return "executed compression move was not valid";
                if (a.move->disconnects) return "executed compression move caused local disconnection";
            }
            if (r.structural && !check_state_invariant(sim.compression_world()).ok) return "state invariant violated";
        } else if (r.structural) {
            int v = inconsistency_value(sim.spiral_world());
            if (v > inconsistency_) return "inconsistency value increased";
            int st = stage_given(sim.spiral_world(), v);
            if (stage_ >= 2 && st < stage_) return "stage regressed";
            inconsistency_ = v;
            stage_ = std::max(stage_, st);
        }
        return {};
    }

private:
    void reset_spiral(const Simulation& sim) {
        if (sim.algorithm() != Algorithm::Spiral) return;
        inconsistency_ = inconsistency_value(sim.spiral_world());
        stage_ = stage_given(sim.spiral_world(), inconsistency_);
    }

    int inconsistency_ = 0;
    int stage_ = 0;
};

}  // namespace

VerifyReport verify_log(const std::string& text) {
    VerifyReport rep;
    auto fail = [&](const std::string& msg) {
        rep.ok = false;
        rep.message = msg;
        return rep;
    };
    std::vector<std::string> lines = split_lines(text);
    if (lines.empty()) return fail("empty log");
    json head;
    try {
        head = json::parse(lines[0]);
    } catch (const std::exception& e) {
        return fail(std::string("line 1: unreadable header: ") + e.what());
    }
    if (head.value("format", "") != "forage-events") return fail("line 1: not an event log");
    if (head.value("version", 0) != kFormatVersion) return fail("line 1: unsupported version");
    RunConfig cfg;
    try {
        cfg = config_from_json(head.at("config"));
    } catch (const std::exception& e) {
        return fail(std::string("line 1: bad config: ") + e.what());
    }

    Simulation sim(cfg);
    ReplayChecker checker(sim);
    EventLog regen;
    regen.header(cfg);
    const long long every = cfg.effective_check_every();
    std::string violation;
    auto advance = [&](long long target) {
        while (sim.steps_done() < target) {
            StepRecord r = sim.step();
            if (violation.empty()) {
                std::string v = checker.after_step(sim, r);
                if (!v.empty()) violation = "step " + std::to_string(r.step) + ": " + v;
            }
            if (sim.steps_done() % every == 0) regen.check(sim.steps_done(), sim.digest());
        }
    };

    bool ended = false;
    for (std::size_t i = 1; i < lines.size() && !ended; ++i) {
        json j;
        try {
            j = json::parse(lines[i]);
        } catch (const std::exception& e) {
            return fail("line " + std::to_string(i + 1) + ": unreadable");
        }
        std::string type = j.value("type", "");
        long long step = j.value("step", -1LL);
        if (step < sim.steps_done()) return fail("line " + std::to_string(i + 1) + ": step goes backwards");
        if (type == "food") {
            advance(step);
            FoodEvent e;
            try {
                e = food_event_from_json(j);
            } catch (const std::exception& ex) {
                return fail("line " + std::to_string(i + 1) + ": " + ex.what());
            }
            std::string err = sim.apply_food_event(e);
            if (!err.empty()) return fail("line " + std::to_string(i + 1) + ": illegal food event: " + err);
            checker.food_changed(sim);
            regen.food(e);
        } else if (type == "param") {
            advance(step);
            std::string err = sim.set_param(j.value("name", ""), j.value("value", 0.0));
            if (!err.empty()) return fail("line " + std::to_string(i + 1) + ": illegal parameter: " + err);
            regen.param(step, j.value("name", ""), j.value("value", 0.0));
        } else if (type == "control") {
            advance(step);
            regen.control(step, j.value("command", ""));
        } else if (type == "check") {
            advance(step);
        } else if (type == "end") {
            advance(step);
            regen.finish(sim.steps_done(), sim.digest());
            ended = true;
        } else {
            return fail("line " + std::to_string(i + 1) + ": unknown entry type");
        }
        if (!violation.empty()) return fail(violation);
    }
    rep.steps = sim.steps_done();
    if (!ended) return fail("log has no end entry");
    const auto& got = regen.lines();
    for (std::size_t i = 0; i < std::max(got.size(), lines.size()); ++i) {
        if (i >= got.size() || i >= lines.size() || got[i] != lines[i])
            return fail("line " + std::to_string(i + 1) + ": replay differs");
    }
    return rep;
}

}  // namespace forage
