#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>
#include <unordered_set>

#include <CLI11.hpp>

#include "forage/comb.hpp"
#include "forage/engine.hpp"
#include "forage/io.hpp"
#include "forage/move_rules.hpp"
#include "forage/service.hpp"

namespace fs = std::filesystem;
using namespace forage;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

std::vector<Coord> parse_food_list(const std::string& s) {
    std::vector<Coord> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ';')) {
        if (item.empty()) continue;
        auto comma = item.find(',');
        if (comma == std::string::npos) throw std::invalid_argument("food entries are x,y separated by ';'");
        out.push_back({std::stoi(item.substr(0, comma)), std::stoi(item.substr(comma + 1))});
    }
    return out;
}

struct RunFlags {
    std::string config_path;
    std::string algo;
    int n = 0, side = 0;
    double lambda = 0, p = 0, rho = 0;
    std::uint64_t seed = 0;
    long long steps = 0, cadence = 0;
    std::string stop, food;

    void add(CLI::App* app) {
        app->add_option("--config", config_path, "key = value configuration file");
        app->add_option("--algo", algo, "compression or spiral");
        app->add_option("--n", n, "particle count");
        app->add_option("--side", side, "torus side length");
        app->add_option("--lambda", lambda, "compression bias");
        app->add_option("--p", p, "demotion probability");
        app->add_option("--rho", rho, "spiral consistency probability");
        app->add_option("--seed", seed);
        app->add_option("--steps", steps, "step cap");
        app->add_option("--cadence", cadence, "metrics cadence in steps");
        app->add_option("--stop", stop, "never, gathered, dispersed or single_spiral");
        app->add_option("--food", food, "x,y;x,y");
    }

    RunConfig build(CLI::App* app) const {
        RunConfig c;
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw std::runtime_error("cannot read " + config_path);
            c = parse_key_value_config(in);
        }
        auto given = [&](const char* name) { return app->count(name) > 0; };
        if (given("--algo")) c.algorithm = parse_algorithm(algo);
        if (given("--n")) c.n = n;
        if (given("--side")) c.side = side;
        if (given("--lambda")) c.compression.lambda = lambda;
        if (given("--p")) c.compression.p = p;
        if (given("--rho")) c.spiral.rho = rho;
        if (given("--seed")) c.seed = seed;
        if (given("--steps")) c.max_steps = steps;
        if (given("--cadence")) c.cadence = cadence;
        if (given("--stop")) c.stop = parse_stop(stop);
        if (given("--food")) c.food = parse_food_list(food);
        c.validate();
        return c;
    }
};

int cmd_run(CLI::App* app, const RunFlags& flags, const std::string& schedule_path, const std::string& out_dir) {
    RunConfig cfg = flags.build(app);
    if (cfg.max_steps <= 0) throw std::invalid_argument("--steps must be positive");
    FoodSchedule schedule;
    if (!schedule_path.empty()) schedule = schedule_from_json(json::parse(read_file(schedule_path)));
    RunArtifact art = run(cfg, schedule);
    fs::create_directories(out_dir);
    std::string csv = csv_header() + "\n";
    for (const auto& f : art.frames) csv += to_csv(f) + "\n";
    write_file(fs::path(out_dir) / "metrics.csv", csv);
    write_file(fs::path(out_dir) / "run.events", art.log.text());
    write_file(fs::path(out_dir) / "initial.json", art.initial_snapshot + "\n");
    write_file(fs::path(out_dir) / "final.json", art.final_snapshot + "\n");
    std::cout << art.steps << " steps" << (art.stopped ? ", stop predicate reached" : "") << ", artifacts in "
              << out_dir << "\n";
    return 0;
}

// Random connected particle set grown outward from food at the origin.
std::vector<Coord> grow_cluster(int n, std::mt19937_64& rng) {
    std::unordered_set<Coord> cells{{0, 0}};
    std::vector<Coord> frontier, out;
    auto extend = [&](Coord c) {
        for (const auto& d : kOffsets) {
            Coord m{c.x + d.x, c.y + d.y};
            if (!cells.count(m) && std::find(frontier.begin(), frontier.end(), m) == frontier.end())
                frontier.push_back(m);
        }
    };
    extend({0, 0});
    while (static_cast<int>(out.size()) < n) {
        std::size_t i = rng() % frontier.size();
        Coord pick = frontier[i];
        frontier.erase(frontier.begin() + static_cast<std::ptrdiff_t>(i));
        cells.insert(pick);
        out.push_back(pick);
        extend(pick);
    }
    return out;
}

struct CheckTally {
    int flattened = 0;
    long long moves = 0, invalid = 0, disconnected = 0, irreversible = 0;
};

// Replays moves on a torus large enough to avoid wrapping and audits each one.
class Replay {
public:
    Replay(const std::vector<Coord>& particles, int side) : lat_(side) {
        cells_.insert({0, 0});
        for (Coord c : particles) cells_.insert(lat_.wrap(c));
    }

    void step(Coord from, Coord to, CheckTally& t) {
        from = lat_.wrap(from);
        to = lat_.wrap(to);
        ++t.moves;
        bool before_ok = hole_free();
        auto cluster = [&](Coord c) { return cells_.count(lat_.wrap(c)) > 0; };
        if (from == Coord{0, 0} || !cells_.count(from) ||
            evaluate_move(lat_, from, to, cluster, cluster) != Verdict::Valid)
            ++t.invalid;
        cells_.erase(from);
        cells_.insert(to);
        if (!connected()) ++t.disconnected;
        if (before_ok && hole_free() && evaluate_move(lat_, to, from, cluster, cluster) != Verdict::Valid)
            ++t.irreversible;
    }

private:
    bool connected() const {
        std::unordered_set<Coord> seen{{0, 0}};
        std::vector<Coord> stack{{0, 0}};
        while (!stack.empty()) {
            Coord c = stack.back();
            stack.pop_back();
            for (Coord m : lat_.neighbors(c))
                if (cells_.count(m) && seen.insert(m).second) stack.push_back(m);
        }
        return seen.size() == cells_.size();
    }
    bool hole_free() const {
        const int total = lat_.sites() - static_cast<int>(cells_.size());
        Coord start{lat_.side() / 2, lat_.side() / 2};
        std::unordered_set<Coord> seen{start};
        std::vector<Coord> stack{start};
        while (!stack.empty()) {
            Coord c = stack.back();
            stack.pop_back();
            for (Coord m : lat_.neighbors(c))
                if (!cells_.count(m) && seen.insert(m).second) stack.push_back(m);
        }
        return static_cast<int>(seen.size()) == total;
    }

    Lattice lat_;
    std::unordered_set<Coord> cells_;
};

int cmd_comb_check(int n_max, int cases, std::uint64_t seed, const std::string& input, const std::string& emit) {
    std::vector<std::vector<Coord>> configs;
    if (!input.empty()) {
        for (const auto& c : json::parse(read_file(input))) {
            std::vector<Coord> ps;
            for (const auto& p : c) ps.push_back(coord_from(p));
            configs.push_back(std::move(ps));
        }
    } else {
        if (n_max < 1) throw std::invalid_argument("--n-max must be at least 1");
        std::mt19937_64 rng(seed);
        for (int i = 0; i < cases; ++i) configs.push_back(grow_cluster(1 + static_cast<int>(rng() % n_max), rng));
    }
    CheckTally t;
    json emitted = json::array();
    for (std::size_t i = 0; i < configs.size(); ++i) {
        const auto& ps = configs[i];
        MoveList moves;
        bool ok = false;
        try {
            CombOracle oracle(ps);
            moves = oracle.flatten_to_line();
            ok = oracle.is_line();
        } catch (const std::exception& e) {
            std::cerr << "case " << i << ": " << e.what() << "\n";
        }
        int side = 4 * static_cast<int>(ps.size()) + 16;
        Replay replay(ps, side);
        for (auto [from, to] : moves) replay.step(from, to, t);
        if (ok) ++t.flattened;
        if (!emit.empty()) emitted.push_back(moves_to_json(moves));
    }
    if (!emit.empty()) write_file(emit, emitted.dump() + "\n");
    std::cout << t.flattened << "/" << configs.size() << " flattened, " << t.invalid << " invalid moves\n"
              << t.moves << " moves, " << t.disconnected << " disconnections, " << t.irreversible
              << " irreversible\n";
    bool pass = t.flattened == static_cast<int>(configs.size()) && t.invalid == 0 && t.disconnected == 0 &&
                t.irreversible == 0;
    return pass ? 0 : 1;
}

int cmd_verify(const std::string& path) {
    VerifyReport rep = verify_log(read_file(path));
    if (!rep.ok) {
        std::cerr << "FAIL: " << rep.message << "\n";
        return 1;
    }
    std::cout << "OK: " << rep.steps << " steps replayed\n";
    return 0;
}

int cmd_serve(CLI::App* app, const RunFlags& flags, double speed) {
    RunConfig cfg = flags.build(app);
    ServeOptions opts = serve_options_from_env();
    Session session(cfg, speed);
    HttpService http(session);
    std::thread worker([&] { session.run_worker(); });
    std::cout << "serving on " << opts.host << ":" << opts.port << "\n" << std::flush;
    bool ok = http.listen(opts);
    session.stop();
    worker.join();
    if (!ok) {
        std::cerr << "could not bind " << opts.host << ":" << opts.port << "\n";
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Foraging particle systems: batch runs, comb oracle checks, replay and live service"};
    app.require_subcommand(1);

    RunFlags run_flags;
    std::string schedule_path, out_dir = "out";
    auto* run_cmd = app.add_subcommand("run", "simulate and write metrics, event log and snapshots");
    run_flags.add(run_cmd);
    run_cmd->add_option("--schedule", schedule_path, "food schedule JSON");
    run_cmd->add_option("--out", out_dir, "output directory");

    int n_max = 10, cases = 200;
    std::uint64_t comb_seed = 1;
    std::string comb_input, comb_emit;
    auto* comb_cmd = app.add_subcommand("comb-check", "flatten configurations to a line and audit every move");
    comb_cmd->add_option("--n-max", n_max);
    comb_cmd->add_option("--cases", cases);
    comb_cmd->add_option("--seed", comb_seed);
    comb_cmd->add_option("--input", comb_input, "JSON list of particle lists relative to food");
    comb_cmd->add_option("--emit", comb_emit, "write the move lists as JSON");

    std::string log_path;
    auto* verify_cmd = app.add_subcommand("verify", "replay an event log and check invariants");
    verify_cmd->add_option("--log", log_path)->required();

    RunFlags serve_flags;
    double speed = 1000;
    auto* serve_cmd = app.add_subcommand("serve", "live service; bind address from FORAGE_BIND");
    serve_flags.add(serve_cmd);
    serve_cmd->add_option("--speed", speed, "steps per second");

    CLI11_PARSE(app, argc, argv);
    try {
        if (*run_cmd) return cmd_run(run_cmd, run_flags, schedule_path, out_dir);
        if (*comb_cmd) return cmd_comb_check(n_max, cases, comb_seed, comb_input, comb_emit);
        if (*verify_cmd) return cmd_verify(log_path);
        if (*serve_cmd) return cmd_serve(serve_cmd, serve_flags, speed);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
