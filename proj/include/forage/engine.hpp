#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "forage/analysis.hpp"
#include "forage/compression.hpp"
#include "forage/spiral.hpp"

namespace forage {

enum class Algorithm { Compression, Spiral };

const char* algorithm_name(Algorithm a);
Algorithm parse_algorithm(const std::string& name);

struct FoodEvent {
    enum class Action { Place, Move, Remove };
    long long step = 0;
    Action action = Action::Place;
    Coord at;
    Coord to;  // Move only
};

const char* action_name(FoodEvent::Action a);

struct FoodSchedule {
    std::vector<FoodEvent> events;
    // Throws when steps decrease.
    void validate() const;
};

enum class StopWhen { Never, Gathered, Dispersed, SingleSpiral };

const char* stop_name(StopWhen s);
StopWhen parse_stop(const std::string& name);

struct RunConfig {
    int side = 32;
    int n = 100;
    Algorithm algorithm = Algorithm::Compression;
    CompressionParams compression;
    SpiralParams spiral;
    std::uint64_t seed = 1;
    long long max_steps = 0;
    long long cadence = 0;  // 0 means one sweep (n steps)
    std::vector<Coord> food;
    StopWhen stop = StopWhen::Never;
    std::vector<double> rates;  // per-particle activation rates; empty means uniform
    long long check_every = 0;  // digest lines in the event log; 0 means cadence

    void validate() const;
    long long effective_cadence() const { return cadence > 0 ? cadence : n; }
    long long effective_check_every() const { return check_every > 0 ? check_every : effective_cadence(); }
};

// Per-step summary in a form shared by both algorithms.
struct StepRecord {
    long long step = 0;
    int particle = -1;
    std::string before;
    std::string after;
    bool moved = false;
    Coord from;
    Coord to;
    // Something other than a dispersion walk happened.
    bool structural = false;
};

class Simulation {
public:
    explicit Simulation(const RunConfig& config);

    const RunConfig& config() const { return cfg_; }
    Algorithm algorithm() const { return cfg_.algorithm; }
    long long steps_done() const { return step_; }
    const LatticeConfig& lattice_config() const;
    int size() const { return cfg_.n; }

    CompressionWorld& compression_world() { return *cw_; }
    const CompressionWorld& compression_world() const { return *cw_; }
    SpiralWorld& spiral_world() { return *sw_; }
    const SpiralWorld& spiral_world() const { return *sw_; }

    // Returns an error message; empty on success. State is unchanged on error.
    std::string apply_food_event(const FoodEvent& e);
    std::string set_param(const std::string& name, double value);

    // Activates one particle. Food events must be applied beforehand by the caller.
    StepRecord step();

    const CompressionActivation& last_compression() const { return last_c_; }
    const SpiralActivation& last_spiral() const { return last_s_; }

    // Encoded state of particle i and the particle list as (site, state) pairs.
    std::string particle_state(int i) const;
    Coord particle_pos(int i) const;
    bool stop_reached() const;
    MetricsFrame metrics() const;
    // Order-sensitive hash of positions, states, food and step.
    std::uint64_t digest() const;
    Rng& rng() { return rng_; }

private:
    int pick_particle();

    RunConfig cfg_;
    Rng rng_;
    long long step_ = 0;
    std::unique_ptr<CompressionWorld> cw_;
    std::unique_ptr<SpiralWorld> sw_;
    std::vector<double> cumulative_;
    CompressionActivation last_c_;
    SpiralActivation last_s_;
};

// Event log: a header line with the configuration followed by input lines
// (food events, parameter changes) and digest lines, one JSON object per line.
class EventLog {
public:
    void header(const RunConfig& cfg);
    void food(const FoodEvent& e);
    void param(long long step, const std::string& name, double value);
    // Operator actions that do not change the trajectory (pause, speed, ...).
    void control(long long step, const std::string& command);
    void check(long long step, std::uint64_t digest);
    void finish(long long step, std::uint64_t digest);
    const std::vector<std::string>& lines() const { return lines_; }
    std::string text() const;

private:
    std::vector<std::string> lines_;
};

struct RunArtifact {
    std::vector<MetricsFrame> frames;
    EventLog log;
    long long steps = 0;
    bool stopped = false;  // terminal predicate reached
    std::string final_snapshot;  // JSON
    std::string initial_snapshot;  // JSON
};

// Observer invoked after every step; returning false aborts the run.
using StepObserver = std::function<bool(const Simulation&, const StepRecord&)>;

RunArtifact run(const RunConfig& config, const FoodSchedule& schedule, const StepObserver& observer = {});

// Replays an event log and compares it line by line with a fresh run.
struct VerifyReport {
    bool ok = true;
    std::string message;
    long long steps = 0;
};
VerifyReport verify_log(const std::string& text);

}  // namespace forage
