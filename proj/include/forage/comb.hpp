#pragma once

#include <array>
#include <functional>
#include <optional>
#include <stdexcept>
#include <unordered_set>
#include <utility>
#include <vector>

#include "forage/lattice.hpp"

namespace forage {

using MoveList = std::vector<std::pair<Coord, Coord>>;

// Lattice symmetry fixing the origin: optional reflection across the
// direction-0 axis followed by rot counterclockwise 60 degree turns.
struct Transform {
    int rot = 0;
    bool reflect = false;
    Coord apply(Coord c) const;
    Coord inverse(Coord c) const;
    int dir(int d) const;
};

// (lane, depth) coordinates around the food. The source spine runs up-left
// (lane axis) and depth counts steps downward, so the target spine is (k, k).
struct CombFrame {
    Transform t;
    Coord site(int lane, int depth) const { return t.apply({-lane, -depth}); }
    std::pair<int, int> lane_depth(Coord site) const {
        Coord c = t.inverse(site);
        return {-c.x, -c.y};
    }
    // Frame whose source spine points along direction source_dir and whose
    // target spine is the next one counterclockwise.
    static CombFrame from_source(int source_dir) { return {{rotate(source_dir, -3), false}}; }
};

struct SpineView {
    std::array<int, 6> length{};
    std::array<int, 6> tail_extent{};
    std::array<std::optional<Coord>, 6> anchor{};
    int min_length() const;
};

class CombError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

struct CombStats {
    int fallback_routes = 0;  // planned moves replaced by a searched route
};

// Move-sequence oracle driving a connected configuration with one immobile
// food particle to a straight line. Works on planar offsets from the food.
class CombOracle {
public:
    // Particles and food given on a torus. Throws std::invalid_argument when
    // the torus is too small for the particles to be laid out in a line
    // without wrapping or when the configuration is not connected.
    CombOracle(const LatticeConfig& config, Coord food);
    // Planar constructor: particle offsets relative to food at the origin.
    explicit CombOracle(const std::vector<Coord>& particles);

    bool occupied(Coord plane) const;  // particle or food
    bool has_particle(Coord plane) const;
    std::vector<Coord> particles() const;
    int count() const { return static_cast<int>(occ_.size()); }

    SpineView spines() const;
    bool is_line() const;
    bool is_hexagon_with_tail(int r) const;

    bool is_combed(const CombFrame& f, int lane, int depth) const;
    bool is_combable(const CombFrame& f, int lane, int depth) const;

    // Each operation applies its moves to the oracle's configuration and
    // returns them as planar (from, to) pairs.
    MoveList comb(const CombFrame& f, int lane, int depth);
    MoveList spine_comb(const CombFrame& f);
    MoveList reduce_min_spine();
    MoveList flatten_to_line();
    // Rotates a line so that it points along direction dir.
    MoveList reorient_line(int dir);

    const CombStats& stats() const { return stats_; }
    // Converts planar moves to torus coordinates around the food site.
    static MoveList to_torus(const Lattice& lat, Coord food, const MoveList& moves);

    // Single-move validity against the current configuration.
    bool valid_move(Coord from, Coord to) const;

private:
    void apply(Coord from, Coord to, MoveList& out);
    // Moves the particle at from to to, via the planned single step when valid
    // or else via a searched route inside the allowed set.
    void move_or_route(Coord from, Coord to, MoveList& out, const std::function<bool(Coord)>& allowed);
    bool route(Coord from, Coord to, MoveList& out, const std::function<bool(Coord)>& allowed);
    void line_formation(const CombFrame& f, int lane, int depth, MoveList& out);
    void line_merging(const CombFrame& f, int lane, int depth, MoveList& out);
    bool reduce_hexagon(int r, MoveList& out);
    int max_extent() const;

    std::unordered_set<Coord> occ_;
    CombStats stats_;
};

}  // namespace forage
