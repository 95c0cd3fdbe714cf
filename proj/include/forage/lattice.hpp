#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

namespace forage {

struct Coord {
    int x = 0;
    int y = 0;
    friend bool operator==(const Coord&, const Coord&) = default;
    friend auto operator<=>(const Coord&, const Coord&) = default;
};

// Direction 0 is (+1,0); +1 is one step counterclockwise.
inline constexpr std::array<Coord, 6> kOffsets{{{1, 0}, {1, 1}, {0, 1}, {-1, 0}, {-1, -1}, {0, -1}}};

constexpr int rotate(int d, int k) {
    int r = (d + k) % 6;
    return r < 0 ? r + 6 : r;
}
constexpr int opposite(int d) { return rotate(d, 3); }

// Direction index of a unit offset, or -1.
int direction_of(Coord offset);

// Hex distance of an unwrapped offset.
int hex_distance(Coord offset);

inline constexpr int kEmpty = -1;

class Lattice {
public:
    explicit Lattice(int side);

    int side() const { return side_; }
    int sites() const { return side_ * side_; }

    Coord wrap(Coord c) const;
    Coord neighbor(Coord c, int d) const;
    Coord translate(Coord c, Coord offset) const;
    std::array<Coord, 6> neighbors(Coord c) const;
    // Direction from a to b when adjacent, else -1.
    int direction_between(Coord a, Coord b) const;
    bool adjacent(Coord a, Coord b) const { return direction_between(a, b) >= 0; }
    // The two sites adjacent to both a and b. Throws if a and b are not adjacent.
    std::array<Coord, 2> common_neighbors(Coord a, Coord b) const;
    // Shortest wrapped offset from a to b (components in (-L/2, L/2]).
    Coord offset(Coord a, Coord b) const;

    int index(Coord c) const { return c.y * side_ + c.x; }
    Coord coord(int i) const { return {i % side_, i / side_}; }

private:
    int side_;
};

// Occupancy plus food on a torus. Particles are identified by dense ids.
class LatticeConfig {
public:
    explicit LatticeConfig(int side);

    const Lattice& lattice() const { return lat_; }
    int side() const { return lat_.side(); }

    int at(Coord c) const { return occ_[lat_.index(lat_.wrap(c))]; }
    bool occupied(Coord c) const { return at(c) != kEmpty; }
    bool is_food(Coord c) const { return food_[lat_.index(lat_.wrap(c))] != 0; }
    bool blocked(Coord c) const { return occupied(c) || is_food(c); }
    const std::vector<Coord>& food() const { return food_list_; }
    bool food_adjacent(Coord c) const;

    void place(int id, Coord c);
    void clear(Coord c);
    void relocate(Coord from, Coord to);
    void add_food(Coord c);
    void remove_food(Coord c);

private:
    Lattice lat_;
    std::vector<int> occ_;
    std::vector<std::uint8_t> food_;
    std::vector<Coord> food_list_;
};

}  // namespace forage

template <>
struct std::hash<forage::Coord> {
    std::size_t operator()(const forage::Coord& c) const noexcept {
        return std::hash<long long>{}((static_cast<long long>(c.x) << 32) ^ static_cast<unsigned>(c.y));
    }
};
