#include "forage/lattice.hpp"

#include <algorithm>
#include <cstdlib>

namespace forage {

int direction_of(Coord o) {
    for (int d = 0; d < 6; ++d)
        if (kOffsets[d] == o) return d;
    return -1;
}

int hex_distance(Coord o) {
    return std::max({std::abs(o.x), std::abs(o.y), std::abs(o.x - o.y)});
}

Lattice::Lattice(int side) : side_(side) {
    if (side < 1) throw std::invalid_argument("side must be positive");
}

Coord Lattice::wrap(Coord c) const {
    int x = c.x % side_, y = c.y % side_;
    if (x < 0) x += side_;
    if (y < 0) y += side_;
    return {x, y};
}

Coord Lattice::neighbor(Coord c, int d) const {
    const Coord& o = kOffsets[rotate(d, 0)];
    return wrap({c.x + o.x, c.y + o.y});
}

Coord Lattice::translate(Coord c, Coord o) const { return wrap({c.x + o.x, c.y + o.y}); }

std::array<Coord, 6> Lattice::neighbors(Coord c) const {
    std::array<Coord, 6> out;
    for (int d = 0; d < 6; ++d) out[d] = neighbor(c, d);
    return out;
}

int Lattice::direction_between(Coord a, Coord b) const {
    a = wrap(a);
    b = wrap(b);
    for (int d = 0; d < 6; ++d)
        if (neighbor(a, d) == b) return d;
    return -1;
}

std::array<Coord, 2> Lattice::common_neighbors(Coord a, Coord b) const {
    int d = direction_between(a, b);
    if (d < 0) throw std::invalid_argument("not adjacent");
    return {neighbor(a, rotate(d, -1)), neighbor(a, rotate(d, 1))};
}

Coord Lattice::offset(Coord a, Coord b) const {
    auto fold = [&](int v) {
        v %= side_;
        if (v < 0) v += side_;
        if (v > side_ / 2) v -= side_;
        return v;
    };
    return {fold(b.x - a.x), fold(b.y - a.y)};
}

LatticeConfig::LatticeConfig(int side)
    : lat_(side), occ_(side * side, kEmpty), food_(side * side, 0) {}

bool LatticeConfig::food_adjacent(Coord c) const {
    for (int d = 0; d < 6; ++d)
        if (is_food(lat_.neighbor(c, d))) return true;
    return false;
}

void LatticeConfig::place(int id, Coord c) {
    c = lat_.wrap(c);
    if (occupied(c) || is_food(c)) throw std::runtime_error("site occupied");
    occ_[lat_.index(c)] = id;
}

void LatticeConfig::clear(Coord c) { occ_[lat_.index(lat_.wrap(c))] = kEmpty; }

void LatticeConfig::relocate(Coord from, Coord to) {
    int id = at(from);
    if (id == kEmpty) throw std::runtime_error("no particle at source");
    if (blocked(to)) throw std::runtime_error("site occupied");
    clear(from);
    occ_[lat_.index(lat_.wrap(to))] = id;
}

void LatticeConfig::add_food(Coord c) {
    c = lat_.wrap(c);
    if (occupied(c) || is_food(c)) throw std::runtime_error("site occupied");
    food_[lat_.index(c)] = 1;
    food_list_.push_back(c);
}

void LatticeConfig::remove_food(Coord c) {
    c = lat_.wrap(c);
    if (!is_food(c)) throw std::runtime_error("no food at source");
    food_[lat_.index(c)] = 0;
    food_list_.erase(std::find(food_list_.begin(), food_list_.end(), c));
}

}  // namespace forage
