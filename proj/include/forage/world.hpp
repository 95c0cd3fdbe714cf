#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "forage/lattice.hpp"

namespace forage {

using Rng = std::mt19937_64;

// Fixed formulas so replays match across standard libraries.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }
inline int uniform_int(Rng& rng, int n) { return static_cast<int>(rng() % static_cast<std::uint64_t>(n)); }
inline bool bernoulli(Rng& rng, double p) { return uniform01(rng) < p; }

template <class State>
struct World {
    LatticeConfig config;
    std::vector<Coord> pos;
    std::vector<State> state;

    explicit World(int side) : config(side) {}

    const Lattice& lattice() const { return config.lattice(); }
    int size() const { return static_cast<int>(pos.size()); }

    int add(Coord c, State s) {
        int id = size();
        c = lattice().wrap(c);
        config.place(id, c);
        pos.push_back(c);
        state.push_back(s);
        return id;
    }

    void move(int id, Coord to) {
        to = lattice().wrap(to);
        config.relocate(pos[id], to);
        pos[id] = to;
    }

    // Particle id at c, or kEmpty.
    int at(Coord c) const { return config.at(c); }
};

}  // namespace forage
