#pragma once

#include <string>
#include <utility>
#include <vector>

#include "forage/spiral.hpp"

namespace fixtures {

using forage::Coord;

// Twenty-five particle spiral around one food particle, placed site by site.
// Offsets are relative to the food; labels
// are "<state>@<parent direction>".
inline const std::vector<std::pair<Coord, std::string>> kSpiral25{
    {{-3, 0}, "6@1"},  {{-3, -1}, "6@2"}, {{-3, -2}, "6@2"}, {{-3, -3}, "6@2"}, {{-2, 1}, "6@1"},
    {{-2, 0}, "6@1"},  {{-2, -1}, "6@2"}, {{-2, -2}, "6@2"}, {{-2, -3}, "6@3"}, {{-1, 2}, "6@0"},
    {{-1, 1}, "6@0"},  {{-1, 0}, "0*@0"}, {{-1, -1}, "1*@2"}, {{-1, -2}, "6@3"}, {{0, 2}, "6@0"},
    {{0, 1}, "5*@0"},  {{0, -1}, "2*@3"}, {{0, -2}, "6@3"},  {{1, 2}, "6@0"},   {{1, 1}, "4*@5"},
    {{1, 0}, "3*@4"},  {{1, -1}, "6@4"},  {{2, 2}, "6@5"},   {{2, 1}, "6@5"},   {{2, 0}, "6@4"},
};

inline forage::SpiralWorld spiral25_world(int side, Coord food) {
    forage::SpiralWorld w(side);
    w.config.add_food(food);
    for (const auto& [off, label] : kSpiral25)
        w.add({food.x + off.x, food.y + off.y}, forage::parse_spiral_state(label));
    return w;
}

// First count sites of the canonical spiral starting at food + dir(start), with
// the states a finished spiral carries.
inline forage::SpiralWorld canonical_world(int side, Coord food, int start, int count) {
    forage::SpiralWorld w(side);
    w.config.add_food(food);
    auto sites = forage::canonical_spiral(start, count);
    for (int i = 0; i < count; ++i) {
        const auto& s = sites[static_cast<std::size_t>(i)];
        bool ring = i < 6;
        w.add({food.x + s.site.x, food.y + s.site.y}, forage::SpiralState::make(ring ? i : 6, ring, s.parent));
    }
    return w;
}

}  // namespace fixtures
