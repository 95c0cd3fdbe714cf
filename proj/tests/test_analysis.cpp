#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "forage/analysis.hpp"
#include "forage/engine.hpp"
#include "spiral_fixtures.hpp"
#include "support.hpp"

using namespace forage;

namespace {

const Coord kFood{12, 12};

Coord at(Coord off) { return {kFood.x + off.x, kFood.y + off.y}; }

// Four components around one food particle, placed by hand so that the state
// invariant holds. Offsets are relative to the food.
const std::vector<std::pair<Coord, CState>> kFourComponents{
    {{-4, -2}, CState::C}, {{-4, 0}, CState::C},   {{-3, -2}, CState::C},  {{-3, -1}, CState::C},
    {{-3, 1}, CState::C},  {{-3, 2}, CState::C},   {{-2, -3}, CState::C},  {{-2, -2}, CState::C},
    {{-2, -1}, CState::C}, {{-2, 1}, CState::C},   {{-2, 2}, CState::C},   {{-2, 3}, CState::C},
    {{-1, -3}, CState::C}, {{-1, -2}, CState::C},  {{-1, -1}, CState::CF}, {{-1, 2}, CState::C},
    {{-1, 3}, CState::DT}, {{-1, 4}, CState::DT},  {{0, -1}, CState::CF},  {{0, 1}, CState::C},
    {{1, -2}, CState::C},  {{1, 1}, CState::CF},   {{1, 2}, CState::C},    {{1, 3}, CState::C},
    {{2, -1}, CState::CF}, {{2, 0}, CState::C},    {{2, 2}, CState::C},    {{2, 3}, CState::C},
    {{3, 0}, CState::C},   {{3, 1}, CState::C},    {{3, 4}, CState::C},    {{4, 1}, CState::C},
    {{4, 2}, CState::C},
};

CompressionWorld four_components() {
    CompressionWorld w(24);
    w.config.add_food(kFood);
    for (auto [off, s] : kFourComponents) w.add(at(off), s);
    return w;
}

std::vector<Coord> shifted(const std::vector<Coord>& offs, Coord by) {
    std::vector<Coord> out;
    for (Coord c : offs) out.push_back({c.x + by.x, c.y + by.y});
    return out;
}

std::vector<Coord> hexagon() {
    std::vector<Coord> h{{0, 0}};
    for (Coord o : kOffsets) h.push_back(o);
    return h;
}

}  // namespace

TEST_CASE("four-component configuration") {
    CompressionWorld w = four_components();
    CHECK(components(w).size() == 4);
    CHECK(check_state_invariant(w).ok);
    auto res = residual_compression(w);
    CHECK(res.size() == 23);
    // The component holding the two food-bit particles under the food is clean.
    int clean = w.at(at({-1, -1}));
    CHECK(std::find(res.begin(), res.end(), clean) == res.end());
    CHECK(std::find(res.begin(), res.end(), w.at(at({0, 1}))) != res.end());
    CHECK(std::find(res.begin(), res.end(), w.at(at({2, -1}))) != res.end());
    CHECK(std::find(res.begin(), res.end(), w.at(at({-1, 3}))) != res.end());
}

TEST_CASE("state invariant edge cases") {
    CompressionWorld w(10);
    w.add({1, 1}, CState::D);
    CHECK(check_state_invariant(w).ok);
    w.add({5, 5}, CState::C);
    auto r = check_state_invariant(w);
    CHECK_FALSE(r.ok);
    CHECK(r.offending.size() == 1);
}

TEST_CASE("residual compression examples") {
    CompressionWorld w(16);
    w.config.add_food({8, 8});
    w.add({2, 2}, CState::CF);
    CHECK(residual_compression(w).size() == 1);
    CompressionWorld clean(16);
    clean.config.add_food({8, 8});
    clean.add({9, 8}, CState::CF);
    clean.add({10, 8}, CState::C);
    CHECK(residual_compression(clean).empty());
}

TEST_CASE("potential") {
    CompressionWorld w(16);
    for (int i = 0; i < 4; ++i) w.add({i, 0}, CState::D);
    Potential p = potential(w);
    CHECK(p.phi == 0);
    CompressionWorld v(16);
    v.add({1, 1}, CState::C);
    v.add({2, 1}, CState::CG);
    v.add({3, 1}, CState::CF);
    v.add({4, 1}, CState::DT);
    p = potential(v);
    CHECK(p.phi == 5);
    CHECK(p.phi_c == 3);
    CHECK(p.phi_dt == 1);
    CHECK(p.phi_t == 1);
}

TEST_CASE("demoting a residual member lowers the potential") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        CompressionWorld w = four_components();
        int before = potential(w).phi;
        Rng rng(seed);
        // Food bit set but no food next to it: always demotes.
        state_change(w, w.at(at({2, -1})), {0.1, 4}, rng);
        CHECK(potential(w).phi <= before - 1);
    }
}

TEST_CASE("perimeter conventions and p_min") {
    Lattice lat(32);
    CHECK(perimeter(lat, {{3, 3}}) == 0);
    CHECK(perimeter(lat, {{3, 3}, {4, 3}}) == 2);
    CHECK(perimeter(lat, shifted(hexagon(), {5, 5})) == 6);
    CHECK(p_min(1) == 0);
    CHECK(p_min(7) == 6);
}

TEST_CASE("perimeter agrees with the edge-count reference on random shapes") {
    std::mt19937_64 rng(11);
    Lattice lat(64);
    for (int t = 0; t < 300; ++t) {
        auto cells = ref::eden(1 + static_cast<int>(rng() % 25), rng);
        ref::Set s;
        for (Coord c : cells) s.insert(ref::P(c));
        if (!ref::connected(s)) continue;
        auto placed = shifted(cells, {30, 30});
        CHECK(perimeter(lat, placed) == ref::perimeter(s));
        CHECK(alpha_ratio(lat, placed) >= 1.0);
        CHECK(is_hole_free(lat, placed) == ref::hole_free(s));
    }
}

TEST_CASE("p_min matches exhaustive search for n up to 7") {
    // n = 8 and 9 run in the acceptance suite.
    for (int n = 1; n <= 7; ++n) CHECK(p_min(n) == ref::brute_min_perimeter(n));
}

TEST_CASE("alpha ratio") {
    Lattice lat(32);
    std::vector<Coord> line;
    for (int i = 0; i < 7; ++i) line.push_back({i + 2, 4});
    CHECK(alpha_ratio(lat, line) == doctest::Approx(2.0));
    CHECK(alpha_ratio(lat, {{1, 1}}) == 1.0);
    std::vector<Coord> spiral{{10, 10}};
    for (auto& s : canonical_spiral(4, 19)) spiral.push_back({10 + s.site.x, 10 + s.site.y});
    CHECK(alpha_ratio(lat, spiral) == 1.0);
}

TEST_CASE("hole detection") {
    Lattice lat(32);
    std::vector<Coord> line{{2, 2}, {3, 2}, {4, 2}, {5, 2}};
    CHECK(is_hole_free(lat, line));
    std::vector<Coord> ring;
    for (Coord o : kOffsets) ring.push_back({8 + o.x, 8 + o.y});
    CHECK_FALSE(is_hole_free(lat, ring));
    CHECK(is_hole_free(lat, shifted(hexagon(), {8, 8})));
    Lattice small(6);
    std::vector<Coord> wrap;
    for (int i = 0; i < 6; ++i) wrap.push_back({i, 0});
    CHECK_THROWS(is_hole_free(small, wrap));
}

TEST_CASE("spiral residuals") {
    SpiralWorld full = fixtures::spiral25_world(24, kFood);
    CHECK(residual_spiral(full).empty());
    SpiralWorld lone(24);
    lone.config.add_food(kFood);
    lone.add(at({6, 6}), SpiralState::make(6, false, 0));
    CHECK(residual_spiral(lone).size() == 1);
    SpiralWorld two(24);
    two.config.add_food(kFood);
    two.add(at({1, 0}), SpiralState::make(2, false, 1));
    CHECK(residual_spiral(two).empty());
}

TEST_CASE("inconsistency and stages") {
    SpiralWorld full = fixtures::spiral25_world(24, kFood);
    CHECK(inconsistency_value(full) == 0);
    CHECK(stage(full) == 4);

    SpiralWorld moved = fixtures::canonical_world(24, kFood, 0, 6);
    moved.config.remove_food(kFood);
    moved.config.add_food(at({6, 0}));
    CHECK(inconsistency_value(moved) > 0);
    CHECK(stage(moved) == 1);

    // A lone 2* in its place on a circle without food in the middle.
    SpiralWorld one(24);
    auto ring = canonical_spiral(0, 6);
    one.add(at(ring[2].site), SpiralState::make(2, true, ring[2].parent));
    CHECK(circle_value(one, Circle{kFood, 0}) == 1);
    CHECK(inconsistency_value(one) >= 1);

    SpiralWorld partial = fixtures::canonical_world(24, kFood, 0, 6);
    for (auto& s : partial.state) s.verified = false;
    CHECK(stage(partial) == 3);
    SpiralWorld none(24);
    none.config.add_food(kFood);
    CHECK(stage(none) == 2);
}

TEST_CASE("auxiliary graph") {
    AuxGraph g = auxiliary_graph(fixtures::spiral25_world(24, kFood));
    CHECK(g.max_in_degree <= 1);
    CHECK_FALSE(g.edges.empty());
    SpiralWorld far(24);
    far.config.add_food(kFood);
    far.add(at({7, 7}), SpiralState::dispersion());
    far.add(at({8, 7}), SpiralState::dispersion());
    CHECK(auxiliary_graph(far).edges.empty());
}

TEST_CASE("hitting time harness") {
    Rng rng(5);
    CHECK(biased_walk_hitting_time(3, 0, 0.5, 100, rng).mean == 0.0);
    CHECK(biased_walk_hitting_time(1, 5, 0.0, 100, rng).mean == 5.0);
}

TEST_CASE("property: metrics identities along runs") {
    for (auto algo : {Algorithm::Compression, Algorithm::Spiral}) {
        RunConfig cfg;
        cfg.algorithm = algo;
        cfg.side = 16;
        cfg.n = 20;
        cfg.food = {{8, 8}};
        cfg.seed = 9;
        Simulation sim(cfg);
        for (int i = 0; i < 200; ++i) {
            for (int k = 0; k < 500; ++k) sim.step();
            MetricsFrame f = sim.metrics();
            CHECK(f.phi == f.phi_c + f.phi_dt + f.phi_t);
            CHECK(f.alpha >= 1.0);
            if (algo == Algorithm::Spiral) {
                CHECK(f.stage >= 1);
                CHECK(f.stage <= 4);
            }
        }
    }
}

TEST_CASE("property: once residual-free under static food, no residuals appear and all components touch food") {
    RunConfig cfg;
    cfg.side = 16;
    cfg.n = 30;
    cfg.food = {{8, 8}};
    cfg.seed = 4;
    Simulation sim(cfg);
    auto& w = sim.compression_world();
    // Start from a residual-free configuration.
    while (!residual_compression(w).empty()) sim.step();
    int created = 0, detached = 0;
    for (int step = 0; step < 100000; ++step) {
        auto r = sim.step();
        if (!r.structural) continue;
        if (!residual_compression(w).empty()) ++created;
        for (const auto& comp : components(w)) {
            bool touches = std::any_of(comp.begin(), comp.end(), [&](int id) { return w.config.food_adjacent(w.pos[id]); });
            if (!touches) ++detached;
        }
    }
    CHECK(created == 0);
    CHECK(detached == 0);
}
