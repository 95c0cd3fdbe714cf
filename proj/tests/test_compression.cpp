#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "forage/analysis.hpp"
#include "forage/compression.hpp"
#include "forage/engine.hpp"
#include "support.hpp"

using namespace forage;

namespace {

// Local-disconnection oracle: the mover's cluster neighbours must still reach
// each other through the neighbourhood, the mover's new site included.
bool ref_disconnects(const ref::Set& cluster, std::pair<int, int> from, std::pair<int, int> to) {
    ref::Set others;
    for (auto n : ref::nbrs(from))
        if (cluster.count(n)) others.insert(n);
    if (others.empty()) return false;
    ref::Set after = others;
    after.insert(to);
    ref::Set seen{*others.begin()};
    std::vector<std::pair<int, int>> stack{*others.begin()};
    while (!stack.empty()) {
        auto c = stack.back();
        stack.pop_back();
        for (auto m : ref::nbrs(c))
            if (after.count(m) && seen.insert(m).second) stack.push_back(m);
    }
    for (auto o : others)
        if (!seen.count(o)) return true;
    return false;
}

CompressionWorld world_with(int side, std::vector<std::pair<Coord, CState>> ps, std::vector<Coord> food) {
    CompressionWorld w(side);
    for (Coord f : food) w.config.add_food(f);
    for (auto [c, s] : ps) w.add(c, s);
    return w;
}

int tokens(const CompressionWorld& w) {
    int t = 0;
    for (CState s : w.state) t += growth_bit(s);
    return t;
}

}  // namespace

TEST_CASE("state bits") {
    CHECK(growth_bit(CState::CG));
    CHECK(growth_bit(CState::CGF));
    CHECK_FALSE(growth_bit(CState::CF));
    CHECK(food_bit(CState::CF));
    CHECK(food_bit(CState::CGF));
    CHECK_FALSE(food_bit(CState::C));
    for (CState s : {CState::D, CState::C, CState::CG, CState::CF, CState::CGF, CState::DT})
        CHECK(parse_cstate(state_name(s)) == s);
}

TEST_CASE("parameter ranges") {
    CHECK_NOTHROW(CompressionParams{0.1, 4}.validate());
    CHECK_THROWS(CompressionParams{1.0 / 6, 4}.validate());
    CHECK_THROWS(CompressionParams{0, 4}.validate());
    CHECK_THROWS(CompressionParams{0.1, 0}.validate());
    CHECK_NOTHROW(CompressionParams{0.1, 0.5}.validate());
}

TEST_CASE("valid move examples") {
    auto w = world_with(16, {{{1, 0}, CState::C}}, {{0, 0}});
    CHECK(is_valid_compression_move(w, {1, 0}, {1, 1}) == Verdict::Valid);
    CHECK(is_valid_compression_move(w, {1, 0}, {2, 0}) != Verdict::Valid);
    w.add({2, 0}, CState::D);
    CHECK(is_valid_compression_move(w, {1, 0}, {2, 0}) == Verdict::Occupied);
}

TEST_CASE("move rule agrees with the reference over every local neighbourhood") {
    // Sites of N(from) u N(to) minus the pair, for each direction.
    const int side = 16;
    Coord from{5, 5};
    int mismatches = 0, checked = 0;
    for (int d = 0; d < 6; ++d) {
        Coord to{from.x + kOffsets[d].x, from.y + kOffsets[d].y};
        std::vector<Coord> ring;
        for (Coord c : {from, to})
            for (int k = 0; k < 6; ++k) {
                Coord n{c.x + kOffsets[k].x, c.y + kOffsets[k].y};
                if (n == from || n == to) continue;
                if (std::find(ring.begin(), ring.end(), n) == ring.end()) ring.push_back(n);
            }
        REQUIRE(ring.size() == 8);
        for (int mask = 0; mask < 256; ++mask) {
            CompressionWorld w(side);
            ref::Set cluster{ref::P(from)};
            w.add(from, CState::C);
            for (int i = 0; i < 8; ++i)
                if (mask >> i & 1) {
                    w.add(ring[i], CState::C);
                    cluster.insert(ref::P(ring[i]));
                }
            bool lib = is_valid_compression_move(w, from, to) == Verdict::Valid;
            bool want = ref::valid_move(cluster, ref::P(from), ref::P(to));
            mismatches += lib != want;
            bool lib_dis = causes_local_disconnection(w, from, to);
            CHECK(lib_dis == ref_disconnects(cluster, ref::P(from), ref::P(to)));
            if (lib) CHECK_FALSE(lib_dis);
            ++checked;
        }
    }
    CHECK(checked == 6 * 256);
    CHECK(mismatches == 0);
}

TEST_CASE("local disconnection examples") {
    auto w = world_with(16, {{{1, 0}, CState::C}}, {{0, 0}});
    CHECK_FALSE(causes_local_disconnection(w, {1, 0}, {1, 1}));
    // Bridge between two arcs, both common neighbours of the move empty.
    auto b = world_with(16, {{{5, 5}, CState::C}, {{5, 6}, CState::C}, {{5, 7}, CState::C}, {{4, 4}, CState::C},
                             {{3, 3}, CState::C}},
                        {});
    CHECK(causes_local_disconnection(b, {5, 5}, {6, 5}));
    CHECK(is_valid_compression_move(b, {5, 5}, {6, 5}) != Verdict::Valid);
    auto lone = world_with(16, {{{5, 5}, CState::C}}, {});
    CHECK_FALSE(causes_local_disconnection(lone, {5, 5}, {6, 5}));
}

TEST_CASE("acceptance probability") {
    CHECK(acceptance_probability(1, 4) == 1.0);
    CHECK(acceptance_probability(-2, 4) == doctest::Approx(0.0625));
    CHECK(acceptance_probability(-5, 1) == 1.0);
    CHECK_THROWS(acceptance_probability(0, 0));
    auto w = world_with(16, {{{1, 0}, CState::C}}, {{0, 0}});
    MoveProposal p = propose_move(w, {1, 0}, {2, 0}, 4);
    CHECK(p.accept_prob == 0.0);
    p = propose_move(w, {1, 0}, {1, 1}, 4);
    CHECK(p.verdict == Verdict::Valid);
    CHECK(p.delta_e == 0);
    CHECK(p.accept_prob == 1.0);
}

TEST_CASE("dispersion particle next to food joins with probability p") {
    CompressionParams params{0.1, 4};
    int joined = 0, trials = 4000;
    for (int t = 0; t < trials; ++t) {
        auto w = world_with(16, {{{1, 0}, CState::D}}, {{0, 0}});
        Rng rng(static_cast<std::uint64_t>(t));
        StateChange c = state_change(w, 0, params, rng);
        CHECK((w.state[0] == CState::D || w.state[0] == CState::CF));
        if (w.state[0] == CState::CF) {
            CHECK(c.branch == Branch::JoinFood);
            ++joined;
        }
    }
    double sigma = std::sqrt(trials * 0.1 * 0.9);
    CHECK(std::abs(joined - trials * 0.1) < 4 * sigma);
}

TEST_CASE("dispersion token spreads to compression neighbours") {
    auto w = world_with(16, {{{5, 5}, CState::DT}, {{6, 5}, CState::C}, {{5, 6}, CState::CG}, {{4, 5}, CState::D}}, {});
    Rng rng(1);
    StateChange c = state_change(w, 0, {0.1, 4}, rng);
    CHECK(c.branch == Branch::Dissolve);
    CHECK(w.state[0] == CState::D);
    CHECK(w.state[1] == CState::DT);
    CHECK(w.state[2] == CState::DT);
    CHECK(w.state[3] == CState::D);
}

TEST_CASE("food bit without food demotes") {
    auto w = world_with(16, {{{5, 5}, CState::CF}, {{6, 5}, CState::C}, {{6, 6}, CState::DT}}, {});
    Rng rng(1);
    StateChange c = state_change(w, 0, {0.1, 4}, rng);
    CHECK(c.branch == Branch::Demote);
    CHECK(w.state[0] == CState::D);
    CHECK(w.state[1] == CState::DT);
    CHECK(w.state[2] == CState::DT);
}

TEST_CASE("dispersion walk respects exclusion") {
    int moved = 0, blocked = 0;
    for (int t = 0; t < 200; ++t) {
        auto w = world_with(16, {{{5, 5}, CState::D}, {{6, 5}, CState::D}}, {});
        Rng rng(static_cast<std::uint64_t>(t));
        auto m = movement_step(w, 0, false, {0.1, 4}, rng);
        REQUIRE(m.has_value());
        CHECK_FALSE(m->compression);
        if (m->executed) {
            ++moved;
            CHECK(w.pos[0] != Coord{6, 5});
            CHECK(w.lattice().adjacent(w.pos[0], {5, 5}));
        } else {
            ++blocked;
            CHECK(m->proposal.to == Coord{6, 5});
            CHECK(w.pos[0] == Coord{5, 5});
        }
    }
    CHECK(moved > 0);
    CHECK(blocked > 0);
}

TEST_CASE("dispersion token holders never move") {
    for (int t = 0; t < 50; ++t) {
        auto w = world_with(16, {{{5, 5}, CState::D}}, {});
        Rng rng(static_cast<std::uint64_t>(t));
        CHECK_FALSE(movement_step(w, 0, true, {0.1, 4}, rng).has_value());
        CHECK(w.pos[0] == Coord{5, 5});
    }
}

TEST_CASE("food bit follows adjacency after a compression move") {
    for (int t = 0; t < 100; ++t) {
        auto w = world_with(16, {{{1, 0}, CState::CF}}, {{0, 0}});
        Rng rng(static_cast<std::uint64_t>(t));
        auto m = movement_step(w, 0, false, {0.1, 4}, rng);
        REQUIRE(m.has_value());
        CHECK(m->compression);
        CHECK(food_bit(w.state[0]) == w.config.food_adjacent(w.pos[0]));
    }
}

TEST_CASE("property: invariant, legality and token accounting along random runs") {
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        RunConfig cfg;
        cfg.side = 14;
        cfg.n = 30;
        cfg.seed = seed;
        cfg.food = {{7, 7}};
        Simulation sim(cfg);
        Rng adversary(seed * 97);
        long long violations = 0, token_jumps = 0, illegal = 0;
        for (int step = 0; step < 150000; ++step) {
            if (step % 20000 == 19999) {
                // Relocate food to a random free site.
                auto& w = sim.compression_world();
                Coord at = w.config.food().front();
                Coord to{uniform_int(adversary, cfg.side), uniform_int(adversary, cfg.side)};
                if (!w.config.blocked(to)) CHECK(sim.apply_food_event({step, FoodEvent::Action::Move, at, to}) == "");
            }
            int before = tokens(sim.compression_world());
            sim.step();
            const auto& a = sim.last_compression();
            int after = tokens(sim.compression_world());
            bool exempt = a.change.branch == Branch::Demote || a.change.branch == Branch::Dissolve;
            if (!exempt && std::abs(after - before) > 1) ++token_jumps;
            if (a.move && a.move->compression && a.move->executed &&
                (a.move->proposal.verdict != Verdict::Valid || a.move->disconnects))
                ++illegal;
            if (!check_state_invariant(sim.compression_world()).ok) ++violations;
        }
        CHECK(violations == 0);
        CHECK(token_jumps == 0);
        CHECK(illegal == 0);
    }
}
