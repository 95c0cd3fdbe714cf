#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

#include "forage/lattice.hpp"

namespace forage {

enum class Verdict { Valid, InvalidProperty, InvalidDegree, Occupied };

const char* verdict_name(Verdict v);

namespace detail {

// Sites given as unwrapped offsets from the moving particle's origin.
template <std::size_t N>
bool all_connected(const std::array<Coord, N>& sites, const std::array<bool, N>& member, int count) {
    std::array<bool, N> seen{};
    std::array<int, N> stack{};
    int start = -1, total = 0;
    for (int i = 0; i < count; ++i)
        if (member[i]) {
            ++total;
            if (start < 0) start = i;
        }
    if (total <= 1) return true;
    int top = 0, reached = 1;
    stack[top++] = start;
    seen[start] = true;
    while (top > 0) {
        int i = stack[--top];
        for (int j = 0; j < count; ++j) {
            if (!member[j] || seen[j]) continue;
            Coord o{sites[j].x - sites[i].x, sites[j].y - sites[i].y};
            if (direction_of(o) < 0) continue;
            seen[j] = true;
            ++reached;
            stack[top++] = j;
        }
    }
    return reached == total;
}

inline bool in_offsets(const Coord& o, int d) { return o == kOffsets[d]; }

}  // namespace detail

// Definition of a valid compression move, with the two properties joined by OR.
// cluster(c) tells whether site c holds a cluster particle (food included);
// blocked(c) whether any particle or food sits on c.
template <class ClusterFn, class BlockedFn>
Verdict evaluate_move(const Lattice& lat, Coord from, Coord to, ClusterFn cluster, BlockedFn blocked) {
    int d = lat.direction_between(from, to);
    if (d < 0) throw std::invalid_argument("not adjacent");
    if (blocked(to)) return Verdict::Occupied;

    const Coord dt = kOffsets[d];
    // Ring around the pair: the 8 sites of N(from) u N(to) minus the pair.
    std::array<Coord, 8> ring{};
    std::array<bool, 8> occ{};
    std::array<bool, 8> near_from{}, near_to{}, shared{};
    int count = 0;
    auto push = [&](Coord o) {
        if (o == Coord{0, 0} || o == dt) return;
        for (int i = 0; i < count; ++i)
            if (ring[i] == o) return;
        ring[count++] = o;
    };
    for (int k = 0; k < 6; ++k) push(kOffsets[k]);
    for (int k = 0; k < 6; ++k) push({dt.x + kOffsets[k].x, dt.y + kOffsets[k].y});

    int from_cluster = 0, s_count = 0, nf = 0, nt = 0;
    for (int i = 0; i < count; ++i) {
        occ[i] = cluster(lat.translate(from, ring[i]));
        near_from[i] = direction_of(ring[i]) >= 0;
        near_to[i] = direction_of({ring[i].x - dt.x, ring[i].y - dt.y}) >= 0;
        shared[i] = near_from[i] && near_to[i];
        if (occ[i] && near_from[i]) ++from_cluster;
        if (occ[i] && shared[i]) ++s_count;
        if (occ[i] && near_from[i]) ++nf;
        if (occ[i] && near_to[i]) ++nt;
    }
    if (from_cluster >= 5) return Verdict::InvalidDegree;

    bool prop1 = false;
    if (s_count >= 1) {
        // Every ring cluster particle must reach a shared one inside the ring.
        std::array<bool, 8> seen{};
        std::array<int, 8> stack{};
        int top = 0;
        for (int i = 0; i < count; ++i)
            if (occ[i] && shared[i]) {
                seen[i] = true;
                stack[top++] = i;
            }
        while (top > 0) {
            int i = stack[--top];
            for (int j = 0; j < count; ++j) {
                if (!occ[j] || seen[j]) continue;
                if (direction_of({ring[j].x - ring[i].x, ring[j].y - ring[i].y}) < 0) continue;
                seen[j] = true;
                stack[top++] = j;
            }
        }
        prop1 = true;
        for (int i = 0; i < count; ++i)
            if (occ[i] && !seen[i]) prop1 = false;
    }

    bool prop2 = false;
    if (s_count == 0 && nf > 0 && nt > 0) {
        std::array<bool, 8> mf{}, mt{};
        for (int i = 0; i < count; ++i) {
            mf[i] = occ[i] && near_from[i];
            mt[i] = occ[i] && near_to[i];
        }
        prop2 = detail::all_connected(ring, mf, count) && detail::all_connected(ring, mt, count);
    }
    return (prop1 || prop2) ? Verdict::Valid : Verdict::InvalidProperty;
}

// True iff the mover's cluster neighbours were connected within {from} u N(from)
// before the move and are not afterwards. The mover at its new site counts as a
// connector but is not itself required to stay attached.
template <class ClusterFn>
bool local_disconnection(const Lattice& lat, Coord from, Coord to, ClusterFn cluster) {
    int d = lat.direction_between(from, to);
    if (d < 0) throw std::invalid_argument("not adjacent");
    std::array<Coord, 7> sites{};
    std::array<bool, 7> before{}, after{};
    sites[0] = {0, 0};
    before[0] = true;
    after[0] = false;
    for (int k = 0; k < 6; ++k) {
        sites[k + 1] = kOffsets[k];
        bool c = cluster(lat.neighbor(from, k));
        before[k + 1] = c;
        after[k + 1] = (k == d) ? true : c;
    }
    std::array<bool, 7> others = after;
    others[d + 1] = false;
    return detail::all_connected(sites, before, 7) && !detail::all_connected(sites, after, 7) &&
           !detail::all_connected(sites, others, 7);
}

// Edge-count change for the Metropolis filter.
template <class ClusterFn>
int delta_edges(const Lattice& lat, Coord from, Coord to, ClusterFn cluster) {
    int before = 0, after = 0;
    for (int k = 0; k < 6; ++k) {
        if (cluster(lat.neighbor(from, k))) ++before;
        Coord n = lat.neighbor(to, k);
        if (n != lat.wrap(from) && cluster(n)) ++after;
    }
    return after - before;
}

double acceptance_probability(int delta_e, double lambda);

}  // namespace forage
