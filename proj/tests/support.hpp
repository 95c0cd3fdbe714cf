#pragma once

// Test-side reference implementations, written independently of the library
// and used to freeze expected values.

#include <algorithm>
#include <array>
#include <cstdint>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "forage/lattice.hpp"

namespace ref {

using forage::Coord;
using Set = std::set<std::pair<int, int>>;

inline const std::array<std::pair<int, int>, 6> kDirs{{{1, 0}, {1, 1}, {0, 1}, {-1, 0}, {-1, -1}, {0, -1}}};

inline std::pair<int, int> P(Coord c) { return {c.x, c.y}; }

inline bool adjacent(std::pair<int, int> a, std::pair<int, int> b) {
    for (auto [dx, dy] : kDirs)
        if (a.first + dx == b.first && a.second + dy == b.second) return true;
    return false;
}

inline std::vector<std::pair<int, int>> nbrs(std::pair<int, int> a) {
    std::vector<std::pair<int, int>> out;
    for (auto [dx, dy] : kDirs) out.push_back({a.first + dx, a.second + dy});
    return out;
}

// Connected within `within` starting from the members of `from`.
inline bool all_reach(const Set& members, const Set& seeds) {
    if (members.empty()) return true;
    Set seen;
    std::vector<std::pair<int, int>> stack;
    for (auto s : seeds)
        if (members.count(s)) {
            seen.insert(s);
            stack.push_back(s);
        }
    while (!stack.empty()) {
        auto c = stack.back();
        stack.pop_back();
        for (auto n : nbrs(c))
            if (members.count(n) && seen.insert(n).second) stack.push_back(n);
    }
    return seen.size() == members.size();
}

inline bool connected(const Set& members) {
    if (members.empty()) return true;
    return all_reach(members, {*members.begin()});
}

// Planar valid-move rule: Property 1 or Property 2 plus the degree bound.
// `cluster` holds every cluster site, including the mover at `from` and food.
inline bool valid_move(const Set& cluster, std::pair<int, int> from, std::pair<int, int> to) {
    if (!adjacent(from, to) || cluster.count(to)) return false;
    Set nf, nt, nu, shared;
    for (auto n : nbrs(from))
        if (n != to && cluster.count(n)) nf.insert(n);
    for (auto n : nbrs(to))
        if (n != from && cluster.count(n)) nt.insert(n);
    if (nf.size() >= 5) return false;
    nu = nf;
    nu.insert(nt.begin(), nt.end());
    for (auto n : nf)
        if (nt.count(n)) shared.insert(n);
    bool p1 = !shared.empty() && all_reach(nu, shared);
    bool p2 = shared.empty() && !nf.empty() && !nt.empty() && connected(nf) && connected(nt);
    return p1 || p2;
}

// Random connected particle set containing no food, grown from the food at
// the origin by repeatedly occupying a uniformly chosen empty boundary site.
inline std::vector<Coord> eden(int n, std::mt19937_64& rng) {
    Set cells{{0, 0}};
    std::vector<Coord> out;
    while (static_cast<int>(out.size()) < n) {
        std::vector<std::pair<int, int>> frontier;
        for (auto c : cells)
            for (auto m : nbrs(c))
                if (!cells.count(m)) frontier.push_back(m);
        std::sort(frontier.begin(), frontier.end());
        frontier.erase(std::unique(frontier.begin(), frontier.end()), frontier.end());
        auto pick = frontier[rng() % frontier.size()];
        cells.insert(pick);
        out.push_back({pick.first, pick.second});
    }
    return out;
}

// Boundary-walk length counted edge by edge: edges lying on no occupied
// triangle are walked twice, edges on one triangle once.
inline int perimeter(const Set& cells) {
    int total = 0;
    for (auto a : cells)
        for (int d = 0; d < 3; ++d) {
            auto [dx, dy] = kDirs[d];
            std::pair<int, int> b{a.first + dx, a.second + dy};
            if (!cells.count(b)) continue;
            auto [ux, uy] = kDirs[(d + 1) % 6];
            auto [vx, vy] = kDirs[(d + 5) % 6];
            int tri = cells.count({a.first + ux, a.second + uy}) + cells.count({a.first + vx, a.second + vy});
            total += 2 - tri;
        }
    return total;
}

// Minimum perimeter over all connected n-cell sets, by exhaustive growth of
// translation-normalized fixed polyhexes.
inline int brute_min_perimeter(int n) {
    auto normalize = [](Set s) {
        int mx = 1 << 30, my = 1 << 30;
        for (auto [x, y] : s) {
            mx = std::min(mx, x);
            my = std::min(my, y);
        }
        Set out;
        for (auto [x, y] : s) out.insert({x - mx, y - my});
        return out;
    };
    std::set<Set> layer{{{0, 0}}};
    for (int k = 1; k < n; ++k) {
        std::set<Set> next;
        for (auto& s : layer)
            for (auto c : s)
                for (auto m : nbrs(c)) {
                    if (s.count(m)) continue;
                    Set t = s;
                    t.insert(m);
                    next.insert(normalize(t));
                }
        layer = std::move(next);
    }
    int best = 1 << 30;
    for (auto& s : layer) best = std::min(best, perimeter(s));
    return best;
}

inline std::size_t polyhex_count(int n) {
    std::set<Set> layer{{{0, 0}}};
    for (int k = 1; k < n; ++k) {
        std::set<Set> next;
        for (auto& s : layer)
            for (auto c : s)
                for (auto m : nbrs(c)) {
                    if (s.count(m)) continue;
                    Set t = s;
                    t.insert(m);
                    int mx = 1 << 30, my = 1 << 30;
                    for (auto [x, y] : t) {
                        mx = std::min(mx, x);
                        my = std::min(my, y);
                    }
                    Set u;
                    for (auto [x, y] : t) u.insert({x - mx, y - my});
                    next.insert(u);
                }
        layer = std::move(next);
    }
    return layer.size();
}

// Holes: empty cells inside the bounding box not reachable from its border.
inline bool hole_free(const Set& cells) {
    if (cells.empty()) return true;
    int x0 = 1 << 30, y0 = 1 << 30, x1 = -(1 << 30), y1 = -(1 << 30);
    for (auto [x, y] : cells) {
        x0 = std::min(x0, x);
        y0 = std::min(y0, y);
        x1 = std::max(x1, x);
        y1 = std::max(y1, y);
    }
    --x0, --y0, ++x1, ++y1;
    Set seen;
    std::vector<std::pair<int, int>> stack{{x0, y0}};
    seen.insert({x0, y0});
    while (!stack.empty()) {
        auto c = stack.back();
        stack.pop_back();
        for (auto m : nbrs(c)) {
            if (m.first < x0 || m.first > x1 || m.second < y0 || m.second > y1) continue;
            if (cells.count(m) || !seen.insert(m).second) continue;
            stack.push_back(m);
        }
    }
    long long box = static_cast<long long>(x1 - x0 + 1) * (y1 - y0 + 1);
    return static_cast<long long>(seen.size() + cells.size()) == box;
}

}  // namespace ref
