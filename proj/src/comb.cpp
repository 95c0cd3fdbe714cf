#include "forage/comb.hpp"

#include <algorithm>
#include <deque>
#include <string>
#include <unordered_map>

#include "forage/move_rules.hpp"

namespace forage {

namespace {

constexpr int kPlaneSide = 1 << 20;

const Lattice& plane() {
    static const Lattice lat(kPlaneSide);
    return lat;
}

Coord unwrap(Coord c) {
    if (c.x > kPlaneSide / 2) c.x -= kPlaneSide;
    if (c.y > kPlaneSide / 2) c.y -= kPlaneSide;
    return c;
}

Coord add(Coord a, Coord b) { return {a.x + b.x, a.y + b.y}; }
Coord sub(Coord a, Coord b) { return {a.x - b.x, a.y - b.y}; }
Coord scale(Coord a, int k) { return {a.x * k, a.y * k}; }

std::string str(Coord c) { return "(" + std::to_string(c.x) + "," + std::to_string(c.y) + ")"; }

// Which spine (direction) a site lies on, and at what distance; -1 if none.
std::pair<int, int> spine_of(Coord c) {
    int k = hex_distance(c);
    if (k == 0) return {-1, 0};
    for (int a = 0; a < 6; ++a)
        if (scale(kOffsets[a], k) == c) return {a, k};
    return {-1, k};
}

std::vector<Transform> all_transforms() {
    std::vector<Transform> out;
    for (int refl = 0; refl < 2; ++refl)
        for (int r = 0; r < 6; ++r) out.push_back({r, refl == 1});
    return out;
}

}  // namespace

Coord Transform::apply(Coord c) const {
    if (reflect) c = {c.x - c.y, -c.y};
    for (int i = 0; i < rotate(rot, 0); ++i) c = {c.x - c.y, c.x};
    return c;
}

Coord Transform::inverse(Coord c) const {
    for (int i = 0; i < rotate(rot, 0); ++i) c = {c.y, c.y - c.x};
    if (reflect) c = {c.x - c.y, -c.y};
    return c;
}

int Transform::dir(int d) const { return rotate(reflect ? rotate(0, -d) : d, rot); }

int SpineView::min_length() const { return *std::min_element(length.begin(), length.end()); }

CombOracle::CombOracle(const LatticeConfig& config, Coord food) {
    const Lattice& lat = config.lattice();
    if (!config.is_food(food)) throw std::invalid_argument("no food at the given site");
    if (config.food().size() != 1) throw std::invalid_argument("exactly one food particle is required");
    std::vector<Coord> rel;
    for (int i = 0; i < lat.sites(); ++i) {
        Coord c = lat.coord(i);
        if (config.occupied(c)) rel.push_back(lat.offset(food, c));
    }
    int n = static_cast<int>(rel.size());
    if (lat.side() < 2 * n + 3)
        throw std::invalid_argument("lattice side " + std::to_string(lat.side()) + " is below 2n+3 = " +
                                    std::to_string(2 * n + 3));
    *this = CombOracle(rel);
}

CombOracle::CombOracle(const std::vector<Coord>& particles) {
    for (Coord c : particles) {
        if (c == Coord{0, 0}) throw std::invalid_argument("particle on the food site");
        if (!occ_.insert(c).second) throw std::invalid_argument("duplicate particle " + str(c));
    }
    std::unordered_set<Coord> seen{{0, 0}};
    std::vector<Coord> stack{{0, 0}};
    while (!stack.empty()) {
        Coord c = stack.back();
        stack.pop_back();
        for (Coord o : kOffsets) {
            Coord n = add(c, o);
            if (occ_.count(n) && seen.insert(n).second) stack.push_back(n);
        }
    }
    if (seen.size() != occ_.size() + 1) throw std::invalid_argument("configuration is not connected to the food");
}

bool CombOracle::occupied(Coord c) const { return c == Coord{0, 0} || occ_.count(c) > 0; }
bool CombOracle::has_particle(Coord c) const { return occ_.count(c) > 0; }

std::vector<Coord> CombOracle::particles() const {
    std::vector<Coord> out(occ_.begin(), occ_.end());
    std::sort(out.begin(), out.end());
    return out;
}

int CombOracle::max_extent() const {
    int m = 0;
    for (Coord c : occ_) m = std::max(m, hex_distance(c));
    return m;
}

SpineView CombOracle::spines() const {
    SpineView v;
    int ext = max_extent();
    for (int a = 0; a < 6; ++a) {
        for (int k = 1; k <= ext; ++k) {
            Coord s = scale(kOffsets[a], k);
            if (!has_particle(s)) continue;
            v.tail_extent[a] = k;
            bool off_spine = false;
            for (Coord o : kOffsets) {
                Coord n = add(s, o);
                if (!has_particle(n)) continue;
                auto [b, dist] = spine_of(n);
                if (b != a) off_spine = true;
            }
            if (off_spine) {
                v.length[a] = k;
                v.anchor[a] = s;
            }
        }
    }
    return v;
}

bool CombOracle::is_line() const {
    int n = count();
    if (n == 0) return true;
    for (int a = 0; a < 6; ++a) {
        bool ok = true;
        for (int k = 1; k <= n && ok; ++k) ok = has_particle(scale(kOffsets[a], k));
        if (ok) return true;
    }
    return false;
}

bool CombOracle::is_hexagon_with_tail(int r) const {
    SpineView v = spines();
    int tails = 0;
    for (int a = 0; a < 6; ++a) {
        if (v.length[a] != r) return false;
        if (v.tail_extent[a] > r) ++tails;
    }
    if (tails > 1) return false;
    for (Coord c : occ_) {
        if (hex_distance(c) <= r) continue;
        auto [a, k] = spine_of(c);
        if (a < 0) return false;
    }
    return true;
}

bool CombOracle::valid_move(Coord from, Coord to) const {
    if (!has_particle(from) || plane().direction_between(from, to) < 0) return false;
    auto cluster = [&](Coord c) { return occupied(unwrap(c)); };
    return evaluate_move(plane(), from, to, cluster, cluster) == Verdict::Valid;
}

void CombOracle::apply(Coord from, Coord to, MoveList& out) {
    if (!valid_move(from, to)) throw CombError("invalid move " + str(from) + " -> " + str(to));
    occ_.erase(from);
    occ_.insert(to);
    out.emplace_back(from, to);
}

bool CombOracle::route(Coord from, Coord to, MoveList& out, const std::function<bool(Coord)>& allowed) {
    if (from == to) return true;
    if (!has_particle(from) || occupied(to)) return false;
    int bound = max_extent() + 3;
    occ_.erase(from);
    auto cluster = [&](Coord c) { return occupied(unwrap(c)); };
    std::unordered_map<Coord, Coord> parent{{from, from}};
    std::deque<Coord> queue{from};
    bool found = false;
    while (!queue.empty() && !found) {
        Coord s = queue.front();
        queue.pop_front();
        for (Coord o : kOffsets) {
            Coord t = add(s, o);
            if (parent.count(t) || occupied(t) || hex_distance(t) > bound) continue;
            if (t != to && !allowed(t)) continue;
            if (evaluate_move(plane(), s, t, cluster, cluster) != Verdict::Valid) continue;
            parent[t] = s;
            if (t == to) {
                found = true;
                break;
            }
            queue.push_back(t);
        }
    }
    occ_.insert(from);
    if (!found) return false;
    std::vector<Coord> path{to};
    while (path.back() != from) path.push_back(parent[path.back()]);
    for (auto i = path.size() - 1; i > 0; --i) apply(path[i], path[i - 1], out);
    return true;
}

void CombOracle::move_or_route(Coord from, Coord to, MoveList& out, const std::function<bool(Coord)>& allowed) {
    if (from == to) return;
    if (valid_move(from, to) && !occupied(to)) {
        apply(from, to, out);
        return;
    }
    ++stats_.fallback_routes;
    if (!route(from, to, out, allowed)) throw CombError("no valid route " + str(from) + " -> " + str(to));
}

bool CombOracle::is_combed(const CombFrame& f, int lane, int depth) const {
    if (lane <= 0 || depth < 0) throw std::invalid_argument("comb position needs lane > 0 and depth >= 0");
    auto occ = [&](int l, int d) { return occupied(f.site(l, d)); };
    for (Coord c : occ_) {
        auto [a, b] = f.lane_depth(c);
        if (a < lane || b < depth + (a - lane)) continue;
        if (occ(a, b - 1)) return false;
        if (!occ(a - 1, b - 1)) return false;
        if (a == lane && occ(lane - 1, b)) return false;
    }
    return true;
}

bool CombOracle::is_combable(const CombFrame& f, int lane, int depth) const {
    return is_combed(f, lane + 1, depth + 1) && !occupied(f.site(lane, depth - 1));
}

void CombOracle::line_formation(const CombFrame& f, int lane, int depth, MoveList& out) {
    auto occ = [&](int l, int d) { return occupied(f.site(l, d)); };
    auto part = [&](int l, int d) { return has_particle(f.site(l, d)); };
    auto below_region = [&, lane, depth](Coord c) {
        if (c == Coord{0, 0}) return false;
        auto [a, b] = f.lane_depth(c);
        return a >= lane ? b >= depth + (a - lane) : b >= depth;
    };
    auto step = [&](int l1, int d1, int l2, int d2) {
        move_or_route(f.site(l1, d1), f.site(l2, d2), out, below_region);
    };

    int guard = 4 * count() * count() + 16;
    while (guard-- > 0) {
        int maxb = depth;
        for (Coord c : occ_) {
            auto [a, b] = f.lane_depth(c);
            if (a == lane) maxb = std::max(maxb, b);
        }
        int top = -1, bot = -1;
        for (int b = depth; b <= maxb; ++b) {
            if (!part(lane, b)) continue;
            int e = b;
            while (part(lane, e + 1)) ++e;
            if (e > b) {
                top = b;
                bot = e;
                break;
            }
            b = e;
        }
        if (top < 0) return;
        const int b = top;

        auto shiftable = [&](int l) {
            if (!part(l, b)) return false;
            int k = 0;
            for (Coord o : kOffsets)
                if (occupied(add(f.site(l, b), o))) ++k;
            return k == 2 && occ(l, b + 1) && occ(l - 1, b - 1);
        };
        if (shiftable(lane)) {
            int k = 1;
            while (shiftable(lane - 2 * k)) ++k;
            int ln = lane - 2 * k;
            bool down_right = !part(ln, b) || occ(ln, b - 1) || occ(ln + 1, b + 1);
            if (down_right) {
                for (int i = k; i >= 1; --i) {
                    int li = lane - 2 * (i - 1);
                    step(li, b, li - 1, b);
                }
                continue;
            }
            for (int i = k + 1; i >= 2; --i) {
                int li = lane - 2 * (i - 1);
                step(li, b, li + 1, b);
            }
        }

        int m = 0;
        while (occ(lane + m + 1, bot + m + 1)) ++m;
        std::vector<std::pair<int, int>> path{{lane + 1, b + 1}};
        for (int d = b + 2; d <= bot; ++d) path.push_back({lane + 1, d});
        for (int j = 1; j <= m; ++j) path.push_back({lane + 1 + j, bot + j});
        path.push_back({lane + 1 + m, bot + m + 1});
        Coord cur = f.site(lane, b);
        Coord target = f.site(path.back().first, path.back().second);
        for (auto [l, d] : path) {
            Coord next = f.site(l, d);
            if (next == cur) continue;
            if (!occupied(next) && valid_move(cur, next)) {
                apply(cur, next, out);
                cur = next;
                continue;
            }
            ++stats_.fallback_routes;
            if (!route(cur, target, out, below_region))
                throw CombError("line formation stuck at " + str(cur) + " heading to " + str(target));
            cur = target;
            break;
        }
    }
    throw CombError("line formation did not terminate");
}

void CombOracle::line_merging(const CombFrame& f, int lane, int depth, MoveList& out) {
    auto occ = [&](int l, int d) { return occupied(f.site(l, d)); };
    auto part = [&](int l, int d) { return has_particle(f.site(l, d)); };
    auto residual = [&, lane, depth](Coord c) {
        auto [a, b] = f.lane_depth(c);
        return a >= lane && b >= depth + (a - lane);
    };
    auto below_region = [&, lane, depth](Coord c) {
        if (c == Coord{0, 0}) return false;
        auto [a, b] = f.lane_depth(c);
        return a >= lane ? b >= depth + (a - lane) : b >= depth;
    };

    std::vector<int> starts;
    for (Coord c : occ_) {
        auto [a, b] = f.lane_depth(c);
        if (a == lane && b >= depth) starts.push_back(b);
    }
    std::sort(starts.rbegin(), starts.rend());
    for (int b : starts) {
        // Bottom of the column component the line hangs from; a line whose first
        // particle sits next to the column without an up-right neighbor hangs
        // from the component of its down-right neighbor.
        int cb;
        if (occ(lane - 1, b - 1))
            cb = b - 1;
        else if (occ(lane - 1, b))
            cb = b;
        else
            throw CombError("line at depth " + std::to_string(b) + " is not attached to the column");
        while (occ(lane - 1, cb + 1)) ++cb;
        const int want = cb + 1;
        if (want == b) continue;
        int len = 0;
        while (part(lane + len, b + len)) ++len;
        auto shift_down = [&](int from_b, int to_b) {
            for (int s = from_b; s < to_b; ++s)
                for (int k = 0; k < len; ++k)
                    move_or_route(f.site(lane + k, s + k), f.site(lane + k, s + k + 1), out, below_region);
        };
        if (part(lane, want)) {
            // Rest the line on the lower one, then walk its particles along it.
            shift_down(b, want - 1);
            b = want - 1;
            for (int k = len - 1; k >= 0; --k) {
                int e = 0;
                while (part(lane + e + 1, want + e + 1)) ++e;
                Coord target = f.site(lane + e + 1, want + e + 1);
                if (!route(f.site(lane + k, b + k), target, out, residual) &&
                    !route(f.site(lane + k, b + k), target, out, below_region))
                {
                    std::string dump;
                    for (Coord c : occ_) {
                        auto [a, bb] = f.lane_depth(c);
                        dump += " " + std::to_string(a) + "/" + std::to_string(bb);
                    }
                    throw CombError("line merge found no route to " + str(target) + " comb " + std::to_string(lane) + "/" + std::to_string(depth) + " from " + std::to_string(lane + k) + "/" + std::to_string(b + k) + " lanes/depths:" + dump);
                }
            }
            continue;
        }
        shift_down(b, want);
    }
}

MoveList CombOracle::comb(const CombFrame& f, int lane, int depth) {
    if (!is_combable(f, lane, depth))
        throw CombError("position (" + std::to_string(lane) + "," + std::to_string(depth) + ") is not combable");
    MoveList out;
    line_formation(f, lane, depth, out);
    line_merging(f, lane, depth, out);
    if (!is_combed(f, lane, depth))
        throw CombError("comb left (" + std::to_string(lane) + "," + std::to_string(depth) + ") uncombed");
    return out;
}

MoveList CombOracle::spine_comb(const CombFrame& f) {
    SpineView v = spines();
    int src = f.t.dir(3);
    int r = v.length[src], rt = v.tail_extent[src];
    int leftmost = 0;
    for (Coord c : occ_) leftmost = std::max(leftmost, f.lane_depth(c).first);
    MoveList out;
    for (int x = leftmost; x >= r + 1; --x) {
        MoveList m = comb(f, x, x > rt ? 1 : 0);
        out.insert(out.end(), m.begin(), m.end());
    }
    return out;
}

bool CombOracle::reduce_hexagon(int r, MoveList& out) {
    auto reduced = [&] { return spines().min_length() < r; };
    auto comb_gap = [&](Coord gap, std::optional<Coord> outer) {
        for (const Transform& t : all_transforms()) {
            CombFrame f{t};
            auto [l, d] = f.lane_depth(gap);
            if (l != r || d <= 0 || d >= r) continue;
            if (outer && f.lane_depth(*outer) != std::pair{r + 1, d}) continue;
            if (!is_combable(f, r, d + 1)) continue;
            MoveList m = comb(f, r, d + 1);
            out.insert(out.end(), m.begin(), m.end());
            return reduced();
        }
        return false;
    };

    std::vector<Coord> ring;
    for (int a = 0; a < 6; ++a)
        for (int k = 0; k < r; ++k) ring.push_back(add(scale(kOffsets[a], r), scale(kOffsets[rotate(a, 2)], k)));
    for (Coord h : ring)
        if (!has_particle(h)) return comb_gap(h, std::nullopt);

    SpineView v = spines();
    if (r == 1) {
        for (Coord h : ring) {
            int a = spine_of(h).first;
            if (v.tail_extent[a] > r) continue;
            for (Coord o : kOffsets) {
                Coord t = add(h, o);
                if (hex_distance(t) != 2 || spine_of(t).first >= 0 || occupied(t)) continue;
                if (!valid_move(h, t)) continue;
                apply(h, t, out);
                return reduced();
            }
        }
        return false;
    }

    for (Coord v1 : occ_) {
        if (hex_distance(v1) != r - 1) continue;
        for (Coord o2 : kOffsets) {
            Coord v2 = add(v1, o2);
            if (hex_distance(v2) != r - 2 || !occupied(v2)) continue;
            for (Coord oc : kOffsets) {
                Coord corner = add(v1, oc);
                auto [a, k] = spine_of(corner);
                if (a < 0 || k != r) continue;
                for (int turn : {-2, 2}) {
                    int d = rotate(a, turn);
                    Coord dest = add(corner, kOffsets[d]);
                    if (occupied(dest) || !valid_move(corner, dest)) continue;
                    apply(corner, dest, out);
                    for (int j = r + 1; j <= v.tail_extent[a]; ++j) {
                        Coord tp = scale(kOffsets[a], j);
                        move_or_route(tp, add(tp, kOffsets[d]), out, [](Coord) { return true; });
                    }
                    if (reduced()) return true;
                }
            }
            for (int s : {-1, 1}) {
                int dv = plane().direction_between(v1, v2);
                Coord u = add(v1, kOffsets[rotate(dv, s)]);
                if (hex_distance(u) != r - 1) continue;
                int du = plane().direction_between(v1, u);
                for (int s2 : {-1, 1}) {
                    Coord v0 = add(v1, kOffsets[rotate(du, s2)]);
                    if (hex_distance(v0) != r || !has_particle(v0)) continue;
                    if (!occupied(u)) {
                        if (!valid_move(v0, u)) continue;
                        apply(v0, u, out);
                        if (comb_gap(v0, std::nullopt)) return true;
                        return reduced();
                    }
                    Coord up = add(v0, sub(v0, u));
                    if (hex_distance(up) != r + 1 || occupied(up) || !valid_move(v0, up)) continue;
                    apply(v0, up, out);
                    if (comb_gap(v0, up)) return true;
                    return reduced();
                }
            }
        }
    }
    return false;
}

MoveList CombOracle::reduce_min_spine() {
    SpineView v = spines();
    const int r = v.min_length();
    if (r < 1) throw std::logic_error("minimum spine length is already 0");
    int s0 = 0;
    while (v.length[s0] != r) ++s0;
    MoveList out;
    auto reduced = [&] { return spines().min_length() < r; };
    for (int i = 0; i < 7; ++i) {
        CombFrame f = CombFrame::from_source(rotate(s0, i));
        MoveList m = spine_comb(f);
        out.insert(out.end(), m.begin(), m.end());
        if (reduced()) return out;
        for (int d = 0; d <= r; ++d) {
            if (occupied(f.site(r, d))) continue;
            if (d > 0 && d < r) {
                m = comb(f, r, d + 1);
                out.insert(out.end(), m.begin(), m.end());
            }
            if (reduced()) return out;
            throw CombError("gap in the line did not shorten a spine");
        }
    }
    if (!is_hexagon_with_tail(r)) throw CombError("spine combs did not produce a hexagon with a tail");
    if (!reduce_hexagon(r, out)) throw CombError("hexagon reduction failed at radius " + std::to_string(r));
    return out;
}

MoveList CombOracle::flatten_to_line() {
    MoveList out;
    if (is_line()) return out;
    int guard = count() + 2;
    while (spines().min_length() > 0) {
        if (guard-- <= 0) throw CombError("minimum spine length did not reach 0");
        MoveList m = reduce_min_spine();
        out.insert(out.end(), m.begin(), m.end());
    }
    SpineView v = spines();
    int s0 = 0;
    while (v.length[s0] != 0) ++s0;
    for (int i = 0; i < 7 && !is_line(); ++i) {
        MoveList m = spine_comb(CombFrame::from_source(rotate(s0, i)));
        out.insert(out.end(), m.begin(), m.end());
    }
    if (!is_line()) throw CombError("spine combs at radius 0 did not produce a line");
    return out;
}

MoveList CombOracle::reorient_line(int dir) {
    if (!is_line()) throw std::logic_error("configuration is not a line");
    int n = count();
    MoveList out;
    if (n == 0) return out;
    int a = 0;
    while (!has_particle(kOffsets[a])) ++a;
    dir = rotate(dir, 0);
    if (a == dir) return out;
    auto anywhere = [](Coord) { return true; };
    for (int j = 1; j <= n; ++j) {
        Coord from = scale(kOffsets[a], n - j + 1);
        Coord to = scale(kOffsets[dir], j);
        if (!route(from, to, out, anywhere)) throw CombError("no route while turning the line");
    }
    return out;
}

MoveList CombOracle::to_torus(const Lattice& lat, Coord food, const MoveList& moves) {
    MoveList out;
    out.reserve(moves.size());
    for (auto& [a, b] : moves) out.emplace_back(lat.translate(food, a), lat.translate(food, b));
    return out;
}

}  // namespace forage
