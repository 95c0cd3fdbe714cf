#include "forage/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace forage {

namespace {

template <class Member>
std::vector<std::vector<int>> particle_components(const World<typename Member::State>& w, Member member) {
    std::vector<std::vector<int>> out;
    std::vector<char> seen(w.size(), 0);
    std::vector<int> stack;
    for (int i = 0; i < w.size(); ++i) {
        if (seen[i] || !member(i)) continue;
        out.emplace_back();
        seen[i] = 1;
        stack.push_back(i);
        while (!stack.empty()) {
            int a = stack.back();
            stack.pop_back();
            out.back().push_back(a);
            for (Coord n : w.lattice().neighbors(w.pos[a])) {
                int b = w.at(n);
                if (b == kEmpty || seen[b] || !member(b)) continue;
                seen[b] = 1;
                stack.push_back(b);
            }
        }
    }
    return out;
}

struct CompressionMember {
    using State = CState;
    const CompressionWorld& w;
    bool operator()(int i) const { return is_cluster_state(w.state[i]); }
};

}  // namespace

std::vector<std::vector<int>> components(const CompressionWorld& w) {
    return particle_components(w, CompressionMember{w});
}

InvariantReport check_state_invariant(const CompressionWorld& w) {
    InvariantReport r;
    for (auto& comp : components(w)) {
        bool good = std::any_of(comp.begin(), comp.end(), [&](int i) {
            CState s = w.state[i];
            return s == CState::CF || s == CState::CGF || s == CState::DT;
        });
        if (!good) {
            r.ok = false;
            r.offending.push_back(comp);
        }
    }
    return r;
}

std::vector<int> residual_compression(const CompressionWorld& w) {
    std::vector<int> out;
    for (auto& comp : components(w)) {
        bool residual = std::any_of(comp.begin(), comp.end(), [&](int i) {
            CState s = w.state[i];
            if (s == CState::DT) return true;
            bool near = w.config.food_adjacent(w.pos[i]);
            return food_bit(s) != near;
        });
        if (residual) out.insert(out.end(), comp.begin(), comp.end());
    }
    std::sort(out.begin(), out.end());
    return out;
}

Potential potential(const CompressionWorld& w) {
    Potential p;
    for (CState s : w.state) {
        if (is_compression(s)) ++p.phi_c;
        if (s == CState::DT) ++p.phi_dt;
        if (growth_bit(s)) ++p.phi_t;
    }
    p.phi = p.phi_c + p.phi_dt + p.phi_t;
    return p;
}

std::vector<Coord> food_cluster(const CompressionWorld& w) {
    const Lattice& lat = w.lattice();
    std::vector<Coord> out;
    std::unordered_set<Coord> seen;
    std::vector<Coord> stack;
    for (Coord f : w.config.food()) {
        if (seen.insert(f).second) stack.push_back(f);
    }
    while (!stack.empty()) {
        Coord c = stack.back();
        stack.pop_back();
        out.push_back(c);
        for (Coord n : lat.neighbors(c)) {
            if (seen.count(n) || !is_cluster_site(w, n)) continue;
            seen.insert(n);
            stack.push_back(n);
        }
    }
    return out;
}

bool single_cluster_with_food(const CompressionWorld& w) {
    if (w.config.food().empty()) return false;
    std::size_t members = w.config.food().size();
    for (CState s : w.state)
        if (is_cluster_state(s)) ++members;
    auto cluster = food_cluster(w);
    if (cluster.size() != members) return false;
    return is_connected(w.lattice(), cluster);
}

int perimeter(const Lattice& lat, const std::vector<Coord>& sites) {
    std::unordered_set<Coord> in;
    for (Coord c : sites) in.insert(lat.wrap(c));
    int edges = 0, triangles = 0;
    for (Coord c : in) {
        Coord a = lat.neighbor(c, 0), b = lat.neighbor(c, 1), e = lat.neighbor(c, 2);
        bool ha = in.count(a), hb = in.count(b), he = in.count(e);
        edges += ha + hb + he;
        if (ha && hb) ++triangles;
        if (hb && he) ++triangles;
    }
    return 2 * edges - 3 * triangles;
}

int p_min(int n) {
    if (n <= 1) return 0;
    std::vector<Coord> sites{{0, 0}};
    for (auto& s : canonical_spiral(0, n - 1)) sites.push_back(s.site);
    // Large enough torus that the spiral never wraps.
    Lattice lat(4 * static_cast<int>(std::sqrt(static_cast<double>(n))) + 8);
    return perimeter(lat, sites);
}

double alpha_ratio(const Lattice& lat, const std::vector<Coord>& sites) {
    int pm = p_min(static_cast<int>(sites.size()));
    if (pm == 0) return 1.0;
    return static_cast<double>(perimeter(lat, sites)) / pm;
}

bool is_connected(const Lattice& lat, const std::vector<Coord>& sites) {
    if (sites.empty()) return true;
    std::unordered_set<Coord> in;
    for (Coord c : sites) in.insert(lat.wrap(c));
    std::unordered_set<Coord> seen{lat.wrap(sites[0])};
    std::vector<Coord> stack{lat.wrap(sites[0])};
    while (!stack.empty()) {
        Coord c = stack.back();
        stack.pop_back();
        for (Coord n : lat.neighbors(c))
            if (in.count(n) && seen.insert(n).second) stack.push_back(n);
    }
    return seen.size() == in.size();
}

bool is_hole_free(const Lattice& lat, const std::vector<Coord>& sites) {
    if (sites.empty()) return true;
    // Unwrap relative to the first site through cluster adjacency.
    std::unordered_map<Coord, Coord> plane;
    std::unordered_set<Coord> in;
    for (Coord c : sites) in.insert(lat.wrap(c));
    Coord root = lat.wrap(sites[0]);
    plane[root] = {0, 0};
    std::vector<Coord> stack{root};
    std::unordered_set<Coord> placed{{0, 0}};
    while (!stack.empty()) {
        Coord c = stack.back();
        stack.pop_back();
        for (int d = 0; d < 6; ++d) {
            Coord n = lat.neighbor(c, d);
            if (!in.count(n) || plane.count(n)) continue;
            Coord p{plane[c].x + kOffsets[d].x, plane[c].y + kOffsets[d].y};
            plane[n] = p;
            placed.insert(p);
            stack.push_back(n);
        }
    }
    if (plane.size() != in.size()) throw std::invalid_argument("site set is not connected");
    if (placed.size() != plane.size()) throw std::invalid_argument("site set wraps around the torus");
    int x0 = std::numeric_limits<int>::max(), x1 = std::numeric_limits<int>::min();
    int y0 = x0, y1 = x1;
    for (auto& [c, p] : plane) {
        x0 = std::min(x0, p.x);
        x1 = std::max(x1, p.x);
        y0 = std::min(y0, p.y);
        y1 = std::max(y1, p.y);
        for (int d = 0; d < 6; ++d) {
            auto it = plane.find(lat.neighbor(c, d));
            if (it != plane.end() && it->second != Coord{p.x + kOffsets[d].x, p.y + kOffsets[d].y})
                throw std::invalid_argument("site set wraps around the torus");
        }
    }
    if (x1 - x0 + 1 >= lat.side() || y1 - y0 + 1 >= lat.side())
        throw std::invalid_argument("site set wraps around the torus");
    // Flood the padded box from a corner; any unreached empty cell is a hole.
    std::set<Coord> outside;
    std::vector<Coord> q{{x0 - 1, y0 - 1}};
    outside.insert(q[0]);
    while (!q.empty()) {
        Coord c = q.back();
        q.pop_back();
        for (const Coord& o : kOffsets) {
            Coord n{c.x + o.x, c.y + o.y};
            if (n.x < x0 - 1 || n.x > x1 + 1 || n.y < y0 - 1 || n.y > y1 + 1) continue;
            if (placed.count(n) || outside.count(n)) continue;
            outside.insert(n);
            q.push_back(n);
        }
    }
    long long box = static_cast<long long>(x1 - x0 + 3) * (y1 - y0 + 3);
    return static_cast<long long>(outside.size() + placed.size()) == box;
}

double density_proxy(const LatticeConfig& cfg) {
    const Lattice& lat = cfg.lattice();
    int occupied = 0, dense = 0;
    for (int i = 0; i < lat.sites(); ++i) {
        Coord c = lat.coord(i);
        if (!cfg.occupied(c)) continue;
        ++occupied;
        int k = 0;
        for (Coord n : lat.neighbors(c)) k += cfg.occupied(n);
        if (k >= 3) ++dense;
    }
    return occupied ? static_cast<double>(dense) / occupied : 0.0;
}

std::vector<int> residual_spiral(const SpiralWorld& w) {
    std::vector<char> in_spiral(w.size(), 0);
    for (auto& s : find_spirals(w))
        for (int id : s.particles) in_spiral[id] = 1;
    std::vector<int> out;
    for (int i = 0; i < w.size(); ++i) {
        const SpiralState& s = w.state[i];
        if (!s.compression || in_spiral[i]) continue;
        if (s.base == 6 || !w.config.food_adjacent(w.pos[i])) out.push_back(i);
    }
    return out;
}

bool correctly_filled(const SpiralWorld& w, const Circle& c, int x) {
    const Lattice& lat = w.lattice();
    Coord site = lat.neighbor(c.center, rotate(c.zero_dir, x));
    int id = w.at(site);
    if (id == kEmpty) return false;
    const SpiralState& s = w.state[id];
    if (!s.compression || s.base != x) return false;
    Coord target = x == 0 ? lat.wrap(c.center) : lat.neighbor(c.center, rotate(c.zero_dir, x - 1));
    return lat.neighbor(site, s.parent) == target;
}

namespace {

bool verified_at(const SpiralWorld& w, const Circle& c, int x) {
    int id = w.at(w.lattice().neighbor(c.center, rotate(c.zero_dir, x)));
    return id != kEmpty && w.state[id].verified && correctly_filled(w, c, x);
}

}  // namespace

int circle_value(const SpiralWorld& w, const Circle& c) {
    if (w.config.is_food(c.center)) {
        for (int x = 4; x >= 0; --x) {
            if (!verified_at(w, c, x)) continue;
            for (int y = x + 1; y <= 5; ++y)
                if (!correctly_filled(w, c, y)) return x + 1;
        }
        return 0;
    }
    int v = 0;
    for (int y = 0; y < 6; ++y) v += verified_at(w, c, y);
    return v;
}

int inconsistency_value(const SpiralWorld& w) {
    const Lattice& lat = w.lattice();
    std::set<Circle> circles;
    for (int i = 0; i < w.size(); ++i) {
        const SpiralState& s = w.state[i];
        if (!s.compression || !s.verified) continue;
        for (int e = 0; e < 6; ++e) {
            Coord center = lat.neighbor(w.pos[i], e);
            circles.insert({center, rotate(opposite(e), -s.base)});
        }
    }
    int total = 0;
    for (const Circle& c : circles) total += circle_value(w, c);
    return total;
}

bool has_complete_circle(const SpiralWorld& w, bool require_verified) {
    for (Coord f : w.config.food())
        for (int e = 0; e < 6; ++e) {
            Circle c{f, e};
            bool ok = true;
            for (int x = 0; x < 6 && ok; ++x)
                ok = require_verified ? verified_at(w, c, x) : correctly_filled(w, c, x);
            if (ok) return true;
        }
    return false;
}

int stage_given(const SpiralWorld& w, int inconsistency) {
    if (inconsistency > 0) return 1;
    if (has_complete_circle(w, true)) return 4;
    if (has_complete_circle(w, false)) return 3;
    return 2;
}

int stage(const SpiralWorld& w) { return stage_given(w, inconsistency_value(w)); }

AuxGraph auxiliary_graph(const SpiralWorld& w) {
    const Lattice& lat = w.lattice();
    AuxGraph g;
    std::unordered_map<Coord, int> indeg;
    for (int i = 0; i < w.size(); ++i) {
        Classification c = classify(w, i);
        std::set<int> dirs;
        if (c.kind == Kind::Stable)
            dirs.insert(w.state[i].parent);
        else
            for (auto& cand : c.candidates) dirs.insert(cand.dir);
        for (int d : dirs) {
            Coord t = lat.neighbor(w.pos[i], d);
            g.edges.emplace_back(i, t);
            if (!w.config.is_food(t)) g.max_in_degree = std::max(g.max_in_degree, ++indeg[t]);
        }
    }
    return g;
}

HittingEstimate biased_walk_hitting_time(int n, int k, double eta, int trials, Rng& rng) {
    if (n < 1 || k < 0 || !(eta >= 0 && eta < 1) || trials < 1) throw std::invalid_argument("bad chain parameters");
    double p = 1.0 / n, q = eta / n;
    double sum = 0, sq = 0;
    for (int t = 0; t < trials; ++t) {
        long long x = k, steps = 0;
        while (x > 0) {
            double u = uniform01(rng);
            if (u < p)
                --x;
            else if (u < p + q)
                ++x;
            ++steps;
        }
        sum += steps;
        sq += static_cast<double>(steps) * steps;
    }
    HittingEstimate h;
    h.mean = sum / trials;
    double var = trials > 1 ? (sq - trials * h.mean * h.mean) / (trials - 1) : 0.0;
    h.stderr_mean = std::sqrt(std::max(0.0, var) / trials);
    return h;
}

namespace {

int cluster_count(const LatticeConfig& cfg, const std::vector<Coord>& members) {
    const Lattice& lat = cfg.lattice();
    std::unordered_set<Coord> in(members.begin(), members.end());
    std::unordered_set<Coord> seen;
    int count = 0;
    for (Coord c : members) {
        if (seen.count(c)) continue;
        ++count;
        std::vector<Coord> stack{c};
        seen.insert(c);
        while (!stack.empty()) {
            Coord a = stack.back();
            stack.pop_back();
            for (Coord n : lat.neighbors(a))
                if (in.count(n) && seen.insert(n).second) stack.push_back(n);
        }
    }
    return count;
}

}  // namespace

MetricsFrame measure(const CompressionWorld& w, long long step) {
    MetricsFrame f;
    f.step = step;
    Potential p = potential(w);
    f.phi = p.phi;
    f.phi_c = p.phi_c;
    f.phi_dt = p.phi_dt;
    f.phi_t = p.phi_t;
    f.n_residual = static_cast<int>(residual_compression(w).size());
    std::vector<Coord> members(w.config.food().begin(), w.config.food().end());
    for (int i = 0; i < w.size(); ++i) {
        f.n_by_state[state_name(w.state[i])]++;
        if (is_cluster_state(w.state[i])) members.push_back(w.pos[i]);
    }
    f.cluster_count = cluster_count(w.config, members);
    if (!w.config.food().empty()) {
        auto cl = food_cluster(w);
        f.perimeter = perimeter(w.lattice(), cl);
        f.alpha = alpha_ratio(w.lattice(), cl);
    }
    f.density = density_proxy(w.config);
    return f;
}

MetricsFrame measure(const SpiralWorld& w, long long step) {
    MetricsFrame f;
    f.step = step;
    std::vector<Coord> members(w.config.food().begin(), w.config.food().end());
    for (int i = 0; i < w.size(); ++i) {
        const SpiralState& s = w.state[i];
        if (s.compression) {
            ++f.phi_c;
            members.push_back(w.pos[i]);
            f.n_by_state[std::to_string(s.base) + (s.verified ? "*" : "")]++;
        } else {
            f.n_by_state["D"]++;
        }
    }
    f.phi = f.phi_c;
    f.n_residual = static_cast<int>(residual_spiral(w).size());
    f.inconsistency = inconsistency_value(w);
    f.stage = stage_given(w, f.inconsistency);
    f.cluster_count = cluster_count(w.config, members);
    for (auto& s : find_spirals(w)) f.n_spiral += static_cast<int>(s.particles.size());
    if (!w.config.food().empty()) {
        // Sites connected to the first food through compression particles.
        const Lattice& lat = w.lattice();
        std::unordered_set<Coord> in(members.begin(), members.end());
        std::unordered_set<Coord> seen{w.config.food()[0]};
        std::vector<Coord> stack{w.config.food()[0]}, cl;
        while (!stack.empty()) {
            Coord c = stack.back();
            stack.pop_back();
            cl.push_back(c);
            for (Coord n : lat.neighbors(c))
                if (in.count(n) && seen.insert(n).second) stack.push_back(n);
        }
        f.perimeter = perimeter(lat, cl);
        f.alpha = alpha_ratio(lat, cl);
    }
    f.density = density_proxy(w.config);
    return f;
}

namespace {

const std::vector<std::string>& state_columns() {
    static const std::vector<std::string> cols{"D",  "C",  "CG", "CF", "CGF", "DT", "0",  "1",  "2",  "3",
                                               "4",  "5",  "6",  "0*", "1*",  "2*", "3*", "4*", "5*"};
    return cols;
}

}  // namespace

std::string csv_header() {
    std::string h =
        "step,phi,phi_c,phi_dt,phi_t,perimeter,alpha,n_residual,inconsistency,stage,cluster_count,n_spiral,density";
    for (auto& s : state_columns()) h += ",n_" + s;
    return h;
}

std::string to_csv(const MetricsFrame& f) {
    std::ostringstream os;
    os << f.step << ',' << f.phi << ',' << f.phi_c << ',' << f.phi_dt << ',' << f.phi_t << ',' << f.perimeter << ','
       << f.alpha << ',' << f.n_residual << ',' << f.inconsistency << ',' << f.stage << ',' << f.cluster_count << ','
       << f.n_spiral << ',' << f.density;
    for (auto& s : state_columns()) {
        auto it = f.n_by_state.find(s);
        os << ',' << (it == f.n_by_state.end() ? 0 : it->second);
    }
    return os.str();
}

}  // namespace forage
