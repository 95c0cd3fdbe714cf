#include "forage/spiral.hpp"

#include <stdexcept>
#include <unordered_set>

namespace forage {

std::string encode(const SpiralState& s) {
    if (!s.compression) return "D";
    std::string out = std::to_string(s.base);
    if (s.verified) out += '*';
    out += '@';
    out += std::to_string(s.parent);
    return out;
}

SpiralState parse_spiral_state(const std::string& text) {
    if (text == "D") return SpiralState::dispersion();
    auto at = text.find('@');
    if (at == std::string::npos || at == 0 || at + 2 != text.size()) throw std::invalid_argument("bad spiral state: " + text);
    std::string head = text.substr(0, at);
    bool verified = head.back() == '*';
    if (verified) head.pop_back();
    if (head.size() != 1 || head[0] < '0' || head[0] > '6') throw std::invalid_argument("bad spiral state: " + text);
    int base = head[0] - '0';
    int parent = text[at + 1] - '0';
    if (parent < 0 || parent > 5 || (verified && base == 6)) throw std::invalid_argument("bad spiral state: " + text);
    return SpiralState::make(base, verified, parent);
}

void SpiralParams::validate() const {
    if (!(rho > 0 && rho < 0.5)) throw std::invalid_argument("rho must lie in (0, 1/2)");
}

namespace {

const SpiralState* comp_at(const SpiralWorld& w, Coord c) {
    int id = w.at(c);
    if (id == kEmpty || !w.state[id].compression) return nullptr;
    return &w.state[id];
}

}  // namespace

bool attachment_property(const SpiralWorld& w, Coord v, const SpiralState& s) {
    const Lattice& lat = w.lattice();
    const int d = s.parent;
    Coord vp = lat.neighbor(v, d);
    Coord vcw = lat.neighbor(v, rotate(d, -1));
    Coord vccw = lat.neighbor(v, rotate(d, 1));
    const SpiralState* cw = comp_at(w, vcw);

    if (w.config.is_food(vp)) {
        // A food-parented particle starts the circle; the site behind it must not
        // already hold an earlier part of some other chain.
        const SpiralState* ccw = comp_at(w, vccw);
        return s.base == 0 && (!ccw || ccw->base == 5);
    }
    const SpiralState* p = comp_at(w, vp);
    if (!p) return false;
    switch (p->base) {
        case 0:
            return s.base == 1 && p->parent == rotate(d, -2) && w.config.is_food(vcw);
        case 1:
        case 2:
        case 3:
        case 4:
            return s.base == p->base + 1 && p->parent == rotate(d, -1) && w.config.is_food(vcw);
        case 5:
            return s.base == 6 && p->parent == d && cw && cw->base == 0 && cw->verified;
        default:
            if (s.base != 6 || !cw) return false;
            if (cw->base == 0) {
                return p->parent == rotate(d, -1) && (cw->parent == p->parent || cw->parent == rotate(p->parent, -1));
            }
            return (p->parent == d || p->parent == rotate(d, -1)) && cw->parent == p->parent;
    }
}

std::vector<Candidate> attachment_candidates(const SpiralWorld& w, Coord v) {
    std::vector<Candidate> out;
    for (int base = 0; base <= 6; ++base)
        for (int d = 0; d < 6; ++d)
            if (attachment_property(w, v, SpiralState::make(base, false, d))) out.push_back({base, d});
    return out;
}

bool is_stable(const SpiralWorld& w, int id) {
    const SpiralState& s = w.state[id];
    return s.compression && attachment_property(w, w.pos[id], s);
}

bool is_verifiable(const SpiralWorld& w, int id) {
    if (!is_stable(w, id)) return false;
    const SpiralState& s = w.state[id];
    if (s.base > 5) return false;
    if (s.base == 5) return true;
    const Lattice& lat = w.lattice();
    Coord v = w.pos[id];
    int center;
    if (w.config.is_food(lat.neighbor(v, s.parent)))
        center = s.parent;
    else if (w.config.is_food(lat.neighbor(v, rotate(s.parent, -1))))
        center = rotate(s.parent, -1);
    else
        return false;
    // One step counterclockwise around the center.
    Coord u = lat.neighbor(v, rotate(center, -1));
    const SpiralState* us = comp_at(w, u);
    return us && us->verified && us->base == s.base + 1 && lat.neighbor(u, us->parent) == v;
}

Classification classify(const SpiralWorld& w, int id) {
    Classification c;
    const SpiralState& s = w.state[id];
    if (s.compression && attachment_property(w, w.pos[id], s)) {
        c.kind = Kind::Stable;
        c.verifiable = is_verifiable(w, id);
        return c;
    }
    c.kind = s.compression ? Kind::Unstable : Kind::Dispersion;
    c.candidates = attachment_candidates(w, w.pos[id]);
    return c;
}

SpiralActivation activate(SpiralWorld& w, int id, const SpiralParams& params, Rng& rng) {
    SpiralActivation a;
    a.particle = id;
    a.before = w.state[id];
    Classification c = classify(w, id);
    SpiralState& s = w.state[id];
    if (c.kind == Kind::Stable) {
        s.verified = s.base <= 5 && c.verifiable;
    } else if (auto pick = c.chosen()) {
        if (c.kind == Kind::Dispersion) {
            if (bernoulli(rng, params.rho)) s = SpiralState::make(pick->base, false, pick->dir);
        } else {
            s = SpiralState::make(pick->base, false, pick->dir);
        }
    } else {
        s = SpiralState::dispersion();
    }
    if (!s.compression) {
        Coord from = w.pos[id];
        Coord to = w.lattice().neighbor(from, uniform_int(rng, 6));
        if (!w.config.blocked(to)) {
            w.move(id, to);
            a.moved = true;
            a.from = from;
            a.to = to;
        }
    }
    a.after = s;
    return a;
}

std::vector<SpiralSite> canonical_spiral(int start, int count) {
    std::vector<SpiralSite> out;
    if (count <= 0) return out;
    std::unordered_set<Coord> used{{0, 0}};
    Coord v = kOffsets[start];
    int back = opposite(start);
    out.push_back({v, back});
    used.insert(v);
    while (static_cast<int>(out.size()) < count) {
        int next = -1;
        for (int k = 1; k < 6; ++k) {
            int d = rotate(back, -k);
            Coord c{v.x + kOffsets[d].x, v.y + kOffsets[d].y};
            if (!used.count(c)) {
                next = d;
                break;
            }
        }
        if (next < 0) throw std::logic_error("spiral tip enclosed");
        v = {v.x + kOffsets[next].x, v.y + kOffsets[next].y};
        back = opposite(next);
        out.push_back({v, back});
        used.insert(v);
    }
    return out;
}

std::vector<int> trace_chain(const SpiralWorld& w, Coord food, int start) {
    std::vector<int> chain;
    const Lattice& lat = w.lattice();
    auto sites = canonical_spiral(start, w.size());
    std::unordered_set<int> seen;
    for (std::size_t i = 0; i < sites.size(); ++i) {
        Coord c = lat.translate(food, sites[i].site);
        int id = w.at(c);
        if (id == kEmpty || seen.count(id)) break;
        const SpiralState& s = w.state[id];
        if (!s.compression || s.parent != sites[i].parent) break;
        if (i < 6 ? (s.base != static_cast<int>(i) || !s.verified) : s.base != 6) break;
        seen.insert(id);
        chain.push_back(id);
    }
    return chain;
}

std::vector<SpiralDescriptor> find_spirals(const SpiralWorld& w) {
    std::vector<SpiralDescriptor> out;
    for (Coord f : w.config.food())
        for (int start = 0; start < 6; ++start) {
            auto chain = trace_chain(w, f, start);
            if (chain.size() >= 6) out.push_back({f, start, std::move(chain)});
        }
    return out;
}

}  // namespace forage
