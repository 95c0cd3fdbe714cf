#include "forage/compression.hpp"

#include <stdexcept>

namespace forage {

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Valid: return "valid";
        case Verdict::InvalidProperty: return "invalid_property";
        case Verdict::InvalidDegree: return "invalid_degree";
        case Verdict::Occupied: return "occupied";
    }
    return "?";
}

double acceptance_probability(int delta_e, double lambda) {
    if (!(lambda > 0)) throw std::invalid_argument("lambda must be positive");
    if (delta_e >= 0 && lambda >= 1) return 1.0;
    double v = std::pow(lambda, delta_e);
    return v < 1.0 ? v : 1.0;
}

const char* state_name(CState s) {
    switch (s) {
        case CState::D: return "D";
        case CState::C: return "C";
        case CState::CG: return "CG";
        case CState::CF: return "CF";
        case CState::CGF: return "CGF";
        case CState::DT: return "DT";
    }
    return "?";
}

CState parse_cstate(const std::string& name) {
    for (CState s : {CState::D, CState::C, CState::CG, CState::CF, CState::CGF, CState::DT})
        if (name == state_name(s)) return s;
    throw std::invalid_argument("unknown compression state: " + name);
}

const char* branch_name(Branch b) {
    switch (b) {
        case Branch::Idle: return "idle";
        case Branch::JoinFood: return "join_food";
        case Branch::JoinToken: return "join_token";
        case Branch::Demote: return "demote";
        case Branch::PassToken: return "pass_token";
        case Branch::GenerateToken: return "generate_token";
        case Branch::Dissolve: return "dissolve";
    }
    return "?";
}

void CompressionParams::validate() const {
    if (!(p > 0 && p < 1.0 / 6.0)) throw std::invalid_argument("p must lie in (0, 1/6)");
    if (!(lambda > 0)) throw std::invalid_argument("lambda must be positive");
}

bool is_cluster_site(const CompressionWorld& w, Coord c) {
    if (w.config.is_food(c)) return true;
    int id = w.at(c);
    return id != kEmpty && is_cluster_state(w.state[id]);
}

namespace {

auto cluster_fn(const CompressionWorld& w) {
    return [&w](Coord c) { return is_cluster_site(w, c); };
}

auto blocked_fn(const CompressionWorld& w) {
    return [&w](Coord c) { return w.config.blocked(c); };
}

void spread_tokens(CompressionWorld& w, int id, StateChange& out) {
    for (Coord n : w.lattice().neighbors(w.pos[id])) {
        int j = w.at(n);
        if (j == kEmpty || !is_compression(w.state[j])) continue;
        w.state[j] = CState::DT;
        out.changed.emplace_back(j, CState::DT);
    }
}

bool stale_food_neighbor(const CompressionWorld& w, Coord c) {
    const Lattice& lat = w.lattice();
    for (int d = 0; d < 6; ++d) {
        Coord f = lat.neighbor(c, d);
        if (!w.config.is_food(f)) continue;
        for (Coord s : lat.common_neighbors(c, f)) {
            int j = w.at(s);
            if (j != kEmpty && is_compression(w.state[j]) && !food_bit(w.state[j])) return true;
        }
    }
    return false;
}

}  // namespace

MoveProposal propose_move(const CompressionWorld& w, Coord from, Coord to, double lambda) {
    const Lattice& lat = w.lattice();
    MoveProposal m{lat.wrap(from), lat.wrap(to)};
    m.verdict = evaluate_move(lat, from, to, cluster_fn(w), blocked_fn(w));
    if (m.verdict != Verdict::Occupied) m.delta_e = delta_edges(lat, from, to, cluster_fn(w));
    m.accept_prob = m.verdict == Verdict::Valid ? acceptance_probability(m.delta_e, lambda) : 0.0;
    return m;
}

Verdict is_valid_compression_move(const CompressionWorld& w, Coord from, Coord to) {
    return evaluate_move(w.lattice(), from, to, cluster_fn(w), blocked_fn(w));
}

bool causes_local_disconnection(const CompressionWorld& w, Coord from, Coord to) {
    return local_disconnection(w.lattice(), from, to, cluster_fn(w));
}

StateChange state_change(CompressionWorld& w, int id, const CompressionParams& params, Rng& rng) {
    const Lattice& lat = w.lattice();
    StateChange out;
    CState& s = w.state[id];
    out.before = s;
    Coord c = w.pos[id];
    bool near_food = w.config.food_adjacent(c);

    if (s == CState::D) {
        if (near_food) {
            if (bernoulli(rng, params.p)) {
                s = CState::CF;
                out.branch = Branch::JoinFood;
            }
        } else {
            int holders[6];
            int count = 0;
            for (Coord n : lat.neighbors(c)) {
                int j = w.at(n);
                if (j != kEmpty && growth_bit(w.state[j])) holders[count++] = j;
            }
            if (count > 0 && bernoulli(rng, params.p)) {
                int j = holders[uniform_int(rng, count)];
                w.state[j] = compose(false, food_bit(w.state[j]));
                out.changed.emplace_back(j, w.state[j]);
                s = CState::C;
                out.branch = Branch::JoinToken;
            }
        }
    } else if (s == CState::DT) {
        s = CState::D;
        out.branch = Branch::Dissolve;
        spread_tokens(w, id, out);
    } else {
        bool fb = food_bit(s);
        if ((fb && !near_food) || (!fb && near_food) || (near_food && stale_food_neighbor(w, c))) {
            s = CState::D;
            out.branch = Branch::Demote;
            spread_tokens(w, id, out);
        } else if (growth_bit(s)) {
            int d = uniform_int(rng, 6);
            int j = w.at(lat.neighbor(c, d));
            if (j != kEmpty && is_compression(w.state[j]) && !growth_bit(w.state[j])) {
                w.state[j] = compose(true, food_bit(w.state[j]));
                out.changed.emplace_back(j, w.state[j]);
                s = compose(false, fb);
                out.branch = Branch::PassToken;
            }
        } else if (near_food) {
            if (bernoulli(rng, params.p)) {
                s = compose(true, fb);
                out.branch = Branch::GenerateToken;
            }
        }
    }
    out.after = s;
    return out;
}

std::optional<MoveRecord> movement_step(CompressionWorld& w, int id, bool was_dt, const CompressionParams& params,
                                        Rng& rng) {
    if (was_dt) return std::nullopt;
    const Lattice& lat = w.lattice();
    CState s = w.state[id];
    Coord from = w.pos[id];
    int d = uniform_int(rng, 6);
    Coord to = lat.neighbor(from, d);
    MoveRecord rec;
    if (s == CState::D) {
        rec.proposal = MoveProposal{from, to};
        if (!w.config.blocked(to)) {
            rec.proposal.verdict = Verdict::Valid;
            rec.proposal.accept_prob = 1.0;
            w.move(id, to);
            rec.executed = true;
        } else {
            rec.proposal.verdict = Verdict::Occupied;
        }
        return rec;
    }
    if (!is_compression(s)) return std::nullopt;
    rec.compression = true;
    rec.proposal = propose_move(w, from, to, params.lambda);
    if (rec.proposal.verdict == Verdict::Valid && bernoulli(rng, rec.proposal.accept_prob)) {
        rec.disconnects = causes_local_disconnection(w, from, to);
        w.move(id, to);
        rec.executed = true;
    }
    w.state[id] = compose(growth_bit(s), w.config.food_adjacent(w.pos[id]));
    return rec;
}

CompressionActivation activate(CompressionWorld& w, int id, const CompressionParams& params, Rng& rng) {
    CompressionActivation a;
    a.particle = id;
    bool was_dt = w.state[id] == CState::DT;
    a.change = state_change(w, id, params, rng);
    a.move = movement_step(w, id, was_dt, params, rng);
    return a;
}

}  // namespace forage
