#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "forage/move_rules.hpp"
#include "forage/world.hpp"

namespace forage {

enum class CState : std::uint8_t { D, C, CG, CF, CGF, DT };

constexpr bool is_compression(CState s) { return s == CState::C || s == CState::CG || s == CState::CF || s == CState::CGF; }
constexpr bool is_cluster_state(CState s) { return is_compression(s) || s == CState::DT; }
constexpr bool growth_bit(CState s) { return s == CState::CG || s == CState::CGF; }
constexpr bool food_bit(CState s) { return s == CState::CF || s == CState::CGF; }
constexpr CState compose(bool growth, bool food) {
    return growth ? (food ? CState::CGF : CState::CG) : (food ? CState::CF : CState::C);
}

const char* state_name(CState s);
CState parse_cstate(const std::string& name);

struct CompressionParams {
    double p = 0.1;
    double lambda = 4.0;
    // Throws std::invalid_argument when out of range.
    void validate() const;
};

using CompressionWorld = World<CState>;

enum class Branch {
    Idle,
    JoinFood,
    JoinToken,
    Demote,
    PassToken,
    GenerateToken,
    Dissolve,
};

const char* branch_name(Branch b);

struct StateChange {
    Branch branch = Branch::Idle;
    CState before = CState::D;
    CState after = CState::D;
    std::vector<std::pair<int, CState>> changed;  // other particles, new state
};

struct MoveProposal {
    Coord from;
    Coord to;
    int delta_e = 0;
    Verdict verdict = Verdict::InvalidProperty;
    double accept_prob = 0.0;
};

struct MoveRecord {
    bool compression = false;  // Metropolis move rather than an exclusion step
    bool executed = false;
    MoveProposal proposal;
    bool disconnects = false;  // local disconnection of the executed move
};

struct CompressionActivation {
    int particle = -1;
    StateChange change;
    std::optional<MoveRecord> move;
};

bool is_cluster_site(const CompressionWorld& w, Coord c);

MoveProposal propose_move(const CompressionWorld& w, Coord from, Coord to, double lambda);
Verdict is_valid_compression_move(const CompressionWorld& w, Coord from, Coord to);
bool causes_local_disconnection(const CompressionWorld& w, Coord from, Coord to);

StateChange state_change(CompressionWorld& w, int id, const CompressionParams& params, Rng& rng);
std::optional<MoveRecord> movement_step(CompressionWorld& w, int id, bool was_dt, const CompressionParams& params, Rng& rng);
CompressionActivation activate(CompressionWorld& w, int id, const CompressionParams& params, Rng& rng);

}  // namespace forage
