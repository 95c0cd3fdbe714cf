#pragma once

#include <optional>
#include <string>
#include <vector>

#include "forage/world.hpp"

namespace forage {

struct SpiralState {
    bool compression = false;
    int base = 0;  // 0..6
    bool verified = false;
    int parent = 0;  // direction index

    static SpiralState dispersion() { return {}; }
    static SpiralState make(int base, bool verified, int parent) { return {true, base, verified, parent}; }
    friend bool operator==(const SpiralState&, const SpiralState&) = default;
};

// "D", "3", "3*", "6" followed by "@d" for compression states, e.g. "2*@5".
std::string encode(const SpiralState& s);
SpiralState parse_spiral_state(const std::string& text);

struct SpiralParams {
    double rho = 0.25;
    void validate() const;
};

using SpiralWorld = World<SpiralState>;

// Attachment predicate for a particle (real or hypothetical) at v holding s with parent direction d.
bool attachment_property(const SpiralWorld& w, Coord v, const SpiralState& s);

struct Candidate {
    int base;
    int dir;
};

// All unverified (state, direction) pairs satisfying the attachment property at v,
// ordered by base state then direction.
std::vector<Candidate> attachment_candidates(const SpiralWorld& w, Coord v);

enum class Kind { Dispersion, Stable, Unstable };

struct Classification {
    Kind kind = Kind::Dispersion;
    bool verifiable = false;
    std::vector<Candidate> candidates;  // filled for unstable and dispersion particles
    bool attachable() const { return kind != Kind::Stable && !candidates.empty(); }
    std::optional<Candidate> chosen() const {
        if (!attachable()) return std::nullopt;
        return candidates.front();
    }
};

bool is_stable(const SpiralWorld& w, int id);
bool is_verifiable(const SpiralWorld& w, int id);
Classification classify(const SpiralWorld& w, int id);

struct SpiralActivation {
    int particle = -1;
    SpiralState before;
    SpiralState after;
    bool moved = false;
    Coord from;
    Coord to;
};

SpiralActivation activate(SpiralWorld& w, int id, const SpiralParams& params, Rng& rng);

// Canonical spiral sites around food, starting at food + dir(start).
// Each entry carries the site and its parent direction.
struct SpiralSite {
    Coord site;
    int parent;
};
// Sites are generated on an unbounded plane (offsets from food at the origin).
std::vector<SpiralSite> canonical_spiral(int start, int count);

struct SpiralDescriptor {
    Coord food;
    int start = 0;
    std::vector<int> particles;  // in spiral order
};

// Chain length matching the canonical spiral from food in direction start, with
// states 0*..5* then 6. Chains shorter than 6 are partial.
std::vector<int> trace_chain(const SpiralWorld& w, Coord food, int start);
std::vector<SpiralDescriptor> find_spirals(const SpiralWorld& w);

}  // namespace forage
