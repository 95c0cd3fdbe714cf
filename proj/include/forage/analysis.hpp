#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "forage/compression.hpp"
#include "forage/spiral.hpp"

namespace forage {

// ---- compression algorithm -------------------------------------------------

// Connected components of compression and DT particles; food is not a member.
std::vector<std::vector<int>> components(const CompressionWorld& w);

struct InvariantReport {
    bool ok = true;
    std::vector<std::vector<int>> offending;
};
InvariantReport check_state_invariant(const CompressionWorld& w);

std::vector<int> residual_compression(const CompressionWorld& w);

struct Potential {
    int phi = 0;
    int phi_c = 0;
    int phi_dt = 0;
    int phi_t = 0;
};
Potential potential(const CompressionWorld& w);

// Sites of the cluster grown from food through compression and DT particles.
// Food sites are included.
std::vector<Coord> food_cluster(const CompressionWorld& w);

// All compression/DT particles and every food site form one connected set.
bool single_cluster_with_food(const CompressionWorld& w);

// ---- geometry ----------------------------------------------------------------

// Boundary walk length of a connected site set: 2*edges - 3*triangles.
int perimeter(const Lattice& lat, const std::vector<Coord>& sites);
int p_min(int n);
double alpha_ratio(const Lattice& lat, const std::vector<Coord>& sites);
// Throws std::invalid_argument when the set wraps around the torus.
bool is_hole_free(const Lattice& lat, const std::vector<Coord>& sites);
bool is_connected(const Lattice& lat, const std::vector<Coord>& sites);
// Fraction of occupied sites with at least three occupied neighbours.
double density_proxy(const LatticeConfig& cfg);

// ---- spiral algorithm --------------------------------------------------------

std::vector<int> residual_spiral(const SpiralWorld& w);

struct Circle {
    Coord center;
    int zero_dir = 0;  // direction from center to position 0
    friend auto operator<=>(const Circle&, const Circle&) = default;
};

bool correctly_filled(const SpiralWorld& w, const Circle& c, int x);
int circle_value(const SpiralWorld& w, const Circle& c);
int inconsistency_value(const SpiralWorld& w);
bool has_complete_circle(const SpiralWorld& w, bool require_verified);
int stage(const SpiralWorld& w);
int stage_given(const SpiralWorld& w, int inconsistency);

struct AuxGraph {
    // (from particle, to site) pairs.
    std::vector<std::pair<int, Coord>> edges;
    int max_in_degree = 0;  // over non-food targets
};
AuxGraph auxiliary_graph(const SpiralWorld& w);

// ---- dominating chain ----------------------------------------------------------

struct HittingEstimate {
    double mean = 0;
    double stderr_mean = 0;
};
HittingEstimate biased_walk_hitting_time(int n, int k, double eta, int trials, Rng& rng);

// ---- metrics -------------------------------------------------------------------

struct MetricsFrame {
    long long step = 0;
    int phi = 0, phi_c = 0, phi_dt = 0, phi_t = 0;
    int perimeter = 0;
    double alpha = 1.0;
    int n_residual = 0;
    int inconsistency = 0;
    int stage = 0;  // 0 for compression runs
    int cluster_count = 0;
    int n_spiral = 0;
    double density = 0;
    std::map<std::string, int> n_by_state;
};

MetricsFrame measure(const CompressionWorld& w, long long step);
MetricsFrame measure(const SpiralWorld& w, long long step);

std::string csv_header();
std::string to_csv(const MetricsFrame& f);

}  // namespace forage
