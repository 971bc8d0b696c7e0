#pragma once

#include "ptorus/atlas.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace ptorus {

struct ProperOptions {
    double tol_jump = 1e-6;
    double tol_alpha = 1e-8;
    double tol_disjoint = 1e-6;
    double tol_member = 1e-10;    ///< distance under which a point counts as lying on a curve of Gamma_j
    double probe_radius = 1e-5;   ///< margins are capped at this distance
    std::size_t a3_samples = 20000;  ///< samples of gamma_{k+1} used per level
};

struct DiscontinuityReport {
    std::string map;
    int K = 0, J = 0, geometric_depth = 0;
    ProperOptions opt;

    bool a0_pass = false;
    double a0_margin = 0;
    bool a1_pass = false;
    double a1_spread = 0;
    bool a2_pass = false;
    std::vector<double> a2_margin;         ///< k = 2..K
    bool a3_pass = false;
    std::vector<double> a3_distance;       ///< k = 1..K-1
    std::vector<std::size_t> a3_kept;      ///< preimage points found on Gamma-hat
    std::vector<std::size_t> a3_uncertified;  ///< kept candidates on levels without geometry

    [[nodiscard]] bool pass() const { return a0_pass && a1_pass && a2_pass && a3_pass; }
    /// key = value lines, one table row per k.
    void write(std::ostream& os) const;
};

/// Smallest distance between F(x+) and F(x-) over the samples of c.
double check_a0(const MapSpec& m, const PolyCurve& c);

/// Largest alpha disagreement over all levels of the orbit.
double check_a1(const CurveOrbit& orbit);

/// For k = 2..K, the smallest distance from gamma_k to pieces of Gamma_1 parallel to it,
/// capped at the probe radius. Transversal crossings are points and are not counted.
std::vector<double> check_a2(const CurveOrbit& orbit, const GammaAtlas& atlas, int K, const ProperOptions& opt = {});

struct A3Level {
    double distance = 0;        ///< largest distance from gamma_k of preimage points found on Gamma-hat
    std::size_t kept = 0;
    std::size_t uncertified = 0;
};

/// For k = 1..K-1, preimages of samples of gamma_{k+1} that lie on a parallel piece of some
/// Gamma_j, j <= J, and their largest distance from gamma_k.
std::vector<A3Level> check_a3(const CurveOrbit& orbit, const GammaAtlas& atlas, int K, const ProperOptions& opt = {});

/// Smallest distance from samples of gamma_k to pieces of gamma_j parallel to them, capped at radius.
double pairwise_margin(const CurveOrbit& orbit, int j, int k, double radius);

enum class MarkovVerdict { consistent_with_non_markov, inconclusive };
const char* verdict_name(MarkovVerdict v);

/// Lengths of gamma_k bounded below on the second half of the orbit and pairwise disjoint levels.
MarkovVerdict markov_heuristic(const CurveOrbit& orbit, int K, double tol_disjoint = 1e-6);

/// Full check with the orbit of the default boundary curve; J defaults to 2K.
DiscontinuityReport check_proper(const MapSpec& m, int K, int J = 0, const ProperOptions& opt = {},
                                 const OrbitOptions& oopt = {});

} // namespace ptorus
